"""Pairwise similarity kernels over ground-set items.

Each kernel component maps into [0, 1]: cosine similarity between unit
feature vectors via (1 + cos)/2, histogram Pearson correlation via
(1 + r)/2.  A degenerate (all-zero) feature vector contributes 0 to every
pair it touches; a zero-variance histogram contributes the neutral 0.5.
Components combine as a weighted average, so distance 1 - s is a valid
dissimilarity and values are comparable across recipes.

Kernels are dense up to DENSE_LIMIT items; above that a k-nearest-neighbor
sparse approximation is forced (missing entries read as similarity 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .groundset import ENTITY, KEYFRAME, GroundSet

HIST_COMPONENT = "hist"
DENSE_LIMIT = 20_000

DEFAULT_ENTITY_RECIPES = {
    "face": (("face", 1.0),),
    "scene": (("scene", 0.5), (HIST_COMPONENT, 0.5)),
    "object": (("object", 0.5), (HIST_COMPONENT, 0.5)),
    "human": (("object", 0.5), (HIST_COMPONENT, 0.5)),
}


@dataclass(frozen=True)
class KernelRecipe:
    """Weighted combination of feature-group cosines and the histogram term.

    Weights are normalized to sum to 1 at construction.
    """

    components: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("recipe needs at least one component")
        total = 0.0
        for name, w in self.components:
            if w < 0:
                raise ValueError(f"negative weight for component {name!r}")
            total += w
        if total <= 0:
            raise ValueError("component weights sum to zero")
        if abs(total - 1.0) > 1e-9:
            object.__setattr__(
                self, "components",
                tuple((name, w / total) for name, w in self.components),
            )

    @classmethod
    def parse(cls, text: str) -> "KernelRecipe":
        """Parse ``scene:0.4,object:0.4,hist:0.2``; bare names get equal weight."""
        parts = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if ":" in chunk:
                name, w = chunk.split(":", 1)
                parts.append((name.strip(), float(w)))
            else:
                parts.append((chunk, 1.0))
        return cls(components=tuple(parts))

    @classmethod
    def default_for(cls, gs: GroundSet, entity_kind: str | None = None) -> "KernelRecipe":
        """Equal-weight recipe over the views available for this ground-set kind."""
        if gs.kind in (KEYFRAME, "snippet"):
            names = gs.feature_groups() + [HIST_COMPONENT]
            return cls(components=tuple((n, 1.0) for n in names))
        if gs.kind == ENTITY and entity_kind in DEFAULT_ENTITY_RECIPES:
            return cls(components=DEFAULT_ENTITY_RECIPES[entity_kind])
        names = gs.feature_groups() + [HIST_COMPONENT]
        return cls(components=tuple((n, 1.0) for n in names))

    def feature_groups(self) -> list[str]:
        return [n for n, _ in self.components if n != HIST_COMPONENT]


class SimilarityKernel:
    """Symmetric item-item similarity, dense or kNN-sparse, entries in [0, 1]."""

    def __init__(self, dense: np.ndarray | None = None, sparse: sp.csr_matrix | None = None,
                 knn: int | None = None):
        if (dense is None) == (sparse is None):
            raise ValueError("exactly one of dense/sparse storage required")
        self.dense = dense
        self.sparse = sparse
        self.knn = knn
        self.n = dense.shape[0] if dense is not None else sparse.shape[0]
        self._row_sums: np.ndarray | None = None

    @classmethod
    def from_dense(cls, matrix: np.ndarray, validate: bool = True) -> "SimilarityKernel":
        matrix = np.asarray(matrix, dtype=np.float64)
        if validate:
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise ValueError("similarity matrix must be square")
            if not np.allclose(matrix, matrix.T, atol=1e-9):
                raise ValueError("similarity matrix must be symmetric")
            if matrix.min() < -1e-12 or matrix.max() > 1 + 1e-12:
                raise ValueError("similarity entries must lie in [0, 1]")
        return cls(dense=matrix)

    @property
    def is_sparse(self) -> bool:
        return self.sparse is not None

    @property
    def nbytes(self) -> int:
        if self.dense is not None:
            return self.dense.nbytes
        return self.sparse.data.nbytes + self.sparse.indices.nbytes + self.sparse.indptr.nbytes

    def sim(self, i: int, j: int) -> float:
        self._check_index(i)
        self._check_index(j)
        if self.dense is not None:
            return float(self.dense[i, j])
        return float(self.sparse[i, j])

    def distance(self, i: int, j: int) -> float:
        return 1.0 - self.sim(i, j)

    def row(self, i: int) -> np.ndarray:
        """Row i as a dense vector (missing sparse entries read as 0)."""
        self._check_index(i)
        if self.dense is not None:
            return self.dense[i]
        return self.sparse.getrow(i).toarray().ravel()

    def row_sums(self) -> np.ndarray:
        """Per-row similarity totals, computed once and cached (the kernel is
        immutable, and per-run statistics like farthest-point seeding reuse
        them)."""
        if self._row_sums is None:
            if self.dense is not None:
                self._row_sums = self.dense.sum(axis=1)
            else:
                self._row_sums = np.asarray(self.sparse.sum(axis=1)).ravel()
        return self._row_sums

    def submatrix(self, indices) -> "SimilarityKernel":
        indices = np.asarray(indices)
        if self.dense is not None:
            return SimilarityKernel(dense=self.dense[np.ix_(indices, indices)])
        return SimilarityKernel(sparse=self.sparse[indices][:, indices].tocsr(), knn=self.knn)

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"item index {i} out of range for kernel of size {self.n}")


def distance(kernel: SimilarityKernel, i: int, j: int) -> float:
    """Dissimilarity d = 1 - s; absent sparse entries give d = 1."""
    return kernel.distance(i, j)


def _cosine_component(feats: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(feats, axis=1)
    live = norms > 1e-12
    comp = (1.0 + feats @ feats.T) / 2.0
    np.clip(comp, 0.0, 1.0, out=comp)
    comp[~live, :] = 0.0
    comp[:, ~live] = 0.0
    return comp


def _hist_component(hists: np.ndarray) -> np.ndarray:
    centered = hists - hists.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(centered, axis=1)
    live = norms > 1e-12
    z = np.zeros_like(centered)
    z[live] = centered[live] / norms[live, None]
    comp = (1.0 + z @ z.T) / 2.0
    np.clip(comp, 0.0, 1.0, out=comp)
    # Zero-variance histograms carry no signal: neutral similarity to everything.
    comp[~live, :] = 0.5
    comp[:, ~live] = 0.5
    return comp


def _combined_dense(gs: GroundSet, recipe: KernelRecipe) -> np.ndarray:
    out = np.zeros((gs.n, gs.n))
    for name, weight in recipe.components:
        if name == HIST_COMPONENT:
            comp = _hist_component(gs.hists)
        else:
            if name not in gs.features:
                raise ValueError(f"recipe component {name!r} not present in ground set")
            comp = _cosine_component(gs.features[name])
        out += weight * comp
    out = (out + out.T) * 0.5
    np.clip(out, 0.0, 1.0, out=out)
    return out


def _sparsify(dense: np.ndarray, k: int) -> sp.csr_matrix:
    """Keep the top-k entries of each row, then symmetrize by union (max)."""
    n = dense.shape[0]
    cols = np.argpartition(dense, n - k, axis=1)[:, n - k:]
    rows = np.repeat(np.arange(n), k)
    vals = dense[rows, cols.ravel()]
    mat = sp.coo_matrix((vals, (rows, cols.ravel())), shape=(n, n)).tocsr()
    return mat.maximum(mat.T).tocsr()


def auto_knn(n: int) -> int:
    return max(64, math.ceil(0.01 * n))


def build_kernel(gs: GroundSet, recipe: KernelRecipe | str | None = None,
                 knn: int | None = None, entity_kind: str | None = None) -> SimilarityKernel:
    """Construct the similarity kernel for a ground set.

    ``knn`` switches to the sparse approximation; it is forced (with
    ``auto_knn(n)`` neighbors) once the ground set exceeds DENSE_LIMIT.
    """
    if isinstance(recipe, str):
        recipe = KernelRecipe.parse(recipe)
    if recipe is None:
        recipe = KernelRecipe.default_for(gs, entity_kind)
    if knn is None and gs.n > DENSE_LIMIT:
        knn = min(auto_knn(gs.n), gs.n - 1)
    if knn is not None:
        if not 1 <= knn < gs.n:
            raise ValueError(f"knn must be in [1, {gs.n - 1}] for {gs.n} items")
        if gs.n <= DENSE_LIMIT:
            return SimilarityKernel(sparse=_sparsify(_combined_dense(gs, recipe), knn), knn=knn)
        return SimilarityKernel(sparse=_sparsify_chunked(gs, recipe, knn), knn=knn)
    return SimilarityKernel(dense=_combined_dense(gs, recipe))


def _sparsify_chunked(gs: GroundSet, recipe: KernelRecipe, k: int,
                      chunk: int = 2048) -> sp.csr_matrix:
    """Row-block kNN construction for ground sets too large for a dense matrix."""
    n = gs.n
    groups = [(name, w) for name, w in recipe.components if name != HIST_COMPONENT]
    hist_w = sum(w for name, w in recipe.components if name == HIST_COMPONENT)

    feats = {name: gs.features[name] for name, _ in groups}
    norms = {name: np.linalg.norm(m, axis=1) for name, m in feats.items()}
    centered = gs.hists - gs.hists.mean(axis=1, keepdims=True)
    hnorm = np.linalg.norm(centered, axis=1)
    hlive = hnorm > 1e-12
    z = np.zeros_like(centered)
    z[hlive] = centered[hlive] / hnorm[hlive, None]

    all_rows, all_cols, all_vals = [], [], []
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        block = np.zeros((hi - lo, n))
        for name, w in groups:
            comp = (1.0 + feats[name][lo:hi] @ feats[name].T) / 2.0
            np.clip(comp, 0.0, 1.0, out=comp)
            dead = norms[name] <= 1e-12
            comp[dead[lo:hi], :] = 0.0
            comp[:, dead] = 0.0
            block += w * comp
        if hist_w > 0:
            comp = (1.0 + z[lo:hi] @ z.T) / 2.0
            np.clip(comp, 0.0, 1.0, out=comp)
            comp[~hlive[lo:hi], :] = 0.5
            comp[:, ~hlive] = 0.5
            block += hist_w * comp
        np.clip(block, 0.0, 1.0, out=block)
        cols = np.argpartition(block, n - k, axis=1)[:, n - k:]
        rows = np.repeat(np.arange(lo, hi), k)
        all_rows.append(rows)
        all_cols.append(cols.ravel())
        all_vals.append(block[rows - lo, cols.ravel()])
    mat = sp.coo_matrix(
        (np.concatenate(all_vals), (np.concatenate(all_rows), np.concatenate(all_cols))),
        shape=(n, n),
    ).tocsr()
    return mat.maximum(mat.T).tocsr()
