"""Submodular and diversity objectives with memoized marginal gains.

Every objective keeps per-function precompute statistics for the set
committed so far, so a marginal gain costs far less than two from-scratch
evaluations:

===================  =============================  ===========
objective            statistics                     gain cost
===================  =============================  ===========
facility location    per-item best similarity       O(n)
feature based        accumulated feature mass       O(#features)
set cover            covered concept set            O(|U_j|)
prob. set cover      per-concept residual product   O(#concepts)
disparity min        min distance to selection      O(1)
===================  =============================  ===========

``evaluate`` is always computed from scratch and never consults the
statistics; tests rely on that independence.  ``gain``/``evaluate`` are
read-only and safe to call concurrently; ``commit`` requires exclusive
access.
"""

from __future__ import annotations

import abc
import math
from typing import Callable, Iterable, Sequence

import numpy as np

from .kernels import SimilarityKernel
from .validation import (
    check_feature_matrix,
    check_item_index,
    check_probability_matrix,
    check_weights,
)

PSI: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "sqrt": np.sqrt,
    "log": np.log1p,
    "ratio": lambda x: x / (1.0 + x),
    "identity": lambda x: x,
}


class SubmodularObjective(abc.ABC):
    """A set function bound to a ground set of ``n`` items.

    Subclasses implement from-scratch evaluation plus statistics-based
    gain/commit.  ``monotone``/``submodular`` document the function class;
    disparity-min is neither and says so.
    """

    name: str = ""
    monotone: bool = True
    submodular: bool = True

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("ground set must be non-empty")
        self._n = n
        self._selected: list[int] = []
        self._selected_set: set[int] = set()

    @property
    def n(self) -> int:
        return self._n

    @property
    def selected(self) -> tuple[int, ...]:
        """Committed items in commit order."""
        return tuple(self._selected)

    def evaluate(self, items: Iterable[int]) -> float:
        """f(X) computed from scratch; f(empty) == 0."""
        idx = self._clean_indices(items)
        if idx.size == 0:
            return 0.0
        return self._evaluate(idx)

    def gain(self, j: int) -> float:
        """Marginal gain f(X + j) - f(X) for the committed X, via statistics."""
        j = check_item_index(j, self._n)
        if j in self._selected_set:
            raise ValueError(f"item {j} already selected")
        return self._gain(j)

    def commit(self, j: int) -> None:
        """Add j to the committed set and update the statistics."""
        j = check_item_index(j, self._n)
        if j in self._selected_set:
            raise ValueError(f"item {j} already selected")
        self._commit(j)
        self._selected.append(j)
        self._selected_set.add(j)

    def reset(self) -> None:
        """Return to the empty set."""
        self._selected.clear()
        self._selected_set.clear()
        self._reset()

    def current_value(self) -> float:
        """f of the committed set, read off the statistics."""
        if not self._selected:
            return 0.0
        return self._current()

    def _clean_indices(self, items: Iterable[int]) -> np.ndarray:
        idx = np.unique(np.fromiter((int(i) for i in items), dtype=np.int64))
        if idx.size and (idx[0] < 0 or idx[-1] >= self._n):
            bad = idx[0] if idx[0] < 0 else idx[-1]
            raise IndexError(f"item index {bad} out of range for ground set of size {self._n}")
        return idx

    @abc.abstractmethod
    def _evaluate(self, idx: np.ndarray) -> float: ...

    @abc.abstractmethod
    def _gain(self, j: int) -> float: ...

    @abc.abstractmethod
    def _commit(self, j: int) -> None: ...

    @abc.abstractmethod
    def _reset(self) -> None: ...

    @abc.abstractmethod
    def _current(self) -> float: ...


class FacilityLocation(SubmodularObjective):
    """Representation objective: sum over items of the best similarity to the
    selection.  Statistics: that per-item best, starting at 0."""

    name = "facility_location"

    def __init__(self, kernel: SimilarityKernel):
        super().__init__(kernel.n)
        self.kernel = kernel
        self._best = np.zeros(kernel.n)

    def _evaluate(self, idx: np.ndarray) -> float:
        if self.kernel.dense is not None:
            return float(self.kernel.dense[:, idx].max(axis=1).sum())
        best = np.zeros(self._n)
        for j in idx:
            np.maximum(best, self.kernel.row(int(j)), out=best)
        return float(best.sum())

    def _gain(self, j: int) -> float:
        if self.kernel.dense is not None:
            return float(np.maximum(self.kernel.dense[j] - self._best, 0.0).sum())
        row = self.kernel.sparse.getrow(j)
        return float(np.maximum(row.data - self._best[row.indices], 0.0).sum())

    def _commit(self, j: int) -> None:
        if self.kernel.dense is not None:
            np.maximum(self._best, self.kernel.dense[j], out=self._best)
        else:
            row = self.kernel.sparse.getrow(j)
            self._best[row.indices] = np.maximum(self._best[row.indices], row.data)

    def _reset(self) -> None:
        self._best[:] = 0.0

    def _current(self) -> float:
        return float(self._best.sum())


class FeatureBased(SubmodularObjective):
    """Coverage-style objective: sum over features of a concave function of
    the selection's accumulated feature mass.

    ``psi`` is one of sqrt | log | ratio | identity (identity makes the
    function modular; the others keep it submodular for nonnegative
    features).
    """

    name = "feature_based"

    def __init__(self, features, psi: str = "sqrt"):
        q = check_feature_matrix(features)
        super().__init__(q.shape[0])
        if psi not in PSI:
            raise ValueError(f"unknown psi {psi!r}; choose from {sorted(PSI)}")
        self.psi_name = psi
        self._psi = PSI[psi]
        self._q = q
        self._mass = np.zeros(q.shape[1])
        self._psi_sum = 0.0

    def _evaluate(self, idx: np.ndarray) -> float:
        return float(self._psi(self._q[idx].sum(axis=0)).sum())

    def _gain(self, j: int) -> float:
        return float(self._psi(self._mass + self._q[j]).sum()) - self._psi_sum

    def _commit(self, j: int) -> None:
        self._mass += self._q[j]
        self._psi_sum = float(self._psi(self._mass).sum())

    def _reset(self) -> None:
        self._mass[:] = 0.0
        self._psi_sum = 0.0

    def _current(self) -> float:
        return self._psi_sum


class SetCover(SubmodularObjective):
    """Weighted coverage of discrete concepts; statistics: the covered set."""

    name = "set_cover"

    def __init__(self, concept_sets: Sequence[Iterable], weights: dict | None = None):
        super().__init__(len(concept_sets))
        self._sets = [tuple(sorted(set(s))) for s in concept_sets]
        self._weights = dict(weights) if weights is not None else {}
        self._covered: set = set()

    def weight(self, concept) -> float:
        return float(self._weights.get(concept, 1.0))

    def _sum(self, concepts: Iterable) -> float:
        return float(sum(self.weight(u) for u in sorted(concepts)))

    def _evaluate(self, idx: np.ndarray) -> float:
        union: set = set()
        for j in idx:
            union.update(self._sets[int(j)])
        return self._sum(union)

    def _gain(self, j: int) -> float:
        return self._sum(u for u in self._sets[j] if u not in self._covered)

    def _commit(self, j: int) -> None:
        self._covered.update(self._sets[j])

    def _reset(self) -> None:
        self._covered.clear()

    def _current(self) -> float:
        return self._sum(self._covered)

    @property
    def covered(self) -> frozenset:
        return frozenset(self._covered)

    def all_concepts(self) -> frozenset:
        out: set = set()
        for s in self._sets:
            out.update(s)
        return frozenset(out)


class ProbabilisticSetCover(SubmodularObjective):
    """Soft coverage: each concept is covered with probability
    1 - prod(1 - p[concept, item]) over the selection.  Statistics: the
    per-concept residual product.  Weighted per concept."""

    name = "probabilistic_set_cover"

    def __init__(self, probabilities, weights=None):
        p = check_probability_matrix(probabilities)
        super().__init__(p.shape[1])
        self._p = p
        self._w = check_weights(weights, p.shape[0])
        self._residual = np.ones(p.shape[0])

    def _evaluate(self, idx: np.ndarray) -> float:
        residual = np.prod(1.0 - self._p[:, idx], axis=1)
        return float((self._w * (1.0 - residual)).sum())

    def _gain(self, j: int) -> float:
        return float((self._w * self._residual * self._p[:, j]).sum())

    def _commit(self, j: int) -> None:
        self._residual *= 1.0 - self._p[:, j]

    def _reset(self) -> None:
        self._residual[:] = 1.0

    def _current(self) -> float:
        return float((self._w * (1.0 - self._residual)).sum())


class DisparityMin(SubmodularObjective):
    """Diversity objective: minimum pairwise distance within the selection.

    Not submodular and not monotone; singletons and the empty set score 0.
    Statistics: the running min pairwise distance plus each item's distance
    to the selection, maintained incrementally.
    """

    name = "disparity_min"
    monotone = False
    submodular = False

    def __init__(self, kernel: SimilarityKernel | None = None, *,
                 distances: np.ndarray | None = None):
        if (kernel is None) == (distances is None):
            raise ValueError("provide exactly one of kernel/distances")
        if distances is not None:
            distances = np.asarray(distances, dtype=np.float64)
            if distances.ndim != 2 or distances.shape[0] != distances.shape[1]:
                raise ValueError("distance matrix must be square")
            n = distances.shape[0]
        else:
            n = kernel.n
        super().__init__(n)
        self.kernel = kernel
        self._d = distances
        self._min_pair = math.inf
        self._dist_to_sel = np.full(n, math.inf)

    def distance_row(self, j: int) -> np.ndarray:
        if self._d is not None:
            return self._d[j]
        return 1.0 - self.kernel.row(j)

    @property
    def dist_to_selection(self) -> np.ndarray:
        """Min distance from each item to the committed set (+inf at empty)."""
        return self._dist_to_sel

    def sum_distance_scores(self) -> np.ndarray:
        """Per-item sum of distances to all other items (first-pick scores)."""
        if self._d is not None:
            return self._d.sum(axis=1) - np.diag(self._d)
        sums = self._n - self.kernel.row_sums()
        if self.kernel.dense is not None:
            diag = 1.0 - np.diag(self.kernel.dense)
        else:
            diag = 1.0 - self.kernel.sparse.diagonal()
        return sums - diag

    def _evaluate(self, idx: np.ndarray) -> float:
        if idx.size <= 1:
            return 0.0
        block = np.stack([self.distance_row(int(j))[idx] for j in idx])
        np.fill_diagonal(block, math.inf)
        return float(block.min())

    def _gain(self, j: int) -> float:
        k = len(self._selected)
        if k == 0:
            return 0.0
        if k == 1:
            return float(self._dist_to_sel[j])
        return float(min(self._min_pair, self._dist_to_sel[j])) - self._min_pair

    def _commit(self, j: int) -> None:
        if self._selected:
            self._min_pair = float(min(self._min_pair, self._dist_to_sel[j]))
        np.minimum(self._dist_to_sel, self.distance_row(j), out=self._dist_to_sel)

    def _reset(self) -> None:
        self._min_pair = math.inf
        self._dist_to_sel[:] = math.inf

    def _current(self) -> float:
        if len(self._selected) <= 1:
            return 0.0
        return self._min_pair


def psi_names() -> list[str]:
    return sorted(PSI)


def make_objective(spec: str, *, kernel: SimilarityKernel | None = None,
                   features=None, concept_sets=None, concept_weights=None,
                   probabilities=None, probability_weights=None) -> SubmodularObjective:
    """Build an objective from its CLI name: fl | fb[:psi] | sc | psc | dm."""
    kind, _, arg = spec.partition(":")
    if kind == "fl":
        if kernel is None:
            raise ValueError("facility location needs a similarity kernel")
        return FacilityLocation(kernel)
    if kind == "fb":
        if features is None:
            raise ValueError("feature-based objective needs a feature matrix")
        return FeatureBased(features, psi=arg or "sqrt")
    if kind == "sc":
        if concept_sets is None:
            raise ValueError("set cover needs per-item concept sets")
        return SetCover(concept_sets, weights=concept_weights)
    if kind == "psc":
        if probabilities is None:
            raise ValueError("probabilistic set cover needs a probability matrix")
        return ProbabilisticSetCover(probabilities, weights=probability_weights)
    if kind == "dm":
        if kernel is None:
            raise ValueError("disparity-min needs a similarity kernel")
        return DisparityMin(kernel)
    raise ValueError(f"unknown objective {spec!r} (use fl|fb[:psi]|sc|psc|dm)")
