"""Scikit-learn style subset selection.

``SubmodularSelector`` follows the estimator contract (``get_params`` /
``set_params`` / ``clone`` / ``fit`` / ``transform``): ``fit`` runs greedy
maximization over the rows of ``X`` and ``transform`` keeps the selected
rows, so the selector drops into pipelines that expect a transformer.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .functions import (
    DisparityMin,
    FacilityLocation,
    FeatureBased,
    ProbabilisticSetCover,
    SetCover,
)
from .kernels import SimilarityKernel
from .optimize import Constraint, greedy_cardinality, greedy_knapsack, greedy_cover, lazy_greedy

_FUNCTIONS = ("facility_location", "feature_based", "set_cover",
              "probabilistic_set_cover", "disparity_min")
_ALIASES = {"fl": "facility_location", "fb": "feature_based", "sc": "set_cover",
            "psc": "probabilistic_set_cover", "dm": "disparity_min"}


def _cosine_kernel(X: np.ndarray) -> SimilarityKernel:
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    unit = np.divide(X, norms, out=np.zeros_like(X), where=norms > 1e-12)
    s = (1.0 + unit @ unit.T) / 2.0
    dead = (norms.ravel() <= 1e-12)
    s[dead, :] = 0.0
    s[:, dead] = 0.0
    np.clip(s, 0.0, 1.0, out=s)
    return SimilarityKernel(dense=(s + s.T) * 0.5)


class SubmodularSelector(BaseEstimator):
    """Select a representative/diverse/covering subset of samples.

    Parameters
    ----------
    function : str
        Objective: ``facility_location``, ``feature_based``, ``set_cover``,
        ``probabilistic_set_cover`` or ``disparity_min`` (short forms
        ``fl``/``fb``/``sc``/``psc``/``dm`` accepted).  Kernel-based
        objectives see ``X`` through a cosine similarity mapped to [0, 1]
        unless ``metric='precomputed'``; ``set_cover`` reads ``X`` as an
        item-by-concept membership matrix thresholded at 0.5;
        ``probabilistic_set_cover`` reads it as item-by-concept
        probabilities.
    n_select : int or None
        Cardinality constraint (default 10 when no other constraint given).
    budget : float or None
        Knapsack budget over per-sample ``costs`` passed to ``fit``.
    cover : float or None
        Cover fraction in (0, 1] of the full-set objective value.
    metric : {"cosine", "precomputed"}
        With ``precomputed``, ``X`` must be a symmetric similarity matrix
        with entries in [0, 1].
    psi : str
        Concave transform for ``feature_based``: sqrt | log | ratio | identity.
    lazy : bool
        Use the accelerated greedy (identical selection, fewer probes).

    Attributes
    ----------
    selected_indices_ : ndarray of selected row indices, in pick order.
    gains_ : per-pick marginal gains.
    objective_value_ : objective at the selection.
    """

    def __init__(self, function: str = "facility_location", n_select: int | None = None,
                 budget: float | None = None, cover: float | None = None,
                 metric: str = "cosine", psi: str = "sqrt", lazy: bool = True):
        self.function = function
        self.n_select = n_select
        self.budget = budget
        self.cover = cover
        self.metric = metric
        self.psi = psi
        self.lazy = lazy

    def _constraint(self) -> Constraint:
        given = [c for c in (self.n_select, self.budget, self.cover) if c is not None]
        if len(given) > 1:
            raise ValueError("specify at most one of n_select/budget/cover")
        if self.budget is not None:
            return Constraint.knapsack(self.budget)
        if self.cover is not None:
            return Constraint.cover(self.cover)
        return Constraint.cardinality(self.n_select if self.n_select is not None else 10)

    def _objective(self, X: np.ndarray):
        name = _ALIASES.get(self.function, self.function)
        if name not in _FUNCTIONS:
            raise ValueError(f"unknown function {self.function!r}")
        if name in ("facility_location", "disparity_min"):
            if self.metric == "precomputed":
                kernel = SimilarityKernel.from_dense(X)
            elif self.metric == "cosine":
                kernel = _cosine_kernel(X)
            else:
                raise ValueError(f"unknown metric {self.metric!r}")
            return FacilityLocation(kernel) if name == "facility_location" else DisparityMin(kernel)
        if name == "feature_based":
            return FeatureBased(X, psi=self.psi)
        if name == "set_cover":
            sets = [tuple(np.flatnonzero(row >= 0.5)) for row in X]
            return SetCover(sets)
        return ProbabilisticSetCover(np.clip(X, 0.0, 1.0).T)

    def fit(self, X, y=None, costs=None):
        """Run greedy selection over the rows of X."""
        X = check_array(X, dtype=np.float64)
        constraint = self._constraint()
        obj = self._objective(X)
        k = constraint.k
        if k is not None and k > obj.n:
            raise ValueError(f"n_select={k} exceeds the {obj.n} available samples")
        if self.lazy:
            result = lazy_greedy(obj, constraint, costs=costs)
        elif constraint.kind == "cardinality":
            result = greedy_cardinality(obj, k)
        elif constraint.kind == "knapsack":
            result = greedy_knapsack(obj, constraint.budget, costs)
        else:
            result = greedy_cover(obj, constraint.fraction, costs=costs)
        self.n_features_in_ = X.shape[1]
        self.selected_indices_ = np.asarray(result.selected, dtype=np.int64)
        self.gains_ = np.asarray(result.gains)
        self.objective_value_ = result.objective_value
        self.result_ = result
        return self

    def transform(self, X):
        """Subset the rows of X to the fitted selection."""
        check_is_fitted(self, "selected_indices_")
        X = check_array(X, dtype=np.float64)
        return X[self.selected_indices_]

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, y, **fit_params).transform(X)
