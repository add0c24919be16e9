"""Input validation helpers for objective constructors and estimators."""

from __future__ import annotations

import numpy as np


def check_feature_matrix(q, name: str = "features") -> np.ndarray:
    """2-D finite nonnegative float matrix (items x features)."""
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise ValueError(f"{name} contains non-finite values")
    if q.min() < 0:
        raise ValueError(f"{name} must be nonnegative for concave-over-sums objectives")
    return q


def check_probability_matrix(p, name: str = "probabilities") -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 2:
        raise ValueError(f"{name} must be 2-D (concepts x items), got shape {p.shape}")
    if not np.all(np.isfinite(p)) or p.min() < -1e-12 or p.max() > 1 + 1e-12:
        raise ValueError(f"{name} entries must lie in [0, 1]")
    return np.clip(p, 0.0, 1.0)


def check_weights(w, m: int, name: str = "weights") -> np.ndarray:
    if w is None:
        return np.ones(m)
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (m,):
        raise ValueError(f"{name} must have shape ({m},), got {w.shape}")
    if not np.all(np.isfinite(w)) or w.min() < 0:
        raise ValueError(f"{name} must be finite and nonnegative")
    return w


def check_item_index(j, n: int) -> int:
    j = int(j)
    if not 0 <= j < n:
        raise IndexError(f"item index {j} out of range for ground set of size {n}")
    return j
