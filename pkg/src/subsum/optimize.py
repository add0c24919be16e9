"""Greedy maximization under cardinality, knapsack and cover constraints.

The lazy variant keeps a max-heap of stale upper bounds on marginal gains
(valid for submodular objectives) and re-evaluates only the top until it
is fresh.  Because naive and lazy selection probe gains through the same
memoized formulas, their values agree bitwise, and both break ties by
smallest item id; the two variants therefore produce identical selection
sequences.

Disparity-min is neither monotone nor submodular, so it bypasses the heap:
selection is a farthest-point sweep (first the item with the largest total
distance to everything else, then repeatedly the item farthest from the
current selection).  It stops short as soon as the best addition would
leave the objective unchanged.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import IncompatibleRequestError
from .functions import DisparityMin, SubmodularObjective

GAIN_REL_TOL = 1e-9

CARDINALITY = "cardinality"
KNAPSACK = "knapsack"
COVER = "cover"


@dataclass(frozen=True)
class Constraint:
    kind: str
    k: int | None = None
    budget: float | None = None
    fraction: float | None = None

    @staticmethod
    def cardinality(k: int) -> "Constraint":
        if k < 1:
            raise ValueError("cardinality k must be >= 1")
        return Constraint(kind=CARDINALITY, k=int(k))

    @staticmethod
    def knapsack(budget: float) -> "Constraint":
        if budget <= 0:
            raise ValueError("knapsack budget must be positive")
        return Constraint(kind=KNAPSACK, budget=float(budget))

    @staticmethod
    def cover(fraction: float) -> "Constraint":
        if not 0 < fraction <= 1:
            raise ValueError("cover fraction must be in (0, 1]")
        return Constraint(kind=COVER, fraction=float(fraction))

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.k is not None:
            out["k"] = self.k
        if self.budget is not None:
            out["budget_s"] = self.budget
        if self.fraction is not None:
            out["fraction"] = self.fraction
        return out


@dataclass
class SummaryResult:
    """Selection in pick order with its gain trace and run statistics."""

    selected: list[int]
    gains: list[float]
    objective_value: float
    cost_used: float
    resort_count: int = 0
    probe_count: int = 0
    wall_time_s: float = 0.0
    lazy: bool = False
    short: bool = False

    def to_dict(self) -> dict:
        return {
            "selected": list(self.selected),
            "gains": [float(g) for g in self.gains],
            "objective_value": float(self.objective_value),
            "cost_used": float(self.cost_used),
            "resort_count": self.resort_count,
            "probe_count": self.probe_count,
            "lazy": self.lazy,
            "short": self.short,
        }


class _Run:
    """Shared bookkeeping: probe counting and optional gain verification."""

    def __init__(self, obj: SubmodularObjective, check_gains: bool):
        self.obj = obj
        self.check = check_gains
        self.probes = 0
        self.resorts = 0
        self.start = time.perf_counter()

    def gain(self, j: int) -> float:
        g = self.obj.gain(j)
        self.probes += 1
        if self.check:
            base = self.obj.evaluate(self.obj.selected)
            naive = self.obj.evaluate(self.obj.selected + (j,)) - base
            if abs(g - naive) > GAIN_REL_TOL * max(1.0, abs(naive)):
                raise AssertionError(
                    f"memoized gain {g!r} != naive {naive!r} for item {j} "
                    f"after {len(self.obj.selected)} picks ({self.obj.name})"
                )
        return g

    def result(self, selected, gains, costs, lazy=False, short=False) -> SummaryResult:
        cost = float(sum(costs[j] for j in selected)) if costs is not None else float(len(selected))
        return SummaryResult(
            selected=list(selected),
            gains=[float(g) for g in gains],
            objective_value=self.obj.current_value(),
            cost_used=cost,
            resort_count=self.resorts,
            probe_count=self.probes,
            wall_time_s=time.perf_counter() - self.start,
            lazy=lazy,
            short=short,
        )


def _check_costs(costs, n: int) -> np.ndarray:
    costs = np.asarray(costs, dtype=np.float64)
    if costs.shape != (n,):
        raise ValueError(f"costs must have shape ({n},)")
    if costs.min() <= 0:
        raise ValueError("item costs must be positive")
    return costs


def _argmax_naive(run: _Run, candidates, ratio_costs=None) -> tuple[int, float]:
    """Best candidate by (score, then smallest id); score is the memoized
    gain, optionally divided by cost."""
    best_j = -1
    best_score = -math.inf
    best_gain = 0.0
    for j in candidates:
        g = run.gain(j)
        score = g / ratio_costs[j] if ratio_costs is not None else g
        if score > best_score:
            best_j, best_score, best_gain = j, score, g
    return best_j, best_gain


def greedy_cardinality(obj: SubmodularObjective, k: int, *,
                       check_gains: bool = False) -> SummaryResult:
    """Plain greedy: k rounds of picking the best marginal gain."""
    if not 1 <= k <= obj.n:
        raise ValueError(f"k must be in [1, {obj.n}]")
    obj.reset()
    run = _Run(obj, check_gains)
    if isinstance(obj, DisparityMin):
        return _dm_select(run, k=k)
    selected: list[int] = []
    gains: list[float] = []
    remaining = list(range(obj.n))
    for _ in range(k):
        j, g = _argmax_naive(run, remaining)
        obj.commit(j)
        remaining.remove(j)
        selected.append(j)
        gains.append(g)
    return run.result(selected, gains, None)


def greedy_knapsack(obj: SubmodularObjective, budget: float, costs, *,
                    check_gains: bool = False) -> SummaryResult:
    """Gain-per-cost greedy under a budget, kept only if it beats the best
    feasible singleton (the standard guarantee-preserving comparison)."""
    costs = _check_costs(costs, obj.n)
    if budget < costs.min():
        raise ValueError("budget below the cheapest item: no feasible item")
    obj.reset()
    run = _Run(obj, check_gains)
    if isinstance(obj, DisparityMin):
        return _dm_select(run, budget=budget, costs=costs)

    first_gains = np.empty(obj.n)
    selected: list[int] = []
    gains: list[float] = []
    remaining = budget
    available = list(range(obj.n))
    first_round = True
    while True:
        feasible = [j for j in available if costs[j] <= remaining + 1e-12]
        if not feasible:
            break
        if first_round:
            for j in range(obj.n):
                first_gains[j] = run.gain(j)
            first_round = False
            j = max(feasible, key=lambda i: (first_gains[i] / costs[i], -i))
            g = float(first_gains[j])
        else:
            j, g = _argmax_naive(run, feasible, ratio_costs=costs)
        obj.commit(j)
        available.remove(j)
        selected.append(j)
        gains.append(g)
        remaining -= costs[j]
    return _knapsack_singleton_compare(run, selected, gains, costs, budget, first_gains)


def _knapsack_singleton_compare(run: _Run, selected, gains, costs, budget,
                                first_gains, lazy=False) -> SummaryResult:
    obj = run.obj
    greedy_value = obj.current_value()
    feasible = np.flatnonzero(costs <= budget + 1e-12)
    best_single = int(feasible[np.argmax(first_gains[feasible])])
    if first_gains[best_single] > greedy_value:
        obj.reset()
        obj.commit(best_single)
        return run.result([best_single], [float(first_gains[best_single])], costs, lazy=lazy)
    return run.result(selected, gains, costs, lazy=lazy)


def greedy_cover(obj: SubmodularObjective, fraction: float, *, costs=None,
                 check_gains: bool = False) -> SummaryResult:
    """Smallest greedy prefix with f(X) >= fraction * f(V) (monotone only)."""
    if not obj.monotone:
        raise IncompatibleRequestError(
            f"{obj.name} is not monotone; the cover constraint is undefined for it"
        )
    if not 0 < fraction <= 1:
        raise ValueError("cover fraction must be in (0, 1]")
    if costs is not None:
        costs = _check_costs(costs, obj.n)
    obj.reset()
    run = _Run(obj, check_gains)
    total = obj.evaluate(range(obj.n))
    threshold = fraction * total - GAIN_REL_TOL * max(1.0, abs(total))
    selected: list[int] = []
    gains: list[float] = []
    remaining = list(range(obj.n))
    while obj.current_value() < threshold and remaining:
        j, g = _argmax_naive(run, remaining)
        obj.commit(j)
        remaining.remove(j)
        selected.append(j)
        gains.append(g)
    return run.result(selected, gains, costs)


def lazy_greedy(obj: SubmodularObjective, constraint: Constraint, *, costs=None,
                check_gains: bool = False) -> SummaryResult:
    """Accelerated greedy; selection sequence identical to the naive variant.

    Disparity-min silently falls back to its dedicated (already memoized)
    sweep, since stale-bound reuse needs submodularity.
    """
    if isinstance(obj, DisparityMin):
        if constraint.kind == CARDINALITY:
            return greedy_cardinality(obj, constraint.k, check_gains=check_gains)
        if constraint.kind == KNAPSACK:
            return greedy_knapsack(obj, constraint.budget, costs, check_gains=check_gains)
        raise IncompatibleRequestError("disparity-min cannot run under a cover constraint")

    if constraint.kind == CARDINALITY:
        if not 1 <= constraint.k <= obj.n:
            raise ValueError(f"k must be in [1, {obj.n}]")
        return _lazy_select(obj, k=constraint.k, costs=None, check_gains=check_gains)
    if constraint.kind == KNAPSACK:
        costs = _check_costs(costs, obj.n)
        if constraint.budget < costs.min():
            raise ValueError("budget below the cheapest item: no feasible item")
        return _lazy_select(obj, budget=constraint.budget, costs=costs,
                            check_gains=check_gains, by_ratio=True)
    if constraint.kind == COVER:
        if not obj.monotone:
            raise IncompatibleRequestError(f"{obj.name} is not monotone")
        total = obj.evaluate(range(obj.n))
        threshold = constraint.fraction * total - GAIN_REL_TOL * max(1.0, abs(total))
        return _lazy_select(obj, threshold=threshold, costs=costs, check_gains=check_gains)
    raise ValueError(f"unknown constraint kind {constraint.kind!r}")


def _lazy_select(obj: SubmodularObjective, *, k: int | None = None,
                 budget: float | None = None, threshold: float | None = None,
                 costs: np.ndarray | None = None, check_gains: bool = False,
                 by_ratio: bool = False) -> SummaryResult:
    obj.reset()
    run = _Run(obj, check_gains)

    # Heap of (-score, item, generation); a stale entry's score is an upper
    # bound on the true score by submodularity.  generation == number of
    # commits when the entry was scored, so generation == len(selected)
    # means fresh.
    first_gains = np.empty(obj.n)
    heap = []
    for j in range(obj.n):
        g = run.gain(j)
        first_gains[j] = g
        score = g / costs[j] if by_ratio else g
        heap.append((-score, j, 0, g))
    heapq.heapify(heap)

    selected: list[int] = []
    gains: list[float] = []
    remaining = budget if budget is not None else math.inf
    while heap:
        if k is not None and len(selected) >= k:
            break
        if threshold is not None and obj.current_value() >= threshold:
            break
        neg_score, j, generation, g = heapq.heappop(heap)
        if costs is not None and costs[j] > remaining + 1e-12:
            continue  # can never become feasible again
        if generation != len(selected):
            g = run.gain(j)
            score = g / costs[j] if by_ratio else g
            entry = (-score, j, len(selected), g)
            if heap and entry > heap[0]:
                heapq.heappush(heap, entry)
                run.resorts += 1
                continue
        obj.commit(j)
        selected.append(j)
        gains.append(g)
        if costs is not None:
            remaining -= costs[j]

    if by_ratio:
        return _knapsack_singleton_compare(run, selected, gains, costs, budget,
                                           first_gains, lazy=True)
    result = run.result(selected, gains, costs, lazy=True)
    return result


def _dm_select(run: _Run, *, k: int | None = None, budget: float | None = None,
               costs: np.ndarray | None = None) -> SummaryResult:
    """Farthest-point sweep for disparity-min (cardinality or knapsack)."""
    obj: DisparityMin = run.obj  # type: ignore[assignment]
    n = obj.n
    selected: list[int] = []
    gains: list[float] = []
    remaining = budget if budget is not None else math.inf
    short = False

    scores = obj.sum_distance_scores().astype(np.float64)
    if costs is not None:
        scores = scores / costs
    order_scores = scores.copy()
    while True:
        if k is not None and len(selected) >= k:
            break
        if costs is not None:
            feasible = (costs <= remaining + 1e-12) & np.isfinite(order_scores)
            if not feasible.any():
                break
            masked = np.where(feasible, order_scores, -math.inf)
        else:
            masked = order_scores
        j = int(np.argmax(masked))
        if masked[j] == -math.inf:
            break
        g = run.gain(j)
        if selected and g == 0.0:
            short = k is not None and len(selected) < k
            break
        obj.commit(j)
        selected.append(j)
        gains.append(g)
        if costs is not None:
            remaining -= costs[j]
        # After the first pick, rank by distance to the selection.
        base = obj.dist_to_selection.copy()
        order_scores = base / costs if costs is not None else base
        order_scores[selected] = -math.inf
        if len(selected) >= n:
            break
    return run.result(selected, gains, costs, short=short)


def brute_force_opt(obj: SubmodularObjective, constraint: Constraint,
                    costs=None) -> tuple[tuple[int, ...], float]:
    """Exhaustive optimum over feasible subsets; verification oracle only."""
    n = obj.n
    if n > 20:
        raise ValueError("brute force is limited to ground sets of at most 20 items")
    if costs is not None:
        costs = _check_costs(costs, n)

    def subsets():
        if constraint.kind == CARDINALITY:
            for size in range(constraint.k + 1):
                yield from itertools.combinations(range(n), size)
        elif constraint.kind == KNAPSACK:
            for size in range(n + 1):
                for combo in itertools.combinations(range(n), size):
                    c = sum(costs[j] for j in combo) if costs is not None else len(combo)
                    if c <= constraint.budget + 1e-12:
                        yield combo
        else:
            raise ValueError("brute force supports cardinality and knapsack constraints")

    best: tuple[int, ...] = ()
    best_value = 0.0
    for combo in subsets():
        value = obj.evaluate(combo)
        if value > best_value:
            best, best_value = combo, value
    return best, best_value


def brute_force_cover(obj: SubmodularObjective, fraction: float,
                      costs=None) -> tuple[tuple[int, ...], float]:
    """Cheapest subset reaching fraction * f(V); exhaustive, n <= 20."""
    n = obj.n
    if n > 20:
        raise ValueError("brute force is limited to ground sets of at most 20 items")
    costs = _check_costs(costs, n) if costs is not None else np.ones(n)
    total = obj.evaluate(range(n))
    threshold = fraction * total - GAIN_REL_TOL * max(1.0, abs(total))
    best: tuple[int, ...] | None = None
    best_cost = math.inf
    for size in range(n + 1):
        for combo in itertools.combinations(range(n), size):
            cost = sum(costs[j] for j in combo)
            if cost < best_cost and obj.evaluate(combo) >= threshold:
                best, best_cost = combo, cost
    return (best if best is not None else tuple(range(n))), float(best_cost)
