"""Request-level orchestration: database -> ground set -> kernel ->
objective -> optimizer -> rendered summary.

Ground sets and kernels are cached per database so that interactive
re-runs (new budget, new objective, new query) skip straight to the
optimizer.  Query-filtered runs reuse the cached full kernel by slicing
the matching rows/columns.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysisdb import AnalysisDatabase, load_database
from .errors import IncompatibleRequestError, UnknownDatabaseError
from .functions import (
    DisparityMin,
    FacilityLocation,
    FeatureBased,
    ProbabilisticSetCover,
    SetCover,
    SubmodularObjective,
)
from .groundset import (
    ENTITY,
    KEYFRAME,
    SNIPPET,
    GroundSet,
    Query,
    build_entity_groundset,
    build_keyframe_groundset,
    build_snippet_groundset,
    filter_by_query,
    parse_snippet_mode,
)
from .kernels import HIST_COMPONENT, KernelRecipe, SimilarityKernel, build_kernel
from .optimize import Constraint, SummaryResult, lazy_greedy
from .synthetic import SyntheticSpec, generate_synthetic

MODES = ("keyframes", "skim", "entities")
CONCEPT_THRESHOLD = 0.5


@dataclass
class SummaryRequest:
    mode: str = "keyframes"
    function: str = "fl"
    constraint: Constraint = field(default_factory=lambda: Constraint.cardinality(5))
    query: str | None = None
    snippets: str = "fixed:2"
    entity_kind: str | None = None
    kernel: str | None = None
    knn: int | None = None
    time_window: tuple[float, float] | None = None
    lazy: bool = True
    include_timings: bool = True

    def validate(self) -> None:
        if self.mode not in MODES:
            raise IncompatibleRequestError(f"unknown mode {self.mode!r}")
        if self.mode == "entities" and not self.entity_kind:
            raise IncompatibleRequestError("entities mode requires entity_kind")
        if self.function.split(":")[0] == "dm" and self.constraint.kind == "cover":
            raise IncompatibleRequestError(
                "disparity-min is not monotone; cover constraint unsupported"
            )
        if self.mode == "skim":
            parse_snippet_mode(self.snippets)

    @classmethod
    def from_dict(cls, body: dict) -> "SummaryRequest":
        given = [key for key in ("k", "budget_s", "cover") if body.get(key) is not None]
        if len(given) != 1:
            raise IncompatibleRequestError("specify exactly one of k / budget_s / cover")
        if "k" in given:
            constraint = Constraint.cardinality(int(body["k"]))
        elif "budget_s" in given:
            constraint = Constraint.knapsack(float(body["budget_s"]))
        else:
            constraint = Constraint.cover(float(body["cover"]))
        window = body.get("time_window")
        req = cls(
            mode=body.get("mode", "keyframes"),
            function=body.get("function", "fl"),
            constraint=constraint,
            query=body.get("query"),
            snippets=body.get("snippets", "fixed:2"),
            entity_kind=body.get("entity_kind"),
            kernel=body.get("kernel"),
            knn=body.get("knn"),
            time_window=None if window is None else (float(window[0]), float(window[1])),
            lazy=bool(body.get("lazy", True)),
            include_timings=bool(body.get("include_timings", True)),
        )
        req.validate()
        return req


def merge_cut_list(items, selected) -> list[tuple[float, float]]:
    """Chronological cut list: selected items' time ranges, merged when adjacent."""
    spans = sorted(items[j].time_range for j in selected)
    merged: list[list[float]] = []
    for start, end in spans:
        if merged and start <= merged[-1][1] + 1e-9:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])
    return [(s, e) for s, e in merged]


def _concept_universe(gs: GroundSet) -> list[tuple[str, int]]:
    universe: set[tuple[str, int]] = set()
    for labels in gs.labels:
        for vocab, pairs in labels.items():
            universe.update((vocab, label) for label, _ in pairs)
    return sorted(universe)


def concept_sets(gs: GroundSet, threshold: float = CONCEPT_THRESHOLD
                 ) -> list[list[tuple[str, int]]]:
    """Per-item discrete concepts: labels at or above the threshold."""
    return [
        [(vocab, label) for vocab, pairs in labels.items()
         for label, p in pairs if p >= threshold]
        for labels in gs.labels
    ]


def concept_probabilities(gs: GroundSet) -> tuple[list[tuple[str, int]], np.ndarray]:
    """(concepts x items) probability matrix over every stored label."""
    universe = _concept_universe(gs)
    index = {c: i for i, c in enumerate(universe)}
    p = np.zeros((len(universe), gs.n))
    for j, labels in enumerate(gs.labels):
        for vocab, pairs in labels.items():
            for label, prob in pairs:
                row = index[(vocab, label)]
                p[row, j] = max(p[row, j], prob)
    return universe, p


def feature_concat(gs: GroundSet, groups: list[str] | None = None) -> np.ndarray:
    groups = groups or gs.feature_groups()
    return np.concatenate([gs.features[g] for g in groups], axis=1)


def build_objective(function: str, gs: GroundSet,
                    kernel: SimilarityKernel | None) -> SubmodularObjective:
    kind, _, arg = function.partition(":")
    if kind == "fl":
        return FacilityLocation(kernel)
    if kind == "dm":
        return DisparityMin(kernel)
    if kind == "fb":
        return FeatureBased(feature_concat(gs), psi=arg or "sqrt")
    if kind == "sc":
        return SetCover(concept_sets(gs))
    if kind == "psc":
        _, p = concept_probabilities(gs)
        return ProbabilisticSetCover(p)
    raise IncompatibleRequestError(f"unknown objective {function!r} (use fl|fb[:psi]|sc|psc|dm)")


def needs_kernel(function: str) -> bool:
    return function.split(":")[0] in ("fl", "dm")


class _LRUCache:
    """Byte-capped LRU keyed by hashable tuples; thread-safe."""

    def __init__(self, capacity_bytes: int):
        self.capacity = capacity_bytes
        self._data: OrderedDict = OrderedDict()
        self._sizes: dict = {}
        self._lock = threading.Lock()

    def get(self, key):
        with self._lock:
            if key not in self._data:
                return None
            self._data.move_to_end(key)
            return self._data[key]

    def put(self, key, value, size: int) -> None:
        with self._lock:
            self._data[key] = value
            self._sizes[key] = size
            self._data.move_to_end(key)
            used = sum(self._sizes.values())
            while used > self.capacity and len(self._data) > 1:
                old_key, _ = self._data.popitem(last=False)
                used -= self._sizes.pop(old_key)


@dataclass
class RegisteredDb:
    id: str
    db: AnalysisDatabase
    digest: str
    path: Path | None = None


class Engine:
    """Holds registered databases and their ground-set/kernel caches."""

    def __init__(self, kernel_cache_bytes: int = 1_500_000_000):
        self._dbs: dict[str, RegisteredDb] = {}
        self._groundsets: dict[tuple, GroundSet] = {}
        self._kernels = _LRUCache(kernel_cache_bytes)
        self._lock = threading.Lock()

    def register_path(self, path: str | Path, db_id: str | None = None) -> str:
        path = Path(path)
        digest = hashlib.sha256(path.read_bytes()).hexdigest()[:12]
        db_id = db_id or digest
        db = load_database(path)
        with self._lock:
            self._dbs[db_id] = RegisteredDb(id=db_id, db=db, digest=digest, path=path)
        return db_id

    def register(self, db: AnalysisDatabase, db_id: str | None = None) -> str:
        digest = hashlib.sha256(db.to_json_bytes()).hexdigest()[:12]
        db_id = db_id or digest
        with self._lock:
            self._dbs[db_id] = RegisteredDb(id=db_id, db=db, digest=digest)
        return db_id

    def ids(self) -> list[str]:
        return sorted(self._dbs)

    def get(self, db_id: str) -> RegisteredDb:
        try:
            return self._dbs[db_id]
        except KeyError:
            raise UnknownDatabaseError(db_id) from None

    def _groundset_for(self, reg: RegisteredDb, req: SummaryRequest
                       ) -> tuple[GroundSet, float, bool]:
        if req.mode == "keyframes":
            key = (reg.digest, KEYFRAME)
        elif req.mode == "skim":
            key = (reg.digest, SNIPPET, req.snippets)
        else:
            key = (reg.digest, ENTITY, req.entity_kind)
        with self._lock:
            cached = self._groundsets.get(key)
        if cached is not None:
            return cached, 0.0, True
        start = time.perf_counter()
        if req.mode == "keyframes":
            gs = build_keyframe_groundset(reg.db)
        elif req.mode == "skim":
            mode, snippet_s = parse_snippet_mode(req.snippets)
            gs = build_snippet_groundset(reg.db, mode, snippet_s)
        else:
            gs = build_entity_groundset(reg.db, req.entity_kind)
        elapsed = time.perf_counter() - start
        with self._lock:
            self._groundsets[key] = gs
        return gs, elapsed, False

    def _kernel_for(self, reg: RegisteredDb, req: SummaryRequest, gs: GroundSet
                    ) -> tuple[SimilarityKernel, float, bool]:
        key = (reg.digest, gs.kind, req.snippets if gs.kind == SNIPPET else req.entity_kind,
               req.kernel, req.knn)
        cached = self._kernels.get(key)
        if cached is not None:
            return cached, 0.0, True
        start = time.perf_counter()
        kernel = build_kernel(gs, recipe=req.kernel, knn=req.knn, entity_kind=req.entity_kind)
        elapsed = time.perf_counter() - start
        self._kernels.put(key, kernel, kernel.nbytes)
        return kernel, elapsed, False

    def summarize(self, db_id: str, req: SummaryRequest) -> dict:
        req.validate()
        reg = self.get(db_id)
        total_start = time.perf_counter()

        gs, gs_time, gs_hit = self._groundset_for(reg, req)
        base_gs = gs
        if req.query is not None:
            gs = filter_by_query(gs, reg.db, Query.parse(req.query),
                                 time_window=req.time_window)
        elif req.time_window is not None:
            gs = _window_only(gs, req.time_window)

        kernel, kernel_time, kernel_hit = None, 0.0, None
        if needs_kernel(req.function):
            kernel, kernel_time, kernel_hit = self._kernel_for(reg, req, base_gs)
            if gs is not base_gs:
                kernel = kernel.submatrix(gs.provenance)

        objective = build_objective(req.function, gs, kernel)
        if req.constraint.kind == "cardinality" and req.constraint.k > gs.n:
            raise IncompatibleRequestError(
                f"k={req.constraint.k} exceeds ground set of {gs.n} items"
            )
        opt_start = time.perf_counter()
        if req.lazy:
            result = lazy_greedy(objective, req.constraint, costs=gs.costs)
        else:
            from .optimize import greedy_cardinality, greedy_cover, greedy_knapsack

            if req.constraint.kind == "cardinality":
                result = greedy_cardinality(objective, req.constraint.k)
            elif req.constraint.kind == "knapsack":
                result = greedy_knapsack(objective, req.constraint.budget, gs.costs)
            else:
                result = greedy_cover(objective, req.constraint.fraction, costs=gs.costs)
        opt_time = time.perf_counter() - opt_start

        report = self._render(reg, req, gs, result)
        if req.include_timings:
            report["timings"] = {
                "groundset_s": round(gs_time, 6),
                "kernel_s": round(kernel_time, 6),
                "optimize_s": round(opt_time, 6),
                "total_s": round(time.perf_counter() - total_start, 6),
            }
            report["cache"] = {
                "groundset": "hit" if gs_hit else "miss",
                "kernel": ("hit" if kernel_hit else "miss") if kernel_hit is not None else "unused",
            }
        return report

    def _render(self, reg: RegisteredDb, req: SummaryRequest, gs: GroundSet,
                result: SummaryResult) -> dict:
        db = reg.db
        report = {
            "db": reg.id,
            "mode": req.mode,
            "function": req.function,
            "constraint": req.constraint.to_dict(),
            "query": req.query,
            "n_candidates": gs.n,
            **result.to_dict(),
        }
        items = gs.items
        if req.mode == "keyframes":
            frames = [items[j].source_frames[0] for j in result.selected]
            report["result"] = {
                "frames": frames,
                "timestamps": [db.frames[f].t for f in frames],
            }
        elif req.mode == "skim":
            cuts = merge_cut_list(items, result.selected)
            report["result"] = {
                "cuts": [[s, e] for s, e in cuts],
                "total_s": float(sum(e - s for s, e in cuts)),
            }
        else:
            rows = []
            for j in result.selected:
                ref = items[j].entity_ref
                ent = db.entities[ref]
                rows.append({
                    "entity": ref,
                    "kind": ent.kind,
                    "frame": ent.frame,
                    "t": db.frames[ent.frame].t,
                    "bbox": list(ent.bbox) if ent.bbox is not None else None,
                })
            report["result"] = {"entities": rows}
        return report

    def stats(self, db_id: str) -> dict:
        return database_stats(self.get(db_id).db)


def _window_only(gs: GroundSet, window: tuple[float, float]) -> GroundSet:
    t0, t1 = window
    keep = [it.id for it in gs.items if not (it.time_range[1] < t0 or it.time_range[0] > t1)]
    if not keep:
        from .errors import EmptyQueryResultError

        raise EmptyQueryResultError("time window matched no items")
    return gs.subset(keep)


def _top_label(pairs: list[tuple[int, float]]) -> int | None:
    if not pairs:
        return None
    return max(pairs, key=lambda lp: (lp[1], -lp[0]))[0]


def database_stats(db: AnalysisDatabase) -> dict:
    """Counts per vocabulary label (dominant label per frame/entity), entity
    counts per kind, and per-kind time histograms."""
    frame_labels: dict[str, dict[int, int]] = {}
    for f in db.frames:
        for vocab, pairs in f.labels.items():
            top = _top_label(pairs)
            if top is not None:
                slot = frame_labels.setdefault(vocab, {})
                slot[top] = slot.get(top, 0) + 1

    entity_counts: dict[str, int] = {}
    entity_labels: dict[str, dict[str, dict[int, int]]] = {}
    entity_times: dict[str, list[float]] = {}
    for e in db.entities:
        entity_counts[e.kind] = entity_counts.get(e.kind, 0) + 1
        for vocab, pairs in e.labels.items():
            top = _top_label(pairs)
            if top is not None:
                slot = entity_labels.setdefault(e.kind, {}).setdefault(vocab, {})
                slot[top] = slot.get(top, 0) + 1
        entity_times.setdefault(e.kind, []).append(db.frames[e.frame].t)

    bins = 12
    duration = db.duration_s
    time_hist = {
        kind: np.histogram(times, bins=bins, range=(0.0, duration))[0].tolist()
        for kind, times in entity_times.items()
    }
    return {
        "duration_s": duration,
        "fps": db.video.fps,
        "n_frames": db.n_frames,
        "n_entities": len(db.entities),
        "entity_counts": entity_counts,
        "frame_labels": {v: {str(k): c for k, c in sorted(d.items())}
                         for v, d in frame_labels.items()},
        "entity_labels": {
            kind: {v: {str(k): c for k, c in sorted(d.items())} for v, d in vocabs.items()}
            for kind, vocabs in entity_labels.items()
        },
        "entity_time_hist": time_hist,
    }


@dataclass(frozen=True)
class BenchSpec:
    n: int = 7200
    feature_dim: int = 64
    hist_bins: int = 64
    clusters: int = 12
    sizes: tuple[float, ...] = (0.01, 0.02, 0.05)
    functions: tuple[str, ...] = ("fl", "fb:sqrt", "sc", "psc", "dm")
    knn: int | None = None
    seed: int = 0


def bench(spec: BenchSpec = BenchSpec()) -> dict:
    """Wall-time table for each objective at several summary sizes on one
    synthetic ground set (keyframes at 1 fps, so n == duration in seconds)."""
    gen_start = time.perf_counter()
    clusters = max(1, min(spec.clusters, spec.feature_dim, spec.n))
    video = generate_synthetic(SyntheticSpec(
        duration_s=float(spec.n), fps=1.0, clusters=clusters,
        feature_dim=spec.feature_dim, hist_bins=spec.hist_bins, seed=spec.seed,
    ))
    gen_time = time.perf_counter() - gen_start

    gs_start = time.perf_counter()
    gs = build_keyframe_groundset(video.db)
    gs_time = time.perf_counter() - gs_start

    kernel_start = time.perf_counter()
    kernel = build_kernel(gs, knn=spec.knn)
    kernel_time = time.perf_counter() - kernel_start

    rows = []
    for function in spec.functions:
        for pct in spec.sizes:
            k = max(1, int(round(pct * gs.n)))
            objective = build_objective(function, gs, kernel if needs_kernel(function) else None)
            start = time.perf_counter()
            result = lazy_greedy(objective, Constraint.cardinality(k))
            rows.append({
                "function": function,
                "n": gs.n,
                "k": k,
                "summary_pct": pct,
                "optimize_s": round(time.perf_counter() - start, 6),
                "objective_value": result.objective_value,
                "resort_count": result.resort_count,
                "probe_count": result.probe_count,
            })
    return {
        "n": gs.n,
        "generate_s": round(gen_time, 6),
        "groundset_s": round(gs_time, 6),
        "kernel_s": round(kernel_time, 6),
        "rows": rows,
    }


def bench_csv(report: dict) -> str:
    header = "function,n,k,summary_pct,optimize_s,objective_value,resort_count,probe_count"
    lines = [header]
    for row in report["rows"]:
        lines.append(",".join(str(row[k]) for k in header.split(",")))
    return "\n".join(lines) + "\n"


def report_to_json(report: dict) -> str:
    """Canonical response serialization (sorted keys, deterministic)."""
    return json.dumps(report, sort_keys=True)
