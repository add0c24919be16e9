"""Ground sets: the universes of selectable items.

Three kinds are supported: one item per sampled frame (keyframes), one
item per time snippet (fixed length, shot-delimited or subtitle-delimited)
and one item per detected entity of a kind.  A query filters any ground
set down to the items whose content matches.

A snippet item's feature view is the renormalized mean of its member
frames' vectors; its label probabilities are the max over member frames;
its histogram is the mean of member histograms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .analysisdb import AnalysisDatabase
from .errors import EmptyGroundSetError, EmptyQueryResultError

KEYFRAME = "keyframe"
SNIPPET = "snippet"
ENTITY = "entity"

DEFAULT_QUERY_THRESHOLD = 0.5

_TERM_RE = re.compile(r"^\s*(\w+)\s*:\s*(\d+)\s*(?:>=\s*([0-9.]+)\s*)?$")


@dataclass(frozen=True)
class Item:
    id: int
    source_frames: tuple[int, ...]
    time_range: tuple[float, float]
    cost: float
    entity_ref: int | None = None


@dataclass(frozen=True)
class QueryTerm:
    vocab: str
    label: int
    min_prob: float = DEFAULT_QUERY_THRESHOLD

    def __post_init__(self):
        if not 0.0 <= self.min_prob <= 1.0:
            raise ValueError(f"query threshold {self.min_prob} outside [0, 1]")


@dataclass(frozen=True)
class Query:
    """Disjunction of clauses; each clause is a conjunction of terms."""

    clauses: tuple[tuple[QueryTerm, ...], ...]

    @classmethod
    def parse(cls, text: str) -> "Query":
        """Parse ``vocab:label[>=tau]`` terms joined by ``&`` within a clause
        and ``|`` between clauses, e.g. ``object:3>=0.6 & color:2 | scene:1``."""
        clauses = []
        for clause_text in text.split("|"):
            terms = []
            for term_text in clause_text.split("&"):
                m = _TERM_RE.match(term_text)
                if not m:
                    raise ValueError(f"cannot parse query term {term_text.strip()!r}")
                vocab, label, tau = m.groups()
                terms.append(QueryTerm(
                    vocab=vocab,
                    label=int(label),
                    min_prob=DEFAULT_QUERY_THRESHOLD if tau is None else float(tau),
                ))
            if not terms:
                raise ValueError("empty query clause")
            clauses.append(tuple(terms))
        if not clauses:
            raise ValueError("empty query")
        return cls(clauses=tuple(clauses))

    def matches(self, labels: dict[str, list[tuple[int, float]]]) -> bool:
        """True if one clause is fully satisfied by this label map."""
        for clause in self.clauses:
            ok = True
            for term in clause:
                pairs = labels.get(term.vocab, ())
                if not any(l == term.label and p >= term.min_prob for l, p in pairs):
                    ok = False
                    break
            if ok:
                return True
        return False


class GroundSet:
    """Ordered items plus their aggregated feature/label/histogram views."""

    def __init__(self, kind: str, items: list[Item], features: dict[str, np.ndarray],
                 hists: np.ndarray, labels: list[dict[str, list[tuple[int, float]]]],
                 duration_s: float, provenance: np.ndarray | None = None):
        if not items:
            raise EmptyGroundSetError(f"{kind} ground set would be empty")
        self.kind = kind
        self.items = items
        self.features = features
        self.hists = hists
        self.labels = labels
        self.duration_s = duration_s
        self.provenance = (
            np.arange(len(items)) if provenance is None else np.asarray(provenance)
        )

    @property
    def n(self) -> int:
        return len(self.items)

    def __len__(self) -> int:
        return len(self.items)

    @property
    def costs(self) -> np.ndarray:
        return np.array([it.cost for it in self.items])

    @property
    def total_cost(self) -> float:
        return float(sum(it.cost for it in self.items))

    def feature_groups(self) -> list[str]:
        return sorted(self.features)

    def subset(self, indices) -> "GroundSet":
        """New ground set holding the given items, re-indexed from 0."""
        indices = list(indices)
        items = [
            Item(id=new, source_frames=self.items[old].source_frames,
                 time_range=self.items[old].time_range, cost=self.items[old].cost,
                 entity_ref=self.items[old].entity_ref)
            for new, old in enumerate(indices)
        ]
        return GroundSet(
            kind=self.kind,
            items=items,
            features={g: m[indices] for g, m in self.features.items()},
            hists=self.hists[indices],
            labels=[self.labels[i] for i in indices],
            duration_s=self.duration_s,
            provenance=self.provenance[indices],
        )


def _label_view(per_frame: list[dict[str, list[tuple[int, float]]]]
                ) -> dict[str, list[tuple[int, float]]]:
    """Max-pool label probabilities over a set of frames."""
    pooled: dict[str, dict[int, float]] = {}
    for labels in per_frame:
        for vocab, pairs in labels.items():
            slot = pooled.setdefault(vocab, {})
            for label, p in pairs:
                if p > slot.get(label, -1.0):
                    slot[label] = p
    return {v: sorted(d.items()) for v, d in pooled.items()}


def build_keyframe_groundset(db: AnalysisDatabase) -> GroundSet:
    """One unit-cost item per sampled frame; |V| = frame count."""
    if db.n_frames == 0:
        raise EmptyGroundSetError("database has no frames")
    items = [
        Item(id=i, source_frames=(i,), time_range=(f.t, f.t), cost=1.0)
        for i, f in enumerate(db.frames)
    ]
    features = {g: db.feature_matrix(g) for g in db.feature_groups()}
    labels = [dict(f.labels) for f in db.frames]
    return GroundSet(KEYFRAME, items, features, db.hist_matrix(), labels, db.duration_s)


def _snippet_edges(db: AnalysisDatabase, mode: str, snippet_s: float | None) -> list[float]:
    duration = db.duration_s
    if mode == "fixed":
        if snippet_s is None or not 0 < snippet_s <= duration:
            raise ValueError(f"fixed snippet length must be in (0, {duration}]")
        edges = [i * snippet_s for i in range(int(np.ceil(duration / snippet_s - 1e-9)))]
        return edges + [duration]
    if mode in ("shots", "subtitles"):
        bounds = db.shots if mode == "shots" else db.subtitles
        if bounds is None:
            raise ValueError(f"database has no {mode} boundaries")
        inner = [b for b in bounds if 1e-9 < b < duration - 1e-9]
        return [0.0] + inner + [duration]
    raise ValueError(f"unknown snippet mode {mode!r}")


def build_snippet_groundset(db: AnalysisDatabase, mode: str = "fixed",
                            snippet_s: float | None = None) -> GroundSet:
    """Items are time snippets that jointly partition [0, duration].

    ``mode`` is one of ``fixed`` (requires ``snippet_s``; the last snippet
    may be shorter), ``shots`` or ``subtitles`` (boundary lists from the
    database).
    """
    if db.n_frames == 0:
        raise EmptyGroundSetError("database has no frames")
    edges = _snippet_edges(db, mode, snippet_s)
    times = np.array([f.t for f in db.frames])

    items, feat_rows, hist_rows, labels = [], {g: [] for g in db.feature_groups()}, [], []
    for idx in range(len(edges) - 1):
        start, end = edges[idx], edges[idx + 1]
        lo = int(np.searchsorted(times, start - 1e-9, side="left"))
        hi = int(np.searchsorted(times, end - 1e-9, side="left"))
        if idx == len(edges) - 2:
            hi = len(times)
        members = list(range(lo, hi))
        if not members:
            # Snippet shorter than the sampling period: borrow the nearest frame.
            members = [int(np.argmin(np.abs(times - (start + end) / 2)))]
        items.append(Item(
            id=idx, source_frames=tuple(members),
            time_range=(start, end), cost=end - start,
        ))
        for g in feat_rows:
            mean = db.feature_matrix(g)[members].mean(axis=0) if len(members) > 1 \
                else db.frames[members[0]].features[g]
            norm = np.linalg.norm(mean)
            feat_rows[g].append(mean / norm if norm > 1e-12 else np.zeros_like(mean))
        hist_rows.append(np.stack([db.frames[m].hist for m in members]).mean(axis=0))
        labels.append(_label_view([db.frames[m].labels for m in members]))

    features = {g: np.stack(rows) for g, rows in feat_rows.items()}
    return GroundSet(SNIPPET, items, features, np.stack(hist_rows), labels, db.duration_s)


def build_entity_groundset(db: AnalysisDatabase, kind: str) -> GroundSet:
    """One unit-cost item per entity of the requested kind."""
    refs = db.entities_of_kind(kind)
    if not refs:
        raise EmptyGroundSetError(f"database has no entities of kind {kind!r}")
    items, hist_rows, labels = [], [], []
    groups = sorted(db.entities[refs[0]].features)
    feat_rows: dict[str, list[np.ndarray]] = {g: [] for g in groups}
    for new, ref in enumerate(refs):
        e = db.entities[ref]
        t = db.frames[e.frame].t
        items.append(Item(
            id=new, source_frames=(e.frame,), time_range=(t, t), cost=1.0, entity_ref=ref,
        ))
        for g in groups:
            feat_rows[g].append(e.features[g])
        hist_rows.append(e.hist)
        labels.append(dict(e.labels))
    features = {g: np.stack(rows) for g, rows in feat_rows.items()}
    return GroundSet(ENTITY, items, features, np.stack(hist_rows), labels, db.duration_s)


def _item_matches(gs: GroundSet, db: AnalysisDatabase, item: Item, query: Query) -> bool:
    if gs.kind == ENTITY:
        return query.matches(gs.labels[item.id])
    # Frame-level matching: a snippet qualifies if at least one member frame
    # satisfies a full clause on its own.
    return any(query.matches(db.frames[f].labels) for f in item.source_frames)


def filter_by_query(gs: GroundSet, db: AnalysisDatabase, query: Query | str,
                    time_window: tuple[float, float] | None = None) -> GroundSet:
    """Restrict a ground set to the items matching ``query``.

    ``time_window`` optionally pre-filters items to those overlapping
    [t0, t1] before label matching.  Raises EmptyQueryResultError when no
    item survives, so callers can distinguish "no relevant content" from a
    malformed request.  Original item ids stay available through the
    returned set's ``provenance`` array.
    """
    if isinstance(query, str):
        query = Query.parse(query)
    keep = []
    for item in gs.items:
        if time_window is not None:
            t0, t1 = time_window
            s, e = item.time_range
            if e < t0 or s > t1:
                continue
        if _item_matches(gs, db, item, query):
            keep.append(item.id)
    if not keep:
        raise EmptyQueryResultError("query matched no items")
    return gs.subset(keep)


def parse_snippet_mode(text: str) -> tuple[str, float | None]:
    """Parse a CLI snippet spec: ``fixed:2``, ``shots`` or ``subtitles``."""
    if text.startswith("fixed:"):
        return "fixed", float(text.split(":", 1)[1])
    if text in ("shots", "subtitles"):
        return text, None
    raise ValueError(f"unknown snippet mode {text!r} (use fixed:<seconds>|shots|subtitles)")
