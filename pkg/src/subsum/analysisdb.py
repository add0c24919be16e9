"""Analysis-database model: the engine's sole input.

A database holds per-frame features, label probabilities and color
histograms produced by an offline visual-analysis pass, plus detected
entities (objects, faces, humans, scenes) and optional shot/subtitle
boundaries.  Files are UTF-8 JSON; see ``load_database``/``save_database``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DatabaseFormatError, DatabaseValidationError

SCHEMA_VERSION = 1
ENTITY_KINDS = ("object", "face", "human", "scene")

UNIT_NORM_TOL = 1e-6
HIST_SUM_TOL = 1e-6
# Frame count may differ from floor(duration * fps) by at most this much.
FRAME_COUNT_SLACK = 1


@dataclass
class VideoMeta:
    duration_s: float
    fps: float


@dataclass
class FrameRecord:
    """One sampled frame.

    ``features`` maps a group name (``scene``, ``object``, ...) to a
    unit-normalized vector; all-zero vectors are accepted and flagged as
    degenerate (they contribute zero similarity everywhere).  ``labels``
    maps a vocabulary name to ``[(label_id, probability), ...]``.
    """

    t: float
    features: dict[str, np.ndarray]
    labels: dict[str, list[tuple[int, float]]]
    hist: np.ndarray


@dataclass
class EntityRecord:
    """A detection cropped out of one frame: object, face, human or scene."""

    kind: str
    frame: int
    features: dict[str, np.ndarray]
    labels: dict[str, list[tuple[int, float]]]
    hist: np.ndarray
    bbox: tuple[float, float, float, float] | None = None


@dataclass
class AnalysisDatabase:
    video: VideoMeta
    frames: list[FrameRecord]
    entities: list[EntityRecord] = field(default_factory=list)
    shots: list[float] | None = None
    subtitles: list[float] | None = None
    schema_version: int = SCHEMA_VERSION
    # Indices of (frame, group) pairs whose feature vector is all-zero,
    # populated by validate_database().
    degenerate: list[tuple[int, str]] = field(default_factory=list, compare=False)

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    @property
    def duration_s(self) -> float:
        return self.video.duration_s

    def feature_groups(self) -> list[str]:
        return sorted(self.frames[0].features) if self.frames else []

    def feature_matrix(self, group: str) -> np.ndarray:
        """Stack the named feature group across frames into an (n, d) array."""
        return np.stack([f.features[group] for f in self.frames])

    def hist_matrix(self) -> np.ndarray:
        return np.stack([f.hist for f in self.frames])

    def entities_of_kind(self, kind: str) -> list[int]:
        return [i for i, e in enumerate(self.entities) if e.kind == kind]

    def to_dict(self) -> dict:
        """Plain-JSON representation (the on-disk schema)."""
        out: dict = {
            "schema_version": self.schema_version,
            "video": {"duration_s": float(self.video.duration_s), "fps": float(self.video.fps)},
            "frames": [
                {
                    "t": float(f.t),
                    "features": {g: v.tolist() for g, v in f.features.items()},
                    "labels": {v: [[int(i), float(p)] for i, p in ls] for v, ls in f.labels.items()},
                    "hist": f.hist.tolist(),
                }
                for f in self.frames
            ],
            "entities": [
                {
                    "kind": e.kind,
                    "frame": int(e.frame),
                    **({"bbox": [float(v) for v in e.bbox]} if e.bbox is not None else {}),
                    "features": {g: v.tolist() for g, v in e.features.items()},
                    "labels": {v: [[int(i), float(p)] for i, p in ls] for v, ls in e.labels.items()},
                    "hist": e.hist.tolist(),
                }
                for e in self.entities
            ],
        }
        if self.shots is not None:
            out["shots"] = [float(s) for s in self.shots]
        if self.subtitles is not None:
            out["subtitles"] = [float(s) for s in self.subtitles]
        return out

    def to_json_bytes(self) -> bytes:
        """Canonical serialization: sorted keys, full float precision."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode()


def _as_vector(raw, where: str) -> np.ndarray:
    try:
        vec = np.asarray(raw, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DatabaseFormatError(f"{where}: not a numeric vector") from exc
    if vec.ndim != 1:
        raise DatabaseFormatError(f"{where}: expected a flat vector")
    return vec


def _parse_labels(raw, where: str) -> dict[str, list[tuple[int, float]]]:
    if not isinstance(raw, dict):
        raise DatabaseFormatError(f"{where}: labels must be a mapping")
    out: dict[str, list[tuple[int, float]]] = {}
    for vocab, pairs in raw.items():
        if not isinstance(pairs, list):
            raise DatabaseFormatError(f"{where}.{vocab}: expected a list of [id, p] pairs")
        parsed = []
        for k, pair in enumerate(pairs):
            try:
                label, prob = pair
                parsed.append((int(label), float(prob)))
            except (TypeError, ValueError) as exc:
                raise DatabaseFormatError(f"{where}.{vocab}[{k}]: expected [id, p]") from exc
        out[vocab] = parsed
    return out


def _parse_frame(raw: dict, idx: int) -> FrameRecord:
    where = f"frames[{idx}]"
    if not isinstance(raw, dict) or "t" not in raw:
        raise DatabaseFormatError(f"{where}: missing 't'")
    feats = raw.get("features", {})
    if not isinstance(feats, dict):
        raise DatabaseFormatError(f"{where}.features: must be a mapping")
    features = {g: _as_vector(v, f"{where}.features.{g}") for g, v in feats.items()}
    labels = _parse_labels(raw.get("labels", {}), f"{where}.labels")
    hist = _as_vector(raw.get("hist", []), f"{where}.hist")
    return FrameRecord(t=float(raw["t"]), features=features, labels=labels, hist=hist)


def _parse_entity(raw: dict, idx: int) -> EntityRecord:
    where = f"entities[{idx}]"
    if not isinstance(raw, dict) or "kind" not in raw or "frame" not in raw:
        raise DatabaseFormatError(f"{where}: missing 'kind' or 'frame'")
    feats = raw.get("features", {})
    features = {g: _as_vector(v, f"{where}.features.{g}") for g, v in feats.items()}
    labels = _parse_labels(raw.get("labels", {}), f"{where}.labels")
    hist = _as_vector(raw.get("hist", []), f"{where}.hist")
    bbox = raw.get("bbox")
    if bbox is not None:
        if not isinstance(bbox, (list, tuple)) or len(bbox) != 4:
            raise DatabaseFormatError(f"{where}.bbox: expected [x, y, w, h]")
        bbox = tuple(float(v) for v in bbox)
    return EntityRecord(
        kind=str(raw["kind"]),
        frame=int(raw["frame"]),
        features=features,
        labels=labels,
        hist=hist,
        bbox=bbox,
    )


def parse_database(obj: dict) -> AnalysisDatabase:
    """Build an AnalysisDatabase from a decoded JSON object (no validation)."""
    if not isinstance(obj, dict):
        raise DatabaseFormatError("top level: expected a JSON object")
    version = obj.get("schema_version")
    if not isinstance(version, int):
        raise DatabaseFormatError("schema_version: missing or not an integer")
    if version != SCHEMA_VERSION:
        raise DatabaseFormatError(
            f"schema_version: {version} not supported (reader understands {SCHEMA_VERSION})"
        )
    video = obj.get("video")
    if not isinstance(video, dict) or "duration_s" not in video or "fps" not in video:
        raise DatabaseFormatError("video: missing duration_s/fps")
    meta = VideoMeta(duration_s=float(video["duration_s"]), fps=float(video["fps"]))
    frames = [_parse_frame(f, i) for i, f in enumerate(obj.get("frames", []))]
    entities = [_parse_entity(e, i) for i, e in enumerate(obj.get("entities", []))]
    shots = obj.get("shots")
    subtitles = obj.get("subtitles")
    return AnalysisDatabase(
        video=meta,
        frames=frames,
        entities=entities,
        shots=None if shots is None else [float(s) for s in shots],
        subtitles=None if subtitles is None else [float(s) for s in subtitles],
        schema_version=version,
    )


def _check_vectors(features: dict[str, np.ndarray], where: str,
                   dims: dict[str, int], degenerate_sink, degenerate_key) -> None:
    for group, vec in features.items():
        if not np.all(np.isfinite(vec)):
            raise DatabaseValidationError(f"{where}.features.{group}", "non-finite value")
        if group in dims and dims[group] != vec.shape[0]:
            raise DatabaseValidationError(
                f"{where}.features.{group}",
                f"dimension {vec.shape[0]} != {dims[group]} seen earlier",
            )
        dims.setdefault(group, vec.shape[0])
        norm = float(np.linalg.norm(vec))
        if norm <= UNIT_NORM_TOL:
            degenerate_sink.append(degenerate_key(group))
        elif abs(norm - 1.0) > UNIT_NORM_TOL:
            raise DatabaseValidationError(
                f"{where}.features.{group}", f"norm {norm:.8f} not 1 (or 0 for degenerate)"
            )


def _check_labels(labels, where: str) -> None:
    for vocab, pairs in labels.items():
        for k, (label, prob) in enumerate(pairs):
            if label < 0:
                raise DatabaseValidationError(f"{where}.{vocab}[{k}]", f"negative label id {label}")
            if not 0.0 <= prob <= 1.0:
                raise DatabaseValidationError(
                    f"{where}.{vocab}[{k}]", f"probability {prob} outside [0, 1]"
                )


def _check_hist(hist: np.ndarray, where: str, expected_bins: int | None) -> int:
    if not np.all(np.isfinite(hist)):
        raise DatabaseValidationError(where, "non-finite value")
    if np.any(hist < 0):
        raise DatabaseValidationError(where, "negative histogram entry")
    total = float(hist.sum())
    if abs(total - 1.0) > HIST_SUM_TOL:
        raise DatabaseValidationError(where, f"histogram sums to {total:.8f}, expected 1")
    if expected_bins is not None and hist.shape[0] != expected_bins:
        raise DatabaseValidationError(
            where, f"{hist.shape[0]} bins != {expected_bins} seen earlier"
        )
    return hist.shape[0]


def _check_boundaries(bounds: list[float] | None, duration: float, name: str) -> None:
    if bounds is None:
        return
    prev = None
    for i, b in enumerate(bounds):
        if not 0.0 <= b <= duration:
            raise DatabaseValidationError(f"{name}[{i}]", f"{b} outside [0, {duration}]")
        if prev is not None and b <= prev:
            raise DatabaseValidationError(f"{name}[{i}]", "boundaries not strictly increasing")
        prev = b


def validate_database(db: AnalysisDatabase) -> AnalysisDatabase:
    """Check every data invariant; raises DatabaseValidationError on the first violation.

    On success the database's ``degenerate`` list is (re)populated with the
    (frame index, group) pairs holding all-zero feature vectors.
    """
    if db.video.duration_s <= 0:
        raise DatabaseValidationError("video.duration_s", "must be positive")
    if db.video.fps <= 0:
        raise DatabaseValidationError("video.fps", "must be positive")

    expected = math.floor(db.video.duration_s * db.video.fps)
    if abs(len(db.frames) - expected) > FRAME_COUNT_SLACK:
        raise DatabaseValidationError(
            "frames",
            f"{len(db.frames)} frames but duration*fps predicts {expected} (±{FRAME_COUNT_SLACK})",
        )

    db.degenerate = []
    dims: dict[str, int] = {}
    bins: int | None = None
    groups: set[str] | None = None
    prev_t = None
    for i, f in enumerate(db.frames):
        where = f"frames[{i}]"
        if not 0.0 <= f.t <= db.video.duration_s:
            raise DatabaseValidationError(f"{where}.t", f"{f.t} outside [0, duration]")
        if prev_t is not None and f.t <= prev_t:
            raise DatabaseValidationError(f"{where}.t", "timestamps not strictly increasing")
        prev_t = f.t
        if groups is None:
            groups = set(f.features)
        elif set(f.features) != groups:
            raise DatabaseValidationError(f"{where}.features", "feature groups differ across frames")
        _check_vectors(f.features, where, dims, db.degenerate, lambda g, i=i: (i, g))
        _check_labels(f.labels, f"{where}.labels")
        bins = _check_hist(f.hist, f"{where}.hist", bins)

    kind_dims: dict[str, dict[str, int]] = {}
    kind_groups: dict[str, set[str]] = {}
    for i, e in enumerate(db.entities):
        where = f"entities[{i}]"
        if e.kind not in ENTITY_KINDS:
            raise DatabaseValidationError(f"{where}.kind", f"unknown kind {e.kind!r}")
        if e.kind in kind_groups:
            if set(e.features) != kind_groups[e.kind]:
                raise DatabaseValidationError(
                    f"{where}.features", f"feature groups differ across {e.kind} entities"
                )
        else:
            kind_groups[e.kind] = set(e.features)
        if not 0 <= e.frame < len(db.frames):
            raise DatabaseValidationError(f"{where}.frame", f"frame index {e.frame} out of range")
        if e.bbox is None:
            if e.kind != "scene":
                raise DatabaseValidationError(f"{where}.bbox", f"required for kind {e.kind!r}")
        elif e.bbox[2] <= 0 or e.bbox[3] <= 0:
            raise DatabaseValidationError(f"{where}.bbox", "width and height must be positive")
        _check_vectors(
            e.features, where, kind_dims.setdefault(e.kind, {}), [], lambda g: None
        )
        _check_labels(e.labels, f"{where}.labels")
        _check_hist(e.hist, f"{where}.hist", None)

    _check_boundaries(db.shots, db.video.duration_s, "shots")
    _check_boundaries(db.subtitles, db.video.duration_s, "subtitles")
    return db


def load_database(path: str | Path) -> AnalysisDatabase:
    """Read and validate an analysis database from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DatabaseFormatError(f"{path}: {exc}") from exc
    return validate_database(parse_database(obj))


def save_database(db: AnalysisDatabase, path: str | Path) -> None:
    """Write the database as canonical JSON (sorted keys, full precision)."""
    Path(path).write_bytes(db.to_json_bytes())
