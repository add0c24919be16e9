"""Deterministic synthetic analysis databases for testing and benchmarks.

Frames are drawn from latent clusters occupying contiguous time blocks
(scene-like structure).  Cluster feature centers live on disjoint
coordinate blocks, so vectors are nonnegative (ReLU-like), unit-norm, and
cross-cluster similarity stays low.  The ground-truth cluster of every
frame and entity is returned alongside the database so tests can check
representation behavior against the construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .analysisdb import AnalysisDatabase, EntityRecord, FrameRecord, VideoMeta, validate_database

FRAME_GROUPS = ("scene", "object")
ENTITY_GROUPS = {"face": ("face",), "object": ("object",), "human": ("object",), "scene": ("scene",)}
ENTITY_VOCABS = {"face": "face", "object": "object", "human": "object", "scene": "scene"}


@dataclass(frozen=True)
class SyntheticSpec:
    duration_s: float = 60.0
    fps: float = 1.0
    clusters: int = 3
    feature_dim: int = 16
    hist_bins: int = 64
    scene_vocab: int = 16
    object_vocab: int = 16
    objects: int = 0
    faces: int = 0
    humans: int = 0
    scenes: int = 0
    noise: float = 0.1
    # Label id assigned to each cluster (scene vocabulary); defaults to the
    # cluster index itself.
    cluster_labels: tuple[int, ...] | None = None
    shot_every_s: float | None = None
    subtitle_every_s: float | None = None
    seed: int = 0

    def validate(self) -> None:
        if self.duration_s <= 0 or self.fps <= 0:
            raise ValueError("duration_s and fps must be positive")
        if self.clusters < 1:
            raise ValueError("clusters must be >= 1")
        if self.feature_dim < self.clusters:
            raise ValueError("feature_dim must be >= clusters (disjoint cluster supports)")
        if self.hist_bins < 1:
            raise ValueError("hist_bins must be >= 1")
        if min(self.scene_vocab, self.object_vocab) < self.clusters:
            raise ValueError("label vocabularies must hold one label per cluster")
        if self.cluster_labels is not None and len(self.cluster_labels) != self.clusters:
            raise ValueError("cluster_labels must list one label per cluster")
        if any(c < 0 for c in (self.objects, self.faces, self.humans, self.scenes)):
            raise ValueError("entity counts must be nonnegative")


@dataclass
class SyntheticVideo:
    """A generated database plus its ground truth."""

    db: AnalysisDatabase
    frame_clusters: np.ndarray
    entity_clusters: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))


def _cluster_centers(rng: np.random.Generator, clusters: int, dim: int) -> np.ndarray:
    """Nonnegative unit centers on disjoint coordinate blocks."""
    centers = np.zeros((clusters, dim))
    block = dim // clusters
    for c in range(clusters):
        lo = c * block
        hi = dim if c == clusters - 1 else lo + block
        v = np.abs(rng.normal(size=hi - lo)) + 0.05
        centers[c, lo:hi] = v / np.linalg.norm(v)
    return centers


def _sample_vector(rng: np.random.Generator, center: np.ndarray, noise: float) -> np.ndarray:
    v = center + noise * np.abs(rng.normal(size=center.shape[0]))
    return v / np.linalg.norm(v)


def _cluster_label(spec: SyntheticSpec, c: int) -> int:
    return spec.cluster_labels[c] if spec.cluster_labels is not None else c


def _labels_for(spec: SyntheticSpec, rng: np.random.Generator, c: int, vocab_size: int
                ) -> list[tuple[int, float]]:
    primary = _cluster_label(spec, c)
    labels = [(primary, float(rng.uniform(0.8, 0.99)))]
    # Low-confidence distractor, always below the default query threshold
    # and never colliding with a cluster's primary label.
    forbidden = {_cluster_label(spec, cc) for cc in range(spec.clusters)}
    distractor = (primary + spec.clusters) % vocab_size
    if distractor not in forbidden:
        labels.append((distractor, float(rng.uniform(0.05, 0.3))))
    return labels


def _hist_for(rng: np.random.Generator, base: np.ndarray) -> np.ndarray:
    jitter = rng.dirichlet(np.full(base.shape[0], 0.5))
    h = 0.8 * base + 0.2 * jitter
    return h / h.sum()


def _boundaries(period: float | None, duration: float) -> list[float] | None:
    if period is None:
        return None
    out = []
    t = period
    while t < duration - 1e-9:
        out.append(round(t, 6))
        t += period
    return out


def generate_synthetic(spec: SyntheticSpec) -> SyntheticVideo:
    """Generate a validated database, deterministically for a fixed seed."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    n = int(np.floor(spec.duration_s * spec.fps))
    if n < 1:
        raise ValueError("duration_s * fps must yield at least one frame")

    centers = {g: _cluster_centers(rng, spec.clusters, spec.feature_dim) for g in FRAME_GROUPS}
    centers["face"] = _cluster_centers(rng, spec.clusters, spec.feature_dim)
    hist_bases = rng.dirichlet(np.full(spec.hist_bins, 0.5), size=spec.clusters)

    frame_clusters = (np.arange(n) * spec.clusters) // n
    frames = []
    for i in range(n):
        c = int(frame_clusters[i])
        features = {g: _sample_vector(rng, centers[g][c], spec.noise) for g in FRAME_GROUPS}
        labels = {
            "scene": _labels_for(spec, rng, c, spec.scene_vocab),
            "object": _labels_for(spec, rng, c, spec.object_vocab),
        }
        frames.append(
            FrameRecord(t=i / spec.fps, features=features, labels=labels,
                        hist=_hist_for(rng, hist_bases[c]))
        )

    entities: list[EntityRecord] = []
    entity_clusters: list[int] = []
    for kind, count in (("object", spec.objects), ("face", spec.faces),
                        ("human", spec.humans), ("scene", spec.scenes)):
        vocab = ENTITY_VOCABS[kind]
        vocab_size = spec.scene_vocab if vocab == "scene" else spec.object_vocab
        for _ in range(count):
            host = int(rng.integers(0, n))
            c = int(frame_clusters[host])
            features = {
                g: _sample_vector(rng, centers[g][c], spec.noise) for g in ENTITY_GROUPS[kind]
            }
            labels = {vocab: _labels_for(spec, rng, c, vocab_size)}
            if kind == "face":
                labels["face_attr"] = [((c * 7) % 16, float(rng.uniform(0.7, 0.95)))]
            bbox = None
            if kind != "scene":
                x, y = rng.uniform(0, 200, size=2)
                w, h = rng.uniform(10, 80, size=2)
                bbox = (float(x), float(y), float(w), float(h))
            entities.append(
                EntityRecord(kind=kind, frame=host, features=features, labels=labels,
                             hist=_hist_for(rng, hist_bases[c]), bbox=bbox)
            )
            entity_clusters.append(c)

    db = AnalysisDatabase(
        video=VideoMeta(duration_s=spec.duration_s, fps=spec.fps),
        frames=frames,
        entities=entities,
        shots=_boundaries(spec.shot_every_s, spec.duration_s),
        subtitles=_boundaries(spec.subtitle_every_s, spec.duration_s),
    )
    validate_database(db)
    return SyntheticVideo(
        db=db,
        frame_clusters=frame_clusters.astype(np.int64),
        entity_clusters=np.asarray(entity_clusters, dtype=np.int64),
    )
