import json

import numpy as np
import pytest

from subsum import (
    DatabaseFormatError,
    DatabaseValidationError,
    SyntheticSpec,
    generate_synthetic,
    load_database,
    save_database,
    validate_database,
)
from subsum.analysisdb import parse_database

from conftest import minimal_db_dict


def write_db(tmp_path, obj, name="db.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


class TestLoad:
    def test_minimal_single_frame(self, tmp_path):
        db = load_database(write_db(tmp_path, minimal_db_dict(n_frames=1)))
        assert db.n_frames == 1
        assert db.entities == []
        assert db.frames[0].features["scene"].tolist() == [1.0, 0.0]

    def test_probability_above_one_names_field(self, tmp_path):
        obj = minimal_db_dict(n_frames=1)
        obj["frames"][0]["labels"]["scene"] = [[0, 1.3]]
        with pytest.raises(DatabaseValidationError) as err:
            load_database(write_db(tmp_path, obj))
        assert "frames[0].labels.scene[0]" in str(err.value)
        assert "1.3" in str(err.value)

    def test_synthetic_60s_has_60_frames(self, tmp_path):
        video = generate_synthetic(SyntheticSpec(duration_s=60, fps=1, seed=1))
        assert video.db.n_frames == 60
        path = tmp_path / "synthetic.json"
        save_database(video.db, path)
        assert load_database(path).n_frames == 60

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"schema_version": 1,,}')
        with pytest.raises(DatabaseFormatError):
            load_database(path)

    def test_unknown_schema_version(self, tmp_path):
        obj = minimal_db_dict()
        obj["schema_version"] = 2
        with pytest.raises(DatabaseFormatError, match="schema_version"):
            load_database(write_db(tmp_path, obj))

    def test_missing_video_meta(self, tmp_path):
        obj = minimal_db_dict()
        del obj["video"]
        with pytest.raises(DatabaseFormatError):
            load_database(write_db(tmp_path, obj))


class TestValidation:
    def test_non_unit_feature_rejected(self):
        obj = minimal_db_dict()
        obj["frames"][0]["features"]["scene"] = [0.5, 0.0]
        with pytest.raises(DatabaseValidationError, match="norm"):
            validate_database(parse_database(obj))

    def test_zero_vector_accepted_and_flagged(self):
        obj = minimal_db_dict(n_frames=2)
        obj["frames"][1]["features"]["scene"] = [0.0, 0.0]
        db = validate_database(parse_database(obj))
        assert (1, "scene") in db.degenerate

    def test_histogram_must_normalize(self):
        obj = minimal_db_dict()
        obj["frames"][0]["hist"] = [0.5, 0.6]
        with pytest.raises(DatabaseValidationError, match="hist"):
            validate_database(parse_database(obj))

    def test_negative_histogram_entry(self):
        obj = minimal_db_dict()
        obj["frames"][0]["hist"] = [1.2, -0.2]
        with pytest.raises(DatabaseValidationError, match="negative"):
            validate_database(parse_database(obj))

    def test_timestamps_strictly_increasing(self):
        obj = minimal_db_dict(n_frames=2)
        obj["frames"][1]["t"] = 0.0
        with pytest.raises(DatabaseValidationError, match="increasing"):
            validate_database(parse_database(obj))

    def test_frame_count_must_match_duration(self):
        obj = minimal_db_dict(n_frames=2)
        obj["video"]["duration_s"] = 10.0
        with pytest.raises(DatabaseValidationError, match="frames"):
            validate_database(parse_database(obj))

    def test_entity_frame_out_of_range(self):
        obj = minimal_db_dict()
        obj["entities"] = [{
            "kind": "face", "frame": 5, "bbox": [0, 0, 10, 10],
            "features": {"face": [1.0, 0.0]}, "labels": {"face": [[0, 0.9]]},
            "hist": [0.5, 0.5],
        }]
        with pytest.raises(DatabaseValidationError, match="entities\\[0\\].frame"):
            validate_database(parse_database(obj))

    def test_entity_bbox_positive(self):
        obj = minimal_db_dict()
        obj["entities"] = [{
            "kind": "face", "frame": 0, "bbox": [0, 0, 0, 10],
            "features": {"face": [1.0, 0.0]}, "labels": {}, "hist": [0.5, 0.5],
        }]
        with pytest.raises(DatabaseValidationError, match="bbox"):
            validate_database(parse_database(obj))

    def test_non_scene_entity_requires_bbox(self):
        obj = minimal_db_dict()
        obj["entities"] = [{
            "kind": "face", "frame": 0,
            "features": {"face": [1.0, 0.0]}, "labels": {}, "hist": [0.5, 0.5],
        }]
        with pytest.raises(DatabaseValidationError, match="bbox"):
            validate_database(parse_database(obj))

    def test_boundaries_within_duration(self):
        obj = minimal_db_dict(n_frames=4)
        obj["shots"] = [1.0, 99.0]
        with pytest.raises(DatabaseValidationError, match="shots\\[1\\]"):
            validate_database(parse_database(obj))

    def test_boundaries_strictly_increasing(self):
        obj = minimal_db_dict(n_frames=4)
        obj["shots"] = [2.0, 2.0]
        with pytest.raises(DatabaseValidationError, match="increasing"):
            validate_database(parse_database(obj))

    def test_accepts_all_generator_outputs(self):
        for seed in range(5):
            video = generate_synthetic(SyntheticSpec(
                duration_s=15, fps=2, clusters=3, feature_dim=6, hist_bins=8,
                objects=4, faces=3, humans=2, scenes=2,
                shot_every_s=4.0, subtitle_every_s=2.5, seed=seed,
            ))
            validate_database(video.db)  # must not raise


class TestRoundTrip:
    def test_save_load_identity(self, tmp_path):
        video = generate_synthetic(SyntheticSpec(
            duration_s=8, fps=1, clusters=2, feature_dim=4, hist_bins=8,
            objects=3, faces=2, shot_every_s=3.0, seed=5,
        ))
        path = tmp_path / "db.json"
        save_database(video.db, path)
        loaded = load_database(path)
        assert loaded.to_dict() == video.db.to_dict()
        # Full-precision floats survive the round trip bit-for-bit.
        assert np.array_equal(loaded.frames[0].features["scene"],
                              video.db.frames[0].features["scene"])
        path2 = tmp_path / "db2.json"
        save_database(loaded, path2)
        assert path.read_bytes() == path2.read_bytes()


class TestSynthetic:
    def test_cluster_truth_recorded(self):
        video = generate_synthetic(SyntheticSpec(
            duration_s=10, fps=1, clusters=2, feature_dim=4, seed=7,
        ))
        assert video.db.n_frames == 10
        assert video.frame_clusters.shape == (10,)
        assert set(video.frame_clusters.tolist()) == {0, 1}

    def test_deterministic_per_seed(self):
        spec = SyntheticSpec(duration_s=12, fps=1, clusters=3, feature_dim=6,
                             objects=2, faces=2, seed=42)
        a = generate_synthetic(spec).db.to_json_bytes()
        b = generate_synthetic(spec).db.to_json_bytes()
        assert a == b

    def test_different_seed_differs(self):
        base = SyntheticSpec(duration_s=12, fps=1, clusters=3, feature_dim=6, seed=1)
        other = SyntheticSpec(duration_s=12, fps=1, clusters=3, feature_dim=6, seed=2)
        assert generate_synthetic(base).db.to_json_bytes() != \
            generate_synthetic(other).db.to_json_bytes()

    def test_single_cluster_tighter_than_cross_cluster(self):
        """Within-cluster similarity dominates cross-cluster similarity:
        checked over 100 seed pairs."""

        def min_pairwise_cos(feats):
            unit = feats / np.linalg.norm(feats, axis=1, keepdims=True)
            sim = unit @ unit.T
            return (sim + np.eye(len(feats)) * 2).min()

        for seed in range(100):
            one = generate_synthetic(SyntheticSpec(
                duration_s=8, fps=1, clusters=1, feature_dim=4, seed=seed))
            two = generate_synthetic(SyntheticSpec(
                duration_s=8, fps=1, clusters=2, feature_dim=4, seed=seed))
            feats1 = np.stack([f.features["scene"] for f in one.db.frames])
            feats2 = np.stack([f.features["scene"] for f in two.db.frames])
            unit2 = feats2 / np.linalg.norm(feats2, axis=1, keepdims=True)
            sim2 = unit2 @ unit2.T
            cross = sim2[np.ix_(video_mask(two, 0), video_mask(two, 1))]
            assert min_pairwise_cos(feats1) >= cross.max(), f"seed {seed}"

    def test_invalid_spec_rejected(self):
        with pytest.raises(ValueError):
            generate_synthetic(SyntheticSpec(duration_s=-1))
        with pytest.raises(ValueError):
            generate_synthetic(SyntheticSpec(clusters=5, feature_dim=3))
        with pytest.raises(ValueError):
            generate_synthetic(SyntheticSpec(objects=-1))


def video_mask(video, cluster):
    return np.flatnonzero(video.frame_clusters == cluster)
