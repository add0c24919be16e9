import numpy as np
import pytest

from subsum import SyntheticSpec, generate_synthetic


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def two_cluster_video():
    return generate_synthetic(SyntheticSpec(
        duration_s=20, fps=1, clusters=2, feature_dim=8, hist_bins=16, seed=3,
    ))


@pytest.fixture(scope="session")
def three_cluster_video():
    return generate_synthetic(SyntheticSpec(
        duration_s=30, fps=1, clusters=3, feature_dim=9, hist_bins=16, seed=11,
    ))


def minimal_db_dict(n_frames=1, dim=2, duration=None, fps=1.0):
    """Hand-written database JSON object with unit x-axis features."""
    duration = float(n_frames) / fps if duration is None else duration
    vec = [1.0] + [0.0] * (dim - 1)
    return {
        "schema_version": 1,
        "video": {"duration_s": duration, "fps": fps},
        "frames": [
            {
                "t": i / fps,
                "features": {"scene": list(vec), "object": list(vec)},
                "labels": {"scene": [[0, 0.9]], "object": [[1, 0.7]]},
                "hist": [0.5, 0.5],
            }
            for i in range(n_frames)
        ],
        "entities": [],
    }
