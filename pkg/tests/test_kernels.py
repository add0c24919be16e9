import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import subsum.kernels as kernels_mod
from subsum import (
    FacilityLocation,
    KernelRecipe,
    SimilarityKernel,
    SyntheticSpec,
    build_entity_groundset,
    build_kernel,
    build_keyframe_groundset,
    distance,
    generate_synthetic,
)

from oracle_impls import fl_value, pairwise_cosine_mapped, pairwise_pearson_mapped


def groundset_for(seed=0, duration=12, clusters=2, dim=4, bins=8):
    video = generate_synthetic(SyntheticSpec(
        duration_s=duration, fps=1, clusters=clusters, feature_dim=dim,
        hist_bins=bins, seed=seed))
    return build_keyframe_groundset(video.db)


class TestComponents:
    def test_identical_items_full_similarity(self):
        gs = groundset_for()
        gs.features["scene"][1] = gs.features["scene"][0]
        kernel = build_kernel(gs, recipe="scene:1")
        assert kernel.sim(0, 1) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_vectors_map_to_half(self):
        gs = groundset_for(dim=4)
        gs.features["scene"][0] = np.array([1.0, 0, 0, 0])
        gs.features["scene"][1] = np.array([0.0, 1, 0, 0])
        kernel = build_kernel(gs, recipe="scene:1")
        assert kernel.sim(0, 1) == pytest.approx(0.5, abs=1e-12)

    def test_equal_weight_recipe_matches_direct_computation(self):
        gs = groundset_for(duration=3, seed=5)
        kernel = build_kernel(gs, recipe="scene:1,object:1,hist:1")
        expected = (
            pairwise_cosine_mapped(gs.features["scene"])
            + pairwise_cosine_mapped(gs.features["object"])
            + pairwise_pearson_mapped(gs.hists)
        ) / 3.0
        assert np.allclose(kernel.dense, expected, atol=1e-12)

    def test_zero_vector_contributes_zero(self):
        gs = groundset_for()
        gs.features["scene"][2] = np.zeros(4)
        kernel = build_kernel(gs, recipe="scene:1")
        assert np.allclose(kernel.dense[2], 0.0)
        assert np.allclose(kernel.dense[:, 2], 0.0)

    def test_weighted_average_recipe(self):
        gs = groundset_for(duration=4, seed=7)
        kernel = build_kernel(gs, recipe="scene:0.7,hist:0.3")
        expected = 0.7 * pairwise_cosine_mapped(gs.features["scene"]) \
            + 0.3 * pairwise_pearson_mapped(gs.hists)
        assert np.allclose(kernel.dense, expected, atol=1e-12)


class TestInvariants:
    @pytest.mark.parametrize("seed", range(6))
    def test_symmetric_unit_range_diag_max(self, seed):
        gs = groundset_for(seed=seed, duration=15, clusters=3, dim=6)
        if seed % 2:
            gs.features["scene"][seed % gs.n] = np.zeros(6)  # degenerate row
        kernel = build_kernel(gs)
        s = kernel.dense
        assert np.array_equal(s, s.T)
        assert s.min() >= 0.0 and s.max() <= 1.0
        assert np.all(np.diag(s) >= s.max(axis=1) - 1e-12)

    def test_unknown_component_rejected(self):
        gs = groundset_for()
        with pytest.raises(ValueError, match="face"):
            build_kernel(gs, recipe="face:1")

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000), zero_row=st.booleans(),
           flat_hist=st.booleans())
    def test_random_inputs_keep_invariants(self, seed, zero_row, flat_hist):
        """Arbitrary (even degenerate) inputs: symmetry, [0,1] range and a
        diagonal that dominates its row."""
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 12))
        gs = groundset_for(seed=seed % 50, duration=n, clusters=2, dim=4)
        if zero_row:
            gs.features["scene"][int(rng.integers(n))] = 0.0
        if flat_hist:
            gs.hists[int(rng.integers(n))] = 1.0 / gs.hists.shape[1]
        s = build_kernel(gs).dense
        assert np.array_equal(s, s.T)
        assert s.min() >= 0.0 and s.max() <= 1.0
        assert np.all(np.diag(s) >= s.max(axis=1) - 1e-12)


class TestDistance:
    def test_distance_complements_similarity(self):
        gs = groundset_for()
        kernel = build_kernel(gs, recipe="scene:1")
        gs.features["scene"][1] = gs.features["scene"][0]
        kernel = build_kernel(gs, recipe="scene:1")
        assert distance(kernel, 0, 1) == pytest.approx(0.0, abs=1e-12)

    def test_quarter_similarity(self):
        kernel = SimilarityKernel.from_dense(np.array([[1.0, 0.25], [0.25, 1.0]]))
        assert distance(kernel, 0, 1) == 0.75

    def test_sparse_missing_entry_distance_one(self):
        gs = groundset_for(duration=10, clusters=2)
        kernel = build_kernel(gs, knn=2)
        dense = build_kernel(gs).dense
        row = kernel.row(0)
        missing = np.flatnonzero(row == 0.0)
        # Pick a pair genuinely dropped by sparsification.
        dropped = [j for j in missing if dense[0, j] > 0]
        assert dropped, "expected at least one dropped entry"
        assert distance(kernel, 0, dropped[0]) == 1.0

    def test_index_out_of_range(self):
        kernel = SimilarityKernel.from_dense(np.eye(3))
        with pytest.raises(IndexError):
            kernel.sim(0, 3)


class TestSparse:
    def test_retained_entries_agree_with_dense(self):
        gs = groundset_for(duration=20, clusters=3, dim=6)
        dense = build_kernel(gs)
        sparse = build_kernel(gs, knn=4)
        coo = sparse.sparse.tocoo()
        for i, j, v in zip(coo.row, coo.col, coo.data):
            assert v == dense.dense[i, j]

    def test_knn_must_be_meaningful(self):
        gs = groundset_for(duration=10)
        with pytest.raises(ValueError):
            build_kernel(gs, knn=10)
        with pytest.raises(ValueError):
            build_kernel(gs, knn=0)

    def test_fl_sparse_sanity_bound(self):
        gs = groundset_for(duration=24, clusters=3, dim=6, seed=2)
        dense = build_kernel(gs)
        sparse = build_kernel(gs, knn=3)
        mask = np.asarray((sparse.sparse != 0).todense())
        dropped = np.where(mask, 0.0, dense.dense)
        max_dropped = dropped.max()
        subset = [0, 5, 11, 17]
        dense_value = fl_value(dense.dense, subset)
        sparse_value = FacilityLocation(sparse).evaluate(subset)
        assert sparse_value <= dense_value + 1e-9
        assert sparse_value >= dense_value - gs.n * max_dropped - 1e-9

    def test_forced_knn_above_dense_limit(self, monkeypatch):
        monkeypatch.setattr(kernels_mod, "DENSE_LIMIT", 8)
        gs = groundset_for(duration=20, clusters=2, dim=4)
        kernel = build_kernel(gs)  # n=20 > patched limit
        assert kernel.is_sparse
        assert kernel.knn == 19  # auto_knn floor clamped below n

    def test_chunked_equals_direct_sparsify(self, monkeypatch):
        gs = groundset_for(duration=30, clusters=3, dim=6, seed=4)
        direct = build_kernel(gs, knn=5)
        monkeypatch.setattr(kernels_mod, "DENSE_LIMIT", 8)
        chunked = build_kernel(gs, knn=5)
        assert (direct.sparse != chunked.sparse).nnz == 0


class TestRecipe:
    def test_parse_normalizes_weights(self):
        recipe = KernelRecipe.parse("scene:2,hist:2")
        assert recipe.components == (("scene", 0.5), ("hist", 0.5))

    def test_parse_bare_names(self):
        recipe = KernelRecipe.parse("scene,object")
        assert recipe.components == (("scene", 0.5), ("object", 0.5))

    def test_rejects_empty_and_negative(self):
        with pytest.raises(ValueError):
            KernelRecipe(components=())
        with pytest.raises(ValueError):
            KernelRecipe(components=(("scene", -1.0),))

    def test_default_recipes_per_entity_kind(self):
        video = generate_synthetic(SyntheticSpec(
            duration_s=10, fps=1, faces=4, objects=4, seed=1))
        faces = build_entity_groundset(video.db, "face")
        assert KernelRecipe.default_for(faces, "face").components == (("face", 1.0),)
        objs = build_entity_groundset(video.db, "object")
        assert KernelRecipe.default_for(objs, "object").components == \
            (("object", 0.5), ("hist", 0.5))

    def test_submatrix_slices_consistently(self):
        gs = groundset_for(duration=10)
        kernel = build_kernel(gs)
        sub = kernel.submatrix([1, 3, 5])
        assert sub.n == 3
        assert sub.sim(0, 1) == kernel.sim(1, 3)
