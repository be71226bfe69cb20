import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import deg
from deg.dataset import ExactDiameter, SampledDiameter, _max_pairwise_distance


def two_point_dataset():
    # e-vectors 4 apart, s-vectors 2 apart
    e = np.array([[0.0, 0.0], [4.0, 0.0]], dtype=np.float32)
    s = np.array([[1.0], [3.0]], dtype=np.float32)
    return deg.normalize_dataset(e, s, ExactDiameter())


class TestNormalization:
    def test_two_point_diameters(self):
        ds = two_point_dataset()
        assert ds.e_max == pytest.approx(4.0)
        assert ds.s_max == pytest.approx(2.0)

    def test_zero_s_diameter_rejected(self):
        e = np.random.default_rng(0).normal(size=(5, 3)).astype(np.float32)
        s = np.ones((5, 2), dtype=np.float32)
        with pytest.raises(ValueError, match="zero s-diameter"):
            deg.normalize_dataset(e, s)

    def test_zero_e_diameter_rejected(self):
        e = np.zeros((4, 3), dtype=np.float32)
        s = np.random.default_rng(0).normal(size=(4, 2)).astype(np.float32)
        with pytest.raises(ValueError, match="zero e-diameter"):
            deg.normalize_dataset(e, s)

    def test_mismatched_lengths_rejected(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError, match="disagree"):
            deg.normalize_dataset(rng.normal(size=(4, 3)), rng.normal(size=(5, 2)))

    def test_sampled_never_exceeds_exact_at_zero_margin(self):
        rng = np.random.default_rng(1)
        e = rng.uniform(size=(100, 8)).astype(np.float32)
        s = rng.uniform(size=(100, 8)).astype(np.float32)
        exact = deg.normalize_dataset(e, s, ExactDiameter())
        sampled = deg.normalize_dataset(e, s, SampledDiameter(pairs=5000, margin=0.0))
        assert sampled.e_max <= exact.e_max + 1e-12
        assert sampled.s_max <= exact.s_max + 1e-12
        assert sampled.norm_margin == 0.0

    def test_blockwise_diameter_matches_direct(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(37, 5)).astype(np.float32)
        direct = max(
            float(np.linalg.norm(x[i].astype(np.float64) - x[j].astype(np.float64)))
            for i in range(37) for j in range(37)
        )
        assert _max_pairwise_distance(x, block=8) == pytest.approx(direct, rel=1e-12)


class TestHybridDistance:
    def test_alpha_collapse(self):
        ds = two_point_dataset()
        q = deg.HybridQuery(ds.e_vectors[0], ds.s_vectors[0], 0.0, 1)
        pair = deg.dist_pair(ds, q, 1)
        assert deg.hybrid_dist(ds, q, 1) == pytest.approx(pair.ds)
        q1 = deg.HybridQuery(ds.e_vectors[0], ds.s_vectors[0], 1.0, 1)
        assert deg.hybrid_dist(ds, q1, 1) == pytest.approx(pair.de)

    def test_identity_is_zero(self):
        ds = two_point_dataset()
        for alpha in (0.0, 0.3, 1.0):
            q = deg.HybridQuery(ds.e_vectors[1], ds.s_vectors[1], alpha, 1)
            assert deg.hybrid_dist(ds, q, 1) == 0.0

    def test_normalized_halfway(self):
        ds = two_point_dataset()
        # raw e-dist 2 against e_max 4 -> de = 0.5
        pair = deg.dist_pair(ds, (np.array([2.0, 0.0]), np.array([1.0])), 0)
        assert pair.de == pytest.approx(0.5)

    def test_recombination_matches_hybrid_dist(self):
        rng = np.random.default_rng(3)
        ds = deg.normalize_dataset(
            rng.normal(size=(30, 6)).astype(np.float32),
            rng.normal(size=(30, 3)).astype(np.float32),
        )
        for _ in range(20):
            a, b = rng.integers(0, 30, size=2)
            alpha = float(rng.uniform())
            q = deg.HybridQuery(ds.e_vectors[a], ds.s_vectors[a], alpha, 1)
            pair = deg.dist_pair(ds, int(a), int(b))
            assert abs(pair.blend(alpha) - deg.hybrid_dist(ds, q, int(b))) <= 1e-12

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.0, 1.0), st.floats(0.0, 5.0), st.floats(0.0, 5.0))
    def test_convex_combination_bounds(self, alpha, de, ds_):
        pair = deg.DistPair(de, ds_)
        blended = pair.blend(alpha)
        assert min(de, ds_) - 1e-12 <= blended <= max(de, ds_) + 1e-12
        assert alpha * de <= blended + 1e-12
        assert (1 - alpha) * ds_ <= blended + 1e-12

    def test_linearity_in_alpha(self):
        rng = np.random.default_rng(4)
        ds = deg.normalize_dataset(
            rng.normal(size=(10, 4)).astype(np.float32),
            rng.normal(size=(10, 2)).astype(np.float32),
        )
        for _ in range(10):
            a, b = rng.integers(0, 10, size=2)
            pair = deg.dist_pair(ds, int(a), int(b))
            for alpha in np.linspace(0, 1, 5):
                expected = pair.ds + alpha * (pair.de - pair.ds)
                assert pair.blend(float(alpha)) == pytest.approx(expected, abs=1e-12)


class TestQueryValidation:
    def test_alpha_range_enforced(self):
        with pytest.raises(ValueError):
            deg.HybridQuery(np.zeros(2), np.zeros(1), 1.5, 1)

    def test_k_positive(self):
        with pytest.raises(ValueError):
            deg.HybridQuery(np.zeros(2), np.zeros(1), 0.5, 0)
