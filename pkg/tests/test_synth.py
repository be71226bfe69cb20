import numpy as np
import pytest

from deg.io import read_hqry
from deg.synth import ALPHA_GRID, SynthSpec, generate, make_query_set, modal_assignments


class TestGeneration:
    def test_deterministic_under_seed(self):
        spec = SynthSpec(n=200, d=6, m=3, seed=42, q_count=20)
        a_ds, a_qe, a_qs = generate(spec)
        b_ds, b_qe, b_qs = generate(spec)
        assert np.array_equal(a_ds.e_vectors, b_ds.e_vectors)
        assert np.array_equal(a_ds.s_vectors, b_ds.s_vectors)
        assert np.array_equal(a_qe, b_qe)
        assert np.array_equal(a_qs, b_qs)
        assert a_ds.e_max == b_ds.e_max

    def test_different_seed_differs(self):
        a, _, _ = generate(SynthSpec(n=50, d=4, m=2, seed=0, q_count=0))
        b, _, _ = generate(SynthSpec(n=50, d=4, m=2, seed=1, q_count=0))
        assert not np.array_equal(a.e_vectors, b.e_vectors)

    def test_rho_one_forces_equal_assignments(self):
        spec = SynthSpec(n=500, clusters=8, rho=1.0, seed=3, q_count=0)
        a_e, a_s = modal_assignments(spec)
        assert np.array_equal(a_e, a_s)

    def test_rho_zero_agreement_near_uniform(self):
        c = 10
        n = 20_000
        spec = SynthSpec(n=n, d=2, m=2, clusters=c, rho=0.0, seed=4, q_count=0)
        a_e, a_s = modal_assignments(spec)
        agree = float(np.mean(a_e == a_s))
        p = 1.0 / c
        sigma = np.sqrt(p * (1 - p) / n)
        assert abs(agree - p) <= 3 * sigma

    def test_uniform_mode_shapes(self):
        ds, qe, qs = generate(SynthSpec(n=100, d=7, m=2, distribution="uniform",
                                        seed=5, q_count=13))
        assert ds.e_vectors.shape == (100, 7)
        assert ds.s_vectors.shape == (100, 2)
        assert qe.shape == (13, 7)
        assert qs.shape == (13, 2)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SynthSpec(n=0)
        with pytest.raises(ValueError):
            SynthSpec(distribution="swirl")
        with pytest.raises(ValueError):
            SynthSpec(rho=2.0)
        with pytest.raises(ValueError):
            SynthSpec(sigma=0.0)


class TestQuerySets:
    @pytest.fixture()
    def qvecs(self):
        rng = np.random.default_rng(6)
        return (rng.uniform(size=(10, 4)).astype(np.float32),
                rng.uniform(size=(10, 2)).astype(np.float32))

    def test_fixed_scheme(self, tmp_path, qvecs):
        qe, qs = qvecs
        p = tmp_path / "q.hqry"
        rows = make_query_set(p, qe, qs, "fixed:0.5", k=3)
        assert rows == 10
        _, _, alphas, k = read_hqry(p)
        assert k == 3
        assert np.all(alphas == 0.5)

    def test_interval_scheme_stays_in_range(self, tmp_path, qvecs):
        qe, qs = qvecs
        p = tmp_path / "q.hqry"
        make_query_set(p, qe, qs, "interval:0:0.2", k=5, seed=9)
        _, _, alphas, _ = read_hqry(p)
        assert np.all((alphas >= 0.0) & (alphas <= 0.2))

    def test_grid_scheme_cardinality(self, tmp_path, qvecs):
        qe, qs = qvecs
        p = tmp_path / "q.hqry"
        rows = make_query_set(p, qe, qs, "grid", k=5)
        assert rows == ALPHA_GRID.size * 10
        e, s, alphas, _ = read_hqry(p)
        assert e.shape[0] == rows
        assert np.allclose(alphas[: ALPHA_GRID.size], ALPHA_GRID, atol=1e-7)

    def test_interval_scheme_deterministic(self, tmp_path, qvecs):
        qe, qs = qvecs
        p1, p2 = tmp_path / "a.hqry", tmp_path / "b.hqry"
        make_query_set(p1, qe, qs, "interval:0.2:0.4", k=2, seed=7)
        make_query_set(p2, qe, qs, "interval:0.2:0.4", k=2, seed=7)
        assert p1.read_bytes() == p2.read_bytes()

    def test_malformed_schemes_rejected(self, tmp_path, qvecs):
        qe, qs = qvecs
        for scheme in ("grid:extra", "interval:0.5", "fixed:1.5", "wat"):
            with pytest.raises(ValueError):
                make_query_set(tmp_path / "x.hqry", qe, qs, scheme, k=1)
