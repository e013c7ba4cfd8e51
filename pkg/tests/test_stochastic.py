import math

import numpy as np
import pytest
import scipy.stats as st

from fracstable import (
    DomainError,
    RngStream,
    StableParams,
    inverse_subordinator_density,
    ks_two_sample,
    reflected_density_from_zero,
    reflected_terminal_ensemble,
    reflection_identity_check,
    sample_spectrally_negative_increment,
    sample_subordinator_increment,
    simulate_inverse_subordinator,
    simulate_path,
    simulate_reflected_path,
    spectrally_negative_density_pos,
    stable_subordinator_density,
)

from oracles import ecdf_ks_statistic

N_MED = 100_000


def _gen(seed, stream=0):
    return RngStream(seed, stream).generator()


class TestSubordinatorSampler:
    def test_beta_half_law(self):
        # D_1 with Laplace transform e^{-sqrt(s)} is 1/(2 G^2), G standard normal
        gen = _gen(1)
        x = sample_subordinator_increment(0.5, 1.0, gen, size=N_MED)
        g = gen.standard_normal(N_MED)
        ref = 1.0 / (2.0 * g * g)
        assert ks_two_sample(x, ref).p_value > 0.01

    def test_scaling(self):
        # D_dt equals dt**(1/beta) * D_1 in law
        beta, dt = 0.7, 0.37
        a = sample_subordinator_increment(beta, dt, _gen(2), size=N_MED)
        b = dt ** (1.0 / beta) * sample_subordinator_increment(beta, 1.0, _gen(3), size=N_MED)
        assert ks_two_sample(a, b).p_value > 0.01

    @pytest.mark.parametrize("beta", [0.55, 0.8])
    def test_histogram_matches_density(self, beta):
        x = sample_subordinator_increment(beta, 1.0, _gen(4), size=1_000_000)
        edges = np.linspace(0.2, 6.0, 30)
        counts, _ = np.histogram(x, edges)
        n = x.size
        for i in range(len(edges) - 1):
            lo, hi = edges[i], edges[i + 1]
            mid = 0.5 * (lo + hi)
            # 3-point Simpson for the bin mass
            p = (hi - lo) * (
                stable_subordinator_density(lo, beta)
                + 4.0 * stable_subordinator_density(mid, beta)
                + stable_subordinator_density(hi, beta)
            ) / 6.0
            sd = math.sqrt(n * p * (1.0 - p))
            assert abs(counts[i] - n * p) <= 4.0 * sd + 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            sample_subordinator_increment(0.5, 0.0, _gen(5))


class TestSpectrallyNegativeSampler:
    def test_gaussian_variance(self):
        y = sample_spectrally_negative_increment(StableParams(2.0), 1.0, _gen(6), size=1_000_000)
        assert y.var() == pytest.approx(2.0, abs=0.01)
        assert st.kstest((y / math.sqrt(2.0)), "norm").pvalue > 0.01

    @pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8])
    def test_positivity_probability(self, alpha):
        n = 1_000_000
        y = sample_spectrally_negative_increment(StableParams(alpha), 1.0, _gen(7), size=n)
        p = (y >= 0).mean()
        band = 3.0 * math.sqrt((1 / alpha) * (1 - 1 / alpha) / n)
        assert abs(p - 1.0 / alpha) <= band

    def test_density_on_positive_axis(self):
        params = StableParams(1.5)
        y = sample_spectrally_negative_increment(params, 1.0, _gen(8), size=1_000_000)
        edges = np.linspace(0.1, 2.5, 25)
        counts, _ = np.histogram(y, edges)
        n = y.size
        for i in range(len(edges) - 1):
            lo, hi = edges[i], edges[i + 1]
            mid = 0.5 * (lo + hi)
            p = (hi - lo) * (
                spectrally_negative_density_pos(lo, 1.0, params)
                + 4.0 * spectrally_negative_density_pos(mid, 1.0, params)
                + spectrally_negative_density_pos(hi, 1.0, params)
            ) / 6.0
            sd = math.sqrt(n * p * (1.0 - p))
            assert abs(counts[i] - n * p) <= 4.0 * sd + 1.0

    def test_left_tail_heavy(self):
        # P(Y_1 < -x) ~ (alpha-1)/Gamma(2-alpha) x^-alpha (no positive jumps)
        alpha = 1.5
        n = 2_000_000
        y = sample_spectrally_negative_increment(StableParams(alpha), 1.0, _gen(9), size=n)
        x = 20.0
        p_emp = (y < -x).mean()
        p_th = (alpha - 1.0) / math.gamma(2.0 - alpha) * x**-alpha
        assert p_emp == pytest.approx(p_th, rel=0.15)


class TestPaths:
    def test_reflected_path_invariants(self):
        for seed in (1, 2, 3):
            p = simulate_reflected_path(StableParams(1.5), 1.0, 500, RngStream(seed))
            assert p.values[0] == 0.0
            assert p.values.min() == 0.0
            assert p.process == "Z"

    def test_alpha2_terminal_half_normal(self):
        z = reflected_terminal_ensemble(StableParams(2.0), 1.0, 8000, N_MED, RngStream(10, 1))
        ref = np.abs(math.sqrt(2.0) * _gen(11).standard_normal(N_MED))
        # grid extremum bias is ~0.58 sigma sqrt(dt); keep n modest so the
        # comparison tests the law, not the grid artifact
        assert ks_two_sample(z[:20_000], ref[:20_000]).p_value > 0.01

    def test_marginal_equality_with_analytic_law(self):
        # terminal Z against the analytic reflected density via binwise counts
        params = StableParams(1.5)
        z = reflected_terminal_ensemble(params, 1.0, 4000, N_MED, RngStream(12, 1))
        edges = np.linspace(0.1, 3.0, 15)
        counts, _ = np.histogram(z, edges)
        for i in range(len(edges) - 1):
            lo, hi = edges[i], edges[i + 1]
            mid = 0.5 * (lo + hi)
            p = (hi - lo) * (
                reflected_density_from_zero(lo, 1.0, params)
                + 4.0 * reflected_density_from_zero(mid, 1.0, params)
                + reflected_density_from_zero(hi, 1.0, params)
            ) / 6.0
            sd = math.sqrt(N_MED * p * (1.0 - p))
            assert abs(counts[i] - N_MED * p) <= 4.0 * sd + 2.0

    def test_grid_refinement_shrinks_ks(self):
        # KS against exact inverse-subordinator samples falls as steps grow
        e = simulate_inverse_subordinator(0.5, 1.0, RngStream(13, 9), method="hitting", size=N_MED)
        stats = []
        for steps in (500, 4000, 32000):
            z = reflected_terminal_ensemble(
                StableParams(2.0), 1.0, steps, N_MED, RngStream(13, steps)
            )
            stats.append(ks_two_sample(z, e).statistic)
        assert stats[1] < stats[0] and stats[2] < stats[1]

    def test_determinism(self):
        a = reflected_terminal_ensemble(StableParams(1.7), 1.0, 100, 10_000, RngStream(14, 5))
        b = reflected_terminal_ensemble(StableParams(1.7), 1.0, 100, 10_000, RngStream(14, 5))
        assert np.array_equal(a, b)
        c = reflected_terminal_ensemble(StableParams(1.7), 1.0, 100, 10_000, RngStream(14, 6))
        assert not np.array_equal(a, c)

    def test_process_tags(self):
        d = simulate_path(StableParams.from_beta(0.6), "D", 1.0, 200, RngStream(15))
        assert (np.diff(d.values) >= 0.0).all() and d.values[0] == 0.0
        s = simulate_path(StableParams(1.5), "S", 1.0, 200, RngStream(16))
        assert (np.diff(s.values) >= 0.0).all()
        e = simulate_path(0.4, "E", 1.0, 200, RngStream(17))
        assert (np.diff(e.values) >= 0.0).all() and e.params is None

    def test_csv_roundtrip(self, tmp_path):
        p = simulate_reflected_path(StableParams(1.5), 1.0, 50, RngStream(18))
        out = tmp_path / "path.csv"
        p.to_csv(out)
        lines = out.read_text().splitlines()
        assert lines[0] == "t,value"
        assert len(lines) == 52
        t0, v0 = lines[1].split(",")
        assert float(t0) == 0.0 and float(v0) == 0.0


class TestInverseSubordinator:
    def test_methods_agree(self):
        # beta away from 1/2 keeps the supremum grid bias below KS resolution
        beta = 0.75
        e1 = simulate_inverse_subordinator(beta, 1.0, RngStream(19, 1), method="hitting", size=N_MED)
        e2 = simulate_inverse_subordinator(
            beta, 1.0, RngStream(19, 2), method="supremum", size=N_MED, sup_steps=8192
        )
        assert ks_two_sample(e1, e2).p_value > 0.01

    def test_self_similarity(self):
        beta, t = 0.6, 2.3
        a = simulate_inverse_subordinator(beta, t, RngStream(20, 1), method="hitting", size=N_MED)
        b = t**beta * simulate_inverse_subordinator(
            beta, 1.0, RngStream(20, 2), method="hitting", size=N_MED
        )
        assert ks_two_sample(a, b).p_value > 0.01

    def test_histogram_matches_density(self):
        beta = 0.6
        e = simulate_inverse_subordinator(beta, 1.0, RngStream(21, 1), method="hitting", size=1_000_000)
        edges = np.linspace(0.05, 2.5, 25)
        counts, _ = np.histogram(e, edges)
        n = e.size
        for i in range(len(edges) - 1):
            lo, hi = edges[i], edges[i + 1]
            mid = 0.5 * (lo + hi)
            p = (hi - lo) * (
                inverse_subordinator_density(lo, 1.0, beta)
                + 4.0 * inverse_subordinator_density(mid, 1.0, beta)
                + inverse_subordinator_density(hi, 1.0, beta)
            ) / 6.0
            sd = math.sqrt(n * p * (1.0 - p))
            assert abs(counts[i] - n * p) <= 4.0 * sd + 1.0

    def test_mean_moment(self):
        beta, t = 0.8, 1.7
        e = simulate_inverse_subordinator(beta, t, RngStream(22, 1), method="hitting", size=N_MED)
        ref = t**beta / math.gamma(1.0 + beta)
        assert e.mean() == pytest.approx(ref, abs=5.0 * e.std() / math.sqrt(e.size))


class TestReflectionIdentity:
    def test_alpha2_factor_two(self):
        params = StableParams(2.0)
        chk = reflection_identity_check(params, 1.0, 1.0, 200_000, RngStream(23, 1))
        # P(S_t >= x) = 2 P(Y_t >= x) for Brownian motion
        y = sample_spectrally_negative_increment(params, 1.0, _gen(24), size=200_000)
        p_tail = (y >= 1.0).mean()
        assert chk.lhs / p_tail == pytest.approx(2.0, abs=0.05)

    def test_x_to_zero(self):
        chk = reflection_identity_check(StableParams(1.5), 1.0, 1e-9, 20_000, RngStream(25, 1))
        assert chk.lhs == pytest.approx(1.0, abs=1e-3)
        assert chk.rhs == pytest.approx(1.0, abs=1e-3)

    def test_identity_alpha15(self):
        chk = reflection_identity_check(StableParams(1.5), 1.0, 1.0, 1_000_000, RngStream(26, 1))
        assert abs(chk.lhs - chk.rhs) <= 3.0 * chk.combined_stderr

    def test_needs_enough_paths(self):
        with pytest.raises(DomainError):
            reflection_identity_check(StableParams(1.5), 1.0, 1.0, 100, RngStream(27))


class TestKsTwoSample:
    def test_identical_samples(self):
        a = np.linspace(0.0, 1.0, 100)
        res = ks_two_sample(a, a.copy())
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_shifted_uniforms_reject(self):
        gen = _gen(28)
        a = gen.random(10_000)
        b = gen.random(10_000) + 0.5
        res = ks_two_sample(a, b)
        assert res.p_value < 1e-6

    def test_statistic_matches_bruteforce(self):
        gen = _gen(29)
        a = gen.random(300)
        b = gen.random(200) * 1.2
        assert ks_two_sample(a, b).statistic == pytest.approx(ecdf_ks_statistic(a, b), abs=1e-12)

    def test_matches_scipy(self):
        gen = _gen(30)
        a = gen.standard_normal(5000)
        b = gen.standard_normal(4000) * 1.05
        ours = ks_two_sample(a, b)
        ref = st.ks_2samp(a, b, method="asymp")
        assert ours.statistic == pytest.approx(ref.statistic, abs=1e-12)
        assert ours.p_value == pytest.approx(ref.pvalue, abs=0.02)

    def test_calibration(self):
        gen = _gen(31)
        rejections = 0
        reps = 1000
        for _ in range(reps):
            a = gen.random(2000)
            b = gen.random(2000)
            if ks_two_sample(a, b).p_value < 0.05:
                rejections += 1
        assert abs(rejections / reps - 0.05) <= 0.02

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            ks_two_sample([], [1.0])
