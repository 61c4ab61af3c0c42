import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from senslab import (
    GaussianModel,
    RngStream,
    binomial_point_mass,
    binomial_tail,
    chernoff_tail_bound,
    chi2_gaussian_products,
    chi2_localshift_bound,
    chi2_localshift_mc,
    chi2_products_mc,
    cramer_rao_check,
    efron_stein_check,
    gaussian_lr_identity_check,
    hcr_check,
    hypergeom_mgf_check,
    mean_estimator,
    median_estimator,
    tv_gaussian_shift,
    uniform_spacing_check,
)
from senslab.analysis import _log_esp_k
from senslab.estimators import Estimator


def tv_quadrature_oracle(eta: float) -> float:
    """Numerical integration of 0.5 * |phi(x) - phi(x - eta)| dx."""
    def integrand(x):
        phi0 = math.exp(-0.5 * x * x)
        phi1 = math.exp(-0.5 * (x - eta) ** 2)
        return abs(phi0 - phi1) / math.sqrt(2 * math.pi)
    val, _ = integrate.quad(integrand, -12, 12, limit=200)
    return 0.5 * val


def constant_estimator(value: float) -> Estimator:
    return Estimator(
        name="const", output_dim=1,
        fn=lambda x: np.array([value]),
        stack_fn=lambda stack: np.full((stack.shape[0], 1), value),
    )


class TestTvGaussianShift:
    def test_zero(self):
        assert tv_gaussian_shift(0.0) == 0.0

    @pytest.mark.parametrize("eta", [0.1, 0.5, 2.0])
    def test_matches_quadrature_oracle(self, eta):
        assert tv_gaussian_shift(eta) == pytest.approx(tv_quadrature_oracle(eta), abs=1e-6)

    def test_frozen_value_at_point_one(self):
        assert tv_gaussian_shift(0.1) == pytest.approx(0.039878, abs=1e-6)

    def test_strictly_below_eta_and_increasing(self):
        grid = np.linspace(1e-4, 6.0, 200)
        vals = [tv_gaussian_shift(float(e)) for e in grid]
        assert all(v < e for v, e in zip(vals, grid))
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert tv_gaussian_shift(60.0) > 1 - 1e-12

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            tv_gaussian_shift(-0.1)


class TestChi2GaussianProducts:
    def test_zero_delta(self):
        assert chi2_gaussian_products(0.0, 100) == 0.0

    def test_unit_exponent_is_e_minus_one(self):
        for n in (25, 100):
            assert chi2_gaussian_products(1 / math.sqrt(n), n) == pytest.approx(
                math.e - 1, abs=1e-12)

    def test_overflow_reported(self):
        with pytest.raises(OverflowError):
            chi2_gaussian_products(2.0, 200)

    def test_monte_carlo_oracle(self):
        closed = chi2_gaussian_products(0.2, 25)  # n delta^2 = 1
        mc, se = chi2_products_mc(0.2, 25, 200_000, RngStream(20, 0))
        assert abs(mc - closed) < 4 * se


class TestChi2LocalShift:
    def test_zero_delta(self):
        assert chi2_localshift_bound(10, 100, 0.0) == 0.0

    def test_frozen_value(self):
        # (k^2/n)(e - 2) exponent at k=10, n=100, delta=1
        assert chi2_localshift_bound(10, 100, 1.0) == pytest.approx(
            math.expm1(math.e - 2), abs=1e-12)
        assert chi2_localshift_bound(10, 100, 1.0) == pytest.approx(1.0509064, abs=1e-6)

    def test_monotone_in_k_and_delta(self):
        ks = [chi2_localshift_bound(k, 100, 0.7) for k in range(1, 101, 7)]
        assert all(a <= b for a, b in zip(ks, ks[1:]))
        ds = [chi2_localshift_bound(10, 100, d) for d in np.linspace(0, 2, 15)]
        assert all(a <= b for a, b in zip(ds, ds[1:]))

    def test_overflow_reported(self):
        with pytest.raises(OverflowError):
            chi2_localshift_bound(1000, 1000, 3.0)

    def test_log_esp_matches_brute_force(self):
        # oracle: sum of products over all k-subsets
        gen = np.random.default_rng(21)
        w = gen.uniform(0.5, 2.0, size=(4, 6))
        for k in (1, 2, 3):
            got = np.exp(_log_esp_k(w, k))
            from itertools import combinations
            want = np.array([
                sum(np.prod(row[list(c)]) for c in combinations(range(6), k))
                for row in w
            ])
            assert np.allclose(got, want, rtol=1e-12)

    @pytest.mark.parametrize("k,n,delta", [(3, 50, 0.5), (5, 100, 0.8)])
    def test_mixture_chi2_below_bound(self, k, n, delta):
        bound = chi2_localshift_bound(k, n, delta)
        mc, se = chi2_localshift_mc(k, n, delta, 30_000, RngStream(22, k))
        assert mc <= bound + 4 * se


class TestGaussianLrIdentity:
    def test_orthogonal_directions_give_one(self):
        r = gaussian_lr_identity_check([1.0, 0.0], [0.0, 1.0], 50_000, RngStream(23, 0))
        assert r.rhs == 1.0
        assert r.holds

    def test_aligned_gives_e(self):
        r = gaussian_lr_identity_check([1.0], [1.0], 100_000, RngStream(23, 1))
        assert r.rhs == pytest.approx(math.e, abs=1e-12)
        assert r.holds

    def test_opposite_gives_inverse_e(self):
        r = gaussian_lr_identity_check([1.0], [-1.0], 50_000, RngStream(23, 2))
        assert r.rhs == pytest.approx(1 / math.e, abs=1e-12)
        assert r.holds

    def test_requires_enough_trials(self):
        with pytest.raises(ValueError):
            gaussian_lr_identity_check([1.0], [1.0], 100, RngStream(0, 0))


class TestHypergeomMgf:
    def test_lambda_zero_is_degenerate_one(self):
        r = hypergeom_mgf_check(100, 10, 0.0, 1000, RngStream(24, 0))
        assert r.lhs == 1.0 and r.rhs == 1.0 and r.holds

    def test_main_grid_point(self):
        r = hypergeom_mgf_check(100, 10, 1.0, 100_000, RngStream(24, 1))
        assert r.rhs == pytest.approx(math.exp(math.e - 2), abs=1e-12)
        assert r.lhs <= r.rhs + 4 * r.mc_stderr
        assert r.holds

    def test_full_subsets_are_degenerate(self):
        r = hypergeom_mgf_check(10, 10, 1.0, 1000, RngStream(24, 2))
        assert r.lhs == 1.0
        assert r.holds

    def test_mc_matches_exact_overlap_mgf(self):
        # oracle: exact E exp(lam (H - k^2/n)) from the hypergeometric pmf
        n, k, lam = 12, 4, 0.8
        exact = 0.0
        for h in range(0, k + 1):
            pmf = Fraction(math.comb(k, h) * math.comb(n - k, k - h), math.comb(n, k))
            exact += float(pmf) * math.exp(lam * (h - k * k / n))
        r = hypergeom_mgf_check(n, k, lam, 200_000, RngStream(24, 3))
        assert abs(r.lhs - exact) < 4 * r.mc_stderr


class TestChernoff:
    def test_vacuous_when_t_below_mean(self):
        assert chernoff_tail_bound(100, 0.5, 10) == 1.0

    def test_frozen_value(self):
        assert chernoff_tail_bound(100, 0.01, 10) == pytest.approx(
            (math.e / 10) ** 10, rel=1e-12)
        assert chernoff_tail_bound(100, 0.01, 10) == pytest.approx(2.2026466e-06, rel=1e-6)

    def test_exact_tail_below_bound(self):
        # oracle: exact rational binomial tail
        n, t = 100, 10
        p = Fraction(1, 100)
        tail = sum(
            Fraction(math.comb(n, j)) * p ** j * (1 - p) ** (n - j)
            for j in range(t, n + 1)
        )
        assert float(tail) <= chernoff_tail_bound(n, 0.01, t)
        assert binomial_tail(n, 0.01, t) == pytest.approx(float(tail), rel=1e-10)

    def test_sharp_form_is_sharper(self):
        simple = chernoff_tail_bound(2000, 0.039878, 200)
        sharp = chernoff_tail_bound(2000, 0.039878, 200, sharp=True)
        assert sharp < simple
        # sharp exponent: (t - lam) - t log(t / lam) ~ -63.6
        lam = 2000 * 0.039878
        assert math.log(sharp) == pytest.approx((200 - lam) - 200 * math.log(200 / lam), rel=1e-12)
        assert binomial_tail(2000, 0.039878, 200) <= sharp


class TestBinomialPointMass:
    def test_edges_use_zero_power_zero_convention(self):
        assert binomial_point_mass(7, 0) == 1.0
        assert binomial_point_mass(7, 7) == 1.0

    def test_small_exact_values(self):
        assert binomial_point_mass(4, 2) == pytest.approx(0.375, abs=1e-12)
        oracle = Fraction(math.comb(9, 3)) * Fraction(3, 9) ** 3 * Fraction(6, 9) ** 6
        assert oracle == Fraction(5376, 19683)
        assert binomial_point_mass(9, 3) == pytest.approx(float(oracle), abs=1e-12)

    def test_floor_constant_over_desk_grid(self):
        # exhaustive confirmation of the measured floor before freezing it
        worst = min(
            binomial_point_mass(n, r) * math.sqrt(r + 1)
            for n in range(1, 201)
            for r in range(n + 1)
        )
        assert worst >= 0.24

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            binomial_point_mass(5, 6)


class TestEfronStein:
    def test_linear_statistic_saturates(self):
        r = efron_stein_check(mean_estimator(1), GaussianModel(np.zeros(1)), 25,
                              20_000, RngStream(25, 0))
        # analytic: Var = 1/25 and half-sum of squared gaps = 1/25
        assert r.lhs == pytest.approx(0.04, abs=0.003)
        assert r.rhs == pytest.approx(0.04, abs=0.003)
        assert r.holds

    def test_median_obeys_inequality(self):
        r = efron_stein_check(median_estimator(1), GaussianModel(np.zeros(1)), 101,
                              5_000, RngStream(25, 1))
        assert r.holds
        assert r.lhs > 0

    def test_constant_gives_zeros(self):
        r = efron_stein_check(constant_estimator(0.7), GaussianModel(np.zeros(1)), 10,
                              2_000, RngStream(25, 2))
        assert abs(r.lhs) < 1e-15 and abs(r.rhs) < 1e-15 and r.holds

    def test_requires_enough_trials(self):
        with pytest.raises(ValueError):
            efron_stein_check(mean_estimator(1), GaussianModel(np.zeros(1)), 5,
                              10, RngStream(0, 0))


class TestHcr:
    def test_mean_case_matches_analytic_values(self):
        n = 25
        r = hcr_check(mean_estimator(1), 0.0, 1 / math.sqrt(n), n, 50_000, RngStream(26, 0))
        assert r.lhs == pytest.approx(0.04 / (math.e - 1), abs=0.001)
        assert r.rhs == pytest.approx(0.04, abs=0.002)
        assert r.holds

    def test_constant_statistic(self):
        r = hcr_check(constant_estimator(0.3), 0.0, 0.2, 25, 2_000, RngStream(26, 1))
        assert abs(r.lhs) < 1e-15 and abs(r.rhs) < 1e-15 and r.holds

    def test_median_case(self):
        n = 101
        r = hcr_check(median_estimator(1), 0.0, 1 / math.sqrt(n), n, 5_000, RngStream(26, 2))
        assert r.holds

    def test_rejects_zero_h(self):
        with pytest.raises(ValueError):
            hcr_check(mean_estimator(1), 0.0, 0.0, 25, 2_000, RngStream(0, 0))


class TestCramerRao:
    def test_mean_is_efficient(self):
        r = cramer_rao_check(mean_estimator(1), 0.0, 25, 50_000, RngStream(27, 0))
        assert r.lhs == pytest.approx(0.04, abs=0.003)
        assert r.rhs == pytest.approx(0.04, abs=0.003)
        assert r.holds

    def test_scaled_mean(self):
        scaled = Estimator(
            "2x-mean", 1,
            fn=lambda x: 2.0 * x.samples.mean(axis=0),
            stack_fn=lambda s: 2.0 * s.mean(axis=1),
        )
        r = cramer_rao_check(scaled, 0.0, 25, 50_000, RngStream(27, 1))
        assert r.lhs == pytest.approx(0.16, abs=0.01)
        assert r.rhs == pytest.approx(0.16, abs=0.01)
        assert r.holds

    def test_constant_statistic(self):
        r = cramer_rao_check(constant_estimator(1.0), 0.0, 25, 2_000, RngStream(27, 2))
        assert abs(r.lhs) < 1e-15 and r.holds


class TestUniformSpacing:
    def test_single_point_spacing(self):
        r = uniform_spacing_check(1, 1, 50_000, RngStream(28, 0))
        assert r.holds

    def test_beta_moments_n9(self):
        r = uniform_spacing_check(9, 5, 100_000, RngStream(28, 1))
        assert r.holds

    def test_spacings_telescope_to_one(self):
        gen = RngStream(28, 2).generator()
        u = np.sort(gen.random((100, 9)), axis=1)
        padded = np.concatenate([np.zeros((100, 1)), u, np.ones((100, 1))], axis=1)
        sums = np.diff(padded, axis=1).sum(axis=1)
        assert np.all(np.abs(sums - 1.0) < 1e-12)

    def test_rejects_bad_index(self):
        with pytest.raises(ValueError):
            uniform_spacing_check(5, 7, 1_000, RngStream(0, 0))
