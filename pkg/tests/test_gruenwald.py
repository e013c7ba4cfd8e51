import math

import numpy as np
import pytest
from scipy.integrate import quad

from fracstable import (
    DomainError,
    SampledFunction,
    caputo_derivative,
    gamma_fn,
    grunwald_weights,
    rl_derivative_neg,
    rl_derivative_order_minus_one_at_zero,
    rl_integral,
)

from oracles import caputo_bruteforce, grunwald_weights_gamma


class TestWeights:
    def test_basics(self):
        assert grunwald_weights(1.3, 0).values.tolist() == [1.0]
        w = grunwald_weights(1.5, 2).values
        assert w == pytest.approx([1.0, -1.5, 0.375], rel=1e-15)

    def test_against_gamma_ratio_oracle(self):
        for order in (0.3, 0.9, 1.2, 1.7, 2.0):
            w = grunwald_weights(order, 60).values
            ref = grunwald_weights_gamma(order, 60)
            np.testing.assert_allclose(w, ref, rtol=1e-12, atol=1e-18)

    def test_partial_sum_example(self):
        w12 = grunwald_weights(1.2, 3).values
        w02 = grunwald_weights(0.2, 3).values
        assert w12.sum() == pytest.approx(w02[3], rel=1e-13)

    @pytest.mark.parametrize("alpha", [1.1, 1.5, 1.9])
    def test_sign_pattern(self, alpha):
        w = grunwald_weights(alpha, 10_000).values
        assert w[0] == 1.0
        assert w[1] == -alpha
        assert (w[2:] > 0.0).all()
        wm = grunwald_weights(alpha - 1.0, 10_000).values
        assert wm[0] == 1.0
        assert (wm[1:] < 0.0).all()

    @pytest.mark.parametrize("alpha", [1.1, 1.5, 1.9])
    def test_termwise_identity(self, alpha):
        # w_k(alpha) - w_k(alpha-1) = -w_{k-1}(alpha-1)
        w_a = grunwald_weights(alpha, 10_000).values
        w_b = grunwald_weights(alpha - 1.0, 10_000).values
        lhs = w_a[1:] - w_b[1:]
        rel = np.abs(lhs + w_b[:-1]) / np.abs(w_b[:-1])
        assert rel.max() <= 1e-13

    @pytest.mark.parametrize("alpha", [1.1, 1.5, 1.9])
    def test_asymptotic_constant(self, alpha):
        w = grunwald_weights(alpha, 10_000).values
        const = alpha * (alpha - 1.0) / gamma_fn(2.0 - alpha)
        assert w[10_000] * 10_000 ** (alpha + 1.0) / const == pytest.approx(1.0, abs=0.01)

    def test_zero_sum_bound(self):
        # truncated sum magnitude bounded by |w_n(alpha-1)|
        for alpha in (1.2, 1.6):
            n = 5000
            w = grunwald_weights(alpha, n).values
            wb = grunwald_weights(alpha - 1.0, n).values
            assert abs(math.fsum(w)) <= abs(wb[n]) * (1.0 + 1e-10)

    def test_order_validation(self):
        with pytest.raises(DomainError):
            grunwald_weights(0.0, 5)
        with pytest.raises(DomainError):
            grunwald_weights(2.5, 5)

    def test_scaled_flag(self):
        w = grunwald_weights(1.5, 4)
        ws = w.scaled(0.1)
        assert ws.scale == pytest.approx(0.1**-1.5)
        np.testing.assert_allclose(ws.values, w.values * 0.1**-1.5)


class TestNegativeDerivative:
    def test_zero_function(self):
        f = SampledFunction(0.1, np.zeros(11))
        out = rl_derivative_neg(f, 1.5)
        assert np.all(out.values == 0.0)
        assert out.left_endpoint == pytest.approx(0.1)

    @pytest.mark.parametrize("order", [1.3, 1.7])
    def test_power_law(self, order):
        # f(y) = (ymax - y)^2 has D_{-y}^a f = Gamma(3)/Gamma(3-a) (ymax-y)^{2-a}
        ymax, n = 1.0, 4000
        h = ymax / n
        y = h * np.arange(n + 1)
        f = SampledFunction(h, (ymax - y) ** 2)
        out = rl_derivative_neg(f, order)
        yi = out.grid
        ref = 2.0 / gamma_fn(3.0 - order) * (ymax - yi) ** (2.0 - order)
        interior = yi < 0.8 * ymax
        err = np.abs(out.values - ref)[interior].max()
        assert err <= 6.0 * h

    def test_order_two_limit(self):
        # weights of order 2 are the centered second-difference stencil
        n = 200
        h = 1.0 / n
        y = h * np.arange(n + 1)
        vals = np.sin(y)
        f = SampledFunction(h, vals)
        out = rl_derivative_neg(f, 2.0 - 1e-12)
        stencil = (vals[2:] - 2.0 * vals[1:-1] + vals[:-2]) / h**2
        np.testing.assert_allclose(out.values[: n - 1], stencil, atol=1e-6)

    def test_too_few_points(self):
        with pytest.raises(DomainError):
            rl_derivative_neg(SampledFunction(0.1, np.ones(2)), 1.5)


class TestBoundaryFunctional:
    def test_constant_residual_shrinks(self):
        # for f = c the truncated functional equals c * w_N(order-2)-type
        # partial-sum residual, vanishing as the grid grows
        order = 1.6
        vals = []
        for n in (200, 800, 3200):
            f = SampledFunction(1.0 / n, np.ones(n + 1))
            vals.append(abs(rl_derivative_order_minus_one_at_zero(f, order)))
        assert vals[1] < vals[0] and vals[2] < vals[1]

    def test_classical_limit_at_order_two(self):
        f = SampledFunction(0.01, np.array([1.0, 1.02, 1.05, 1.1]))
        got = rl_derivative_order_minus_one_at_zero(f, 2.0)
        assert got == pytest.approx((1.0 - 1.02) / 0.01, rel=1e-12)


class TestCaputo:
    def test_linear_vanishes(self):
        assert caputo_derivative(lambda y: 0.0, 1.3, 1.5) == 0.0

    @pytest.mark.parametrize("order", [1.2, 1.5, 1.8])
    def test_quadratic(self, order):
        # f = x^2: result 2 x^{2-order} / Gamma(3-order)
        for x in (0.5, 1.0, 2.5):
            ref = 2.0 * x ** (2.0 - order) / gamma_fn(3.0 - order)
            assert caputo_derivative(lambda y: 2.0, x, order) == pytest.approx(ref, abs=1e-8)

    def test_power_alpha_against_bruteforce(self):
        # f = x^1.5 checked only against the quadrature oracle
        order = 1.5
        fpp = lambda y: 0.75 * y**-0.5
        for x in (0.7, 1.9):
            ref = caputo_bruteforce(fpp, x, order)
            assert caputo_derivative(fpp, x, order) == pytest.approx(ref, abs=1e-7)

    def test_domain(self):
        with pytest.raises(DomainError):
            caputo_derivative(lambda y: 1.0, -1.0, 1.5)
        with pytest.raises(DomainError):
            caputo_derivative(lambda y: 1.0, 1.0, 2.5)


class TestFractionalIntegral:
    def test_order_one_is_plain_integral(self):
        f = lambda y: math.exp(-y * y)
        got = rl_integral(f, 0.3, 1.0, "neg")
        ref, _ = quad(f, 0.3, np.inf)
        assert got == pytest.approx(ref, abs=1e-9)
        got_pos = rl_integral(lambda y: math.exp(-abs(y)), 0.0, 1.0, "pos")
        assert got_pos == pytest.approx(1.0, abs=1e-8)

    def test_left_inverse_composition(self):
        # D^{a-1}_{-y} I^{a-1}_{-y} f = f for smooth compactly supported f,
        # with the outer derivative taken by central difference
        a = 1.6
        f = lambda y: math.exp(-((y - 2.0) ** 2) * 4.0)
        y0, eps = 1.7, 1e-4

        def inner_int(y):
            return rl_integral(f, y, a - 1.0, "neg")

        def inner_2ma(y):
            return rl_integral(inner_int, y, 2.0 - a, "neg")

        dd = -(inner_2ma(y0 + eps) - inner_2ma(y0 - eps)) / (2.0 * eps)
        assert dd == pytest.approx(f(y0), abs=5e-5)

    def test_zero_mean_bump_integral_vanishes_at_infinity(self):
        # I^a_x of a compactly supported zero-integral bump decays
        a = 1.4
        f = lambda y: (math.sin(2 * math.pi * y) if 0.0 <= y <= 1.0 else 0.0)
        vals = [abs(rl_integral(f, x, a, "pos")) for x in (5.0, 20.0, 80.0)]
        assert vals[1] < vals[0] and vals[2] < vals[1]

    def test_divergence_detected(self):
        from fracstable import NumericsError

        with pytest.raises((NumericsError, Exception)):
            rl_integral(lambda y: 1.0, 0.0, 1.5, "neg")
