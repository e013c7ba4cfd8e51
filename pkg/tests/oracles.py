"""Independent oracles used only by the test suite.

These deliberately avoid the code paths they check: the subordinator density
oracle inverts the Laplace transform exp(-s**beta) on a Talbot contour in
arbitrary precision, the weight oracle uses the Gamma-ratio formula instead
of the production recurrence, and the KS oracle evaluates empirical CDFs by
brute force.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np


def g_beta_talbot(x: float, beta: float) -> float:
    """One-sided stable density via Talbot inversion of exp(-s**beta).

    Working precision grows with the saddle exponent so small-x values come
    out with plenty of correct digits even when the density is ~1e-40.
    """
    lam = (1.0 - beta) * (beta / x) ** (beta / (1.0 - beta))
    dps = int(30 + 1.2 * lam / math.log(10.0))
    degree = max(30, int(dps))
    with mp.workdps(dps):
        val = mp.invertlaplace(
            lambda s: mp.exp(-(s**beta)), x, method="talbot", degree=degree
        )
        return float(val)


def h_density_quadrature(r: float, t: float, beta: float) -> float:
    """Inverse-subordinator density by direct substitution into the transform
    of the Talbot-inverted subordinator density."""
    u = t * r ** (-1.0 / beta)
    return (t / beta) * r ** (-1.0 - 1.0 / beta) * g_beta_talbot(u, beta)


def grunwald_weights_gamma(order: float, n: int) -> np.ndarray:
    """Weights via (-1)^k Gamma(order+1) / (k! Gamma(order-k+1)) in mpmath."""
    out = np.empty(n + 1)
    with mp.workdps(40):
        for k in range(n + 1):
            v = (-1) ** k * mp.gamma(order + 1) / (mp.gamma(k + 1) * mp.gamma(order - k + 1))
            out[k] = float(v)
    return out


def mittag_leffler_series_mp(beta: float, z: float, dps: int = 60) -> float:
    """High-precision Mittag-Leffler power series (converges for all z)."""
    with mp.workdps(dps):
        total = mp.mpf(0)
        term_count = max(80, int(10 + 8 * abs(z) ** (1.0 / beta)))
        for n in range(term_count):
            total += mp.mpf(z) ** n / mp.gamma(beta * n + 1)
        return float(total)


def ecdf_ks_statistic(a: np.ndarray, b: np.ndarray) -> float:
    """Brute-force two-sample KS statistic from pointwise empirical CDFs."""
    pooled = np.concatenate([a, b])
    fa = np.array([(a <= x).mean() for x in pooled])
    fb = np.array([(b <= x).mean() for x in pooled])
    return float(np.abs(fa - fb).max())


def caputo_bruteforce(f_second, x: float, order: float) -> float:
    """Caputo derivative by high-precision direct quadrature of the singular
    kernel (no substitution), via mpmath."""
    with mp.workdps(30):
        val = mp.quad(
            lambda y: (x - y) ** (mp.mpf(1) - order) * f_second(float(y)),
            [0, x],
        )
        return float(val / mp.gamma(2 - order))
