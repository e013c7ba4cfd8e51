"""Grunwald weights and discrete/quadrature fractional operators.

The weights w_k = (-1)**k * binom(order, k) are generated exclusively by the
multiplicative recurrence w_k = w_{k-1} * (k - 1 - order) / k, which is
cancellation-free; the Gamma-ratio formula is reserved for test oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NumericsError
from .special import gamma_fn


@dataclass(frozen=True)
class GrunwaldWeights:
    """Weights w_0..w_n of one fractional order.

    ``scale`` records the multiplier already applied to ``values``: 1.0 for
    raw weights, h**(-order) once scaled for a grid of step h.
    """

    order: float
    values: np.ndarray
    scale: float = 1.0

    def scaled(self, h: float) -> "GrunwaldWeights":
        if h <= 0.0:
            raise DomainError(f"grid step must be positive, got {h}")
        s = h ** (-self.order)
        return GrunwaldWeights(self.order, self.values * s, self.scale * s)


def grunwald_weights(order: float, n: int) -> GrunwaldWeights:
    """First n+1 Grunwald weights of the given order in (0, 2]."""
    if not (0.0 < order <= 2.0):
        raise DomainError(f"Grunwald order must lie in (0, 2], got {order}")
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    k = np.arange(1, n + 1, dtype=np.float64)
    values = np.empty(n + 1)
    values[0] = 1.0
    if n:
        values[1:] = np.cumprod((k - 1.0 - order) / k)
    return GrunwaldWeights(order, values)


@dataclass(frozen=True)
class SampledFunction:
    """Function values on the uniform grid left_endpoint + i*h."""

    h: float
    values: np.ndarray = field(repr=False)
    left_endpoint: float = 0.0

    def __post_init__(self):
        if self.h <= 0.0:
            raise DomainError(f"grid step must be positive, got {self.h}")

    @property
    def grid(self) -> np.ndarray:
        return self.left_endpoint + self.h * np.arange(len(self.values))


def rl_derivative_neg(f: SampledFunction, order: float) -> SampledFunction:
    """Shifted Grunwald approximation of the negative fractional derivative.

    At node y_i (i >= 1) returns (1/h**order) * sum_k w_k f(y_{i+k-1}), the
    shift-by-one stencil; f is treated as identically zero beyond its grid.
    Output lives on nodes y_1 .. y_N.
    """
    if not (1.0 < order < 2.0):
        raise DomainError(f"order must lie in (1, 2), got {order}")
    n_nodes = len(f.values)
    if n_nodes < 3:
        raise DomainError("need at least 3 grid points")
    w = grunwald_weights(order, n_nodes - 1).values
    padded = np.concatenate([f.values, np.zeros(n_nodes - 1)])
    out = np.correlate(padded, w, mode="valid")[: n_nodes - 1]
    return SampledFunction(f.h, out / f.h**order, f.left_endpoint + f.h)


def rl_derivative_order_minus_one_at_zero(f: SampledFunction, order: float) -> float:
    """Discrete boundary functional (1/h**(order-1)) * sum_k w_k^{order-1} f(y_k).

    This is the Grunwald form of the no-flux boundary condition at the left
    endpoint; the forward solver drives it to zero.
    """
    if not (1.0 < order <= 2.0):
        raise DomainError(f"order must lie in (1, 2], got {order}")
    w = grunwald_weights(order - 1.0, len(f.values) - 1).values
    return float(w @ f.values) / f.h ** (order - 1.0)


def caputo_derivative(f_second, x: float, order: float) -> float:
    """Caputo derivative of order in (1, 2) at x > 0, from the second derivative.

    Evaluates int_0^x (x-y)**(1-order) f''(y) dy / Gamma(2-order) after the
    substitution u = (x-y)**(2-order), which removes the endpoint singularity
    exactly:  result = int_0^{x**(2-order)} f''(x - u**(1/(2-order))) du
    / Gamma(3-order).
    """
    if not (1.0 < order < 2.0):
        raise DomainError(f"order must lie in (1, 2), got {order}")
    if x <= 0.0:
        raise DomainError(f"x must be positive, got {x}")
    p = 2.0 - order
    upper = x**p

    def integrand(u):
        return f_second(x - u ** (1.0 / p))

    val, err = quad(integrand, 0.0, upper, epsabs=1e-11, epsrel=1e-11, limit=200)
    if err > 1e-8 * max(1.0, abs(val)):
        raise NumericsError(
            f"Caputo quadrature did not converge at x={x}, order={order}",
            residual=err,
        )
    return val / gamma_fn(3.0 - order)


def rl_integral(f, x: float, order: float, side: str) -> float:
    """Fractional integral of positive order, positive or negative direction.

    side="pos": (1/Gamma(order)) * int_0^inf f(x - s) s**(order-1) ds
    side="neg": (1/Gamma(order)) * int_0^inf f(x + s) s**(order-1) ds

    The substitution s = u**(1/order) removes the s -> 0 kernel singularity;
    convergence at infinity relies on the decay of f.
    """
    if order <= 0.0:
        raise DomainError(f"order must be positive, got {order}")
    if side not in ("pos", "neg"):
        raise DomainError(f"side must be 'pos' or 'neg', got {side!r}")
    sgn = -1.0 if side == "pos" else 1.0
    inv = 1.0 / order

    def integrand(u):
        return f(x + sgn * u**inv)

    val, err = quad(integrand, 0.0, math.inf, epsabs=1e-11, epsrel=1e-11, limit=400)
    if not math.isfinite(val) or err > 1e-7 * max(1.0, abs(val)):
        raise NumericsError(
            f"fractional integral diverged or failed to converge at x={x}",
            residual=err,
        )
    return val / gamma_fn(order + 1.0)
