"""Exact-increment samplers and path construction for the stable process family.

Samplers:

* subordinator increments via Kanter's two-uniform representation, exact for
  every beta in (0, 1);
* spectrally negative stable increments via Chambers-Mallows-Stuck in the S1
  convention with skew -1 and scale |cos(pi*alpha/2)|**(1/alpha), which makes
  the characteristic exponent exactly (i*k)**alpha per unit time (alpha = 2
  reduces to a normal with variance 2*dt);
* the inverse subordinator either by walking the subordinator on an adaptive
  geometric grid and finishing with an exact first-passage draw from the last
  committed sub-level state (method "hitting"), or as the grid running max of
  the spectrally negative path (method "supremum").

The reflected process Z is the path minus its running grid minimum.  Running
extrema are taken over grid points only; the resulting bias shrinks with the
step count and is covered by the grid-refinement checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, NumericsError
from .params import StableParams
from .rng import RngStream, open_uniform
from .special import _beta_of

_PROCESS_TAGS = ("Y", "Z", "S", "D", "E")


@dataclass(frozen=True)
class PathSample:
    """One discretized trajectory: values at the given times.

    ``params`` is None for subordinator-side paths with beta < 1/2, where no
    spectrally negative partner exists.
    """

    times: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    process: str
    params: StableParams | None
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.process not in _PROCESS_TAGS:
            raise DomainError(f"unknown process tag {self.process!r}")
        if len(self.times) != len(self.values):
            raise DomainError("times and values must have equal length")
        if self.times[0] != 0.0 or np.any(np.diff(self.times) <= 0.0):
            raise DomainError("times must increase from 0")
        if self.process == "Z":
            if self.values[0] != 0.0 or np.any(self.values < 0.0):
                raise DomainError("Z paths must be nonnegative with Z_0 = 0")
        if self.process in ("D", "S", "E"):
            if self.values[0] != 0.0 or np.any(np.diff(self.values) < 0.0):
                raise DomainError(f"{self.process} paths must be nondecreasing from 0")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("t,value\n")
            for t, v in zip(self.times, self.values):
                fh.write(f"{t:.17g},{v:.17g}\n")


def _resolve_rng(rng) -> tuple[np.random.Generator, int, int]:
    if isinstance(rng, RngStream):
        return rng.generator(), rng.seed, rng.stream_id
    if isinstance(rng, np.random.Generator):
        return rng, -1, -1
    raise DomainError("rng must be an RngStream or numpy Generator")


def _kanter_standard(beta: float, gen: np.random.Generator, size) -> np.ndarray:
    """Draws of the standard subordinator at time 1 (Laplace transform e^{-s^beta})."""
    theta = math.pi * open_uniform(gen, size)
    w = gen.standard_exponential(size)
    a = (
        np.sin(beta * theta) ** beta
        * np.sin((1.0 - beta) * theta) ** (1.0 - beta)
        / np.sin(theta)
    ) ** (1.0 / (1.0 - beta))
    return (a / w) ** ((1.0 - beta) / beta)


def _cms_standard(alpha: float, gen: np.random.Generator, size) -> np.ndarray:
    """Standard CMS draws: S1 convention, skew -1, unit scale."""
    ta = math.tan(0.5 * math.pi * alpha)
    b = math.atan(-ta) / alpha
    s = (1.0 + ta * ta) ** (0.5 / alpha)
    u = (open_uniform(gen, size) - 0.5) * math.pi
    w = gen.standard_exponential(size)
    return (
        s
        * np.sin(alpha * (u + b))
        / np.cos(u) ** (1.0 / alpha)
        * (np.cos(u - alpha * (u + b)) / w) ** ((1.0 - alpha) / alpha)
    )


def sample_subordinator_increment(params, dt: float, rng, size=None):
    """One (or ``size``) draws of the subordinator increment D_dt.

    The marginal has Laplace transform exp(-dt * s**beta); by self-similarity
    the draw is dt**(1/beta) times a standard Kanter draw.  ``params`` may be
    a StableParams or a bare beta in (0, 1).
    """
    beta = _beta_of(params)
    if dt <= 0.0:
        raise DomainError(f"dt must be positive, got {dt}")
    gen, _, _ = _resolve_rng(rng)
    out = dt ** (1.0 / beta) * _kanter_standard(beta, gen, size)
    return float(out) if size is None else out


def sample_spectrally_negative_increment(params: StableParams, dt: float, rng, size=None):
    """One (or ``size``) draws of Y_dt, totally skewed with no positive jumps."""
    if dt <= 0.0:
        raise DomainError(f"dt must be positive, got {dt}")
    alpha = params.alpha
    gen, _, _ = _resolve_rng(rng)
    scale = abs(math.cos(0.5 * math.pi * alpha)) ** (1.0 / alpha) * dt ** (1.0 / alpha)
    out = scale * _cms_standard(alpha, gen, size)
    return float(out) if size is None else out


def simulate_path(params, process: str, t_end: float, n_steps: int, rng) -> PathSample:
    """Simulate one path of Y, Z, S, D or E by exact increments on a uniform grid.

    Y, Z and S need full StableParams; D and E also accept a bare beta in
    (0, 1).  For E the subordinator is extended until it exceeds t_end and
    the inverse is read off as a step function on the same output grid.
    """
    if n_steps < 1:
        raise DomainError(f"n_steps must be >= 1, got {n_steps}")
    if t_end <= 0.0:
        raise DomainError(f"t_end must be positive, got {t_end}")
    gen, seed, stream = _resolve_rng(rng)
    times = np.linspace(0.0, t_end, n_steps + 1)
    dt = t_end / n_steps

    if process in ("Y", "Z", "S"):
        if not isinstance(params, StableParams):
            params = StableParams.from_beta(_beta_of(params))
        inc = sample_spectrally_negative_increment(params, dt, gen, size=n_steps)
        y = np.concatenate([[0.0], np.cumsum(inc)])
        if process == "Y":
            vals = y
        elif process == "S":
            vals = np.maximum.accumulate(y)
        else:
            vals = y - np.minimum.accumulate(y)
    elif process in ("D", "E"):
        beta = _beta_of(params)
        if not isinstance(params, StableParams):
            params = StableParams.from_beta(beta) if beta >= 0.5 else None
        if process == "D":
            inc = sample_subordinator_increment(beta, dt, gen, size=n_steps)
            vals = np.concatenate([[0.0], np.cumsum(inc)])
        else:
            # build D on an r-grid until it crosses t_end, then invert
            r_step = 0.05 * t_end**beta
            d_vals = [0.0]
            while d_vals[-1] <= t_end:
                d_vals.append(
                    d_vals[-1] + sample_subordinator_increment(beta, r_step, gen)
                )
                if len(d_vals) > 2_000_000:
                    raise NumericsError("subordinator failed to cross the horizon")
            d_arr = np.asarray(d_vals)
            # E(t) = smallest grid r with D_r > t
            idx = np.searchsorted(d_arr, times, side="right")
            vals = idx * r_step
            vals[0] = 0.0
    else:
        raise DomainError(f"unknown process tag {process!r}")
    return PathSample(times, vals, process, params, seed, stream)


def simulate_reflected_path(params: StableParams, t_end: float, n_steps: int, rng) -> PathSample:
    """Reflected path Z = Y minus its running grid minimum (Z_0 = 0, Z >= 0)."""
    return simulate_path(params, "Z", t_end, n_steps, rng)


def reflected_terminal_ensemble(
    params: StableParams, t_end: float, n_steps: int, n_paths: int, rng
) -> np.ndarray:
    """Terminal Z values over many paths (compiled kernel)."""
    term, _, run_min = _path_extrema_ensemble(params, t_end, n_steps, n_paths, rng)
    return term - run_min


def _path_extrema_ensemble(params, t_end, n_steps, n_paths, rng):
    if not isinstance(rng, RngStream):
        raise DomainError("ensemble kernels need an RngStream for reproducibility")
    _kernels.set_thread_cap()
    return _kernels.stable_path_extrema(
        params.alpha, t_end, int(n_steps), int(n_paths), rng.kernel_key()
    )


def simulate_inverse_subordinator(
    params, t: float, rng, method: str = "hitting", size=None, sup_steps: int = 4096
):
    """Draws of the inverse subordinator E_t = inf{r : D_r > t}.

    method="hitting": exact sampling through the first-passage identity
    {E_t <= r} = {D_r >= t}, which by self-similarity reads
    E_t = (t / D_1)**beta with D_1 one standard Kanter draw.  (Walking D on a
    refined grid cannot do better: the crossing happens by a jump, so the
    sub-level undershoot does not shrink with the grid, and conditioning
    shortcuts bias the draw; the identity gives the exact law at one draw.)
    method="supremum": the running grid max of the spectrally negative path
    over ``sup_steps`` steps (E equals the supremum process of Y), biased
    low by the grid like every discrete extremum.
    """
    if t <= 0.0:
        raise DomainError(f"t must be positive, got {t}")
    if method == "hitting":
        beta = _beta_of(params)
        gen, _, _ = _resolve_rng(rng)
        n = 1 if size is None else int(size)
        out = (t / _kanter_standard(beta, gen, n)) ** beta
        return float(out[0]) if size is None else out
    if method == "supremum":
        if not isinstance(params, StableParams):
            params = StableParams.from_beta(_beta_of(params))
        if size is None:
            return float(simulate_path(params, "S", t, sup_steps, rng).values[-1])
        _, run_max, _ = _path_extrema_ensemble(params, t, sup_steps, int(size), rng)
        return run_max
    raise DomainError(f"unknown method {method!r}")


@dataclass(frozen=True)
class ReflectionCheck:
    """Monte Carlo estimates of both sides of the reflection identity."""

    lhs: float
    rhs: float
    lhs_stderr: float
    rhs_stderr: float

    @property
    def combined_stderr(self) -> float:
        return math.hypot(self.lhs_stderr, self.rhs_stderr)


def reflection_identity_check(
    params: StableParams, t: float, x: float, n: int, rng, n_steps: int = 2000
) -> ReflectionCheck:
    """Estimate P(S_t >= x) against P(Y_t >= x) / P(Y_t >= 0).

    The left side uses path maxima over ``n_steps`` grid steps; the right
    side uses an independent batch of exact terminal draws, with the ratio
    variance from the delta method (the events are nested, so the covariance
    term is a*(1-b)/n).
    """
    if n < 10_000:
        raise DomainError(f"need n >= 1e4 paths, got {n}")
    if x <= 0.0 or t <= 0.0:
        raise DomainError("t and x must be positive")
    if not isinstance(rng, RngStream):
        raise DomainError("reflection_identity_check needs an RngStream")
    _, run_max, _ = _path_extrema_ensemble(params, t, n_steps, n, rng)
    lhs = float(np.mean(run_max >= x))
    lhs_se = math.sqrt(max(lhs * (1.0 - lhs), 1e-300) / n)

    gen = rng.substream(1).generator()
    y = sample_spectrally_negative_increment(params, t, gen, size=n)
    a = float(np.mean(y >= x))
    b = float(np.mean(y >= 0.0))
    rhs = a / b
    var_a = a * (1.0 - a) / n
    var_b = b * (1.0 - b) / n
    cov = a * (1.0 - b) / n
    var_r = (var_a - 2.0 * rhs * cov + rhs * rhs * var_b) / (b * b)
    return ReflectionCheck(lhs, rhs, lhs_se, math.sqrt(max(var_r, 0.0)))


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float


def ks_two_sample(a, b) -> KsResult:
    """Classical two-sample Kolmogorov-Smirnov test with asymptotic p-value."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise DomainError("both samples must be nonempty")
    a = np.sort(a)
    b = np.sort(b)
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    d = float(np.abs(cdf_a - cdf_b).max())
    en = math.sqrt(a.size * b.size / (a.size + b.size))
    lam = (en + 0.12 + 0.11 / en) * d
    return KsResult(d, _kolmogorov_sf(lam))


def _kolmogorov_sf(lam: float) -> float:
    # survival function of the Kolmogorov distribution; theta-transformed
    # series below lam = 1 for fast convergence
    if lam < 1e-6:
        return 1.0
    if lam < 1.0:
        total = 0.0
        for k in range(1, 40):
            total += math.exp(-((2 * k - 1) ** 2) * math.pi**2 / (8.0 * lam * lam))
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / lam * total))
    total = 0.0
    for k in range(1, 200):
        term = 2.0 * (-1.0) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam)
        total += term
        if abs(term) < 1e-16:
            break
    return min(1.0, max(0.0, total))
