"""Semidiscrete solver for the forward equation of the reflected stable process.

Space is discretized with the shifted Grunwald stencil on the interior nodes,
the no-flux row is folded in through the weight identity
w_k(alpha) - w_k(alpha-1) = -w_{k-1}(alpha-1), and the resulting constant
linear system u' = A u is integrated in time.  A is upper Hessenberg (one
subdiagonal plus a full upper triangle) and acts like the rate matrix of a
continuous-time Markov chain: nonnegative off-diagonals, negative diagonal,
zero column sums except for the probability flux leaving through the last
column.

The default integrator is an L-stable three-stage SDIRK method of order 3
with an embedded order-2 error estimate; every stage solves against
(I - gamma*h*A), factored once per step size in O(N^2) using the Hessenberg
structure.  An adaptive multistep Adams mode (scipy's LSODA) is provided as
an alternative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, NumericsError
from .gruenwald import grunwald_weights
from .params import GridSpec, StableParams
from .special import reflected_density_from_zero
from .tables import DensityTable

# Alexander's 3-stage, L-stable SDIRK; gamma is the (0,1) root of
# g^3 - 3g^2 + 3g/2 - 1/6.
_GAMMA = 0.4358665215084590
_A21 = 0.5 * (1.0 - _GAMMA)
_B1 = -0.25 * (6.0 * _GAMMA**2 - 16.0 * _GAMMA + 1.0)
_B2 = 0.25 * (6.0 * _GAMMA**2 - 20.0 * _GAMMA + 5.0)
_BH2 = (1.0 - 2.0 * _GAMMA) / (1.0 - _GAMMA)  # embedded order-2 weights
_BH1 = 1.0 - _BH2


@dataclass(frozen=True)
class RateMatrix:
    """Dense N x N generator of the semidiscrete forward equation.

    ``entries`` carries the 1/h**alpha scaling.  Structure: subdiagonal
    1/h**alpha, diagonal -alpha/h**alpha from row 2 on, first row equal to
    minus the partial sums of the interior weights.
    """

    alpha: float
    grid: GridSpec
    entries: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class SolverConfig:
    """Time integration settings.

    ``tol`` bounds the local error per unit time; ``atol`` is an additive
    absolute per-step allowance.  With atol = 0 the control is pure
    per-unit-time, which is what the smooth-problem accuracy contract needs;
    delta initial data carries an O(1/h)-amplitude stiff transient whose
    exact resolution at per-unit-time 1e-8 would cost ~1e6 steps, so the
    delta-start drivers use atol = 1e-6 (the transient relaxes below the
    spatial discretization error either way).  method "sdirk3" is the
    L-stable implicit default; "adams" delegates to scipy's adaptive
    multistep LSODA (which switches to BDF if stiffness demands).
    """

    method: str = "sdirk3"
    tol: float = 1e-8
    atol: float = 0.0
    max_steps: int = 2_000_000

    def __post_init__(self):
        if self.method not in ("sdirk3", "adams"):
            raise DomainError(f"unknown method {self.method!r}")
        if self.tol <= 0.0:
            raise DomainError("tol must be positive")
        if self.atol < 0.0:
            raise DomainError("atol must be nonnegative")


@dataclass(frozen=True)
class ForwardSolution:
    """Interior snapshots u[j, i] = u_h(y_{i+1}, t_j) plus the boundary row.

    ``boundary[j]`` is the reconstructed u_h(y_0, t_j) =
    -sum_{k=1}^N w_k(alpha-1) u_h(y_k, t_j), which enforces the discrete
    no-flux functional exactly.  Raw integrator output may undershoot zero by
    the integrator tolerance; clipping happens only at reporting time.
    """

    grid: GridSpec
    times: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    boundary: np.ndarray = field(repr=False)
    stats: dict = field(default_factory=dict)


def build_rate_matrix(alpha: float, grid: GridSpec) -> RateMatrix:
    """Rate matrix of the shifted Grunwald semidiscretization with no-flux row."""
    if not (1.0 < alpha < 2.0):
        raise DomainError(f"alpha must lie in (1, 2), got {alpha}")
    n = grid.N
    w = grunwald_weights(alpha, n).values
    rows = np.arange(n)[:, None]
    cols = np.arange(n)[None, :]
    k = cols - rows + 1
    mat = np.where(k >= 0, w[np.clip(k, 0, n)], 0.0)
    mat[0, :] = -np.cumsum(w[:n])
    mat /= grid.h**alpha
    return RateMatrix(alpha, grid, mat)


def initial_delta(x: float, grid: GridSpec) -> np.ndarray:
    """Single-cell approximation of a point mass at x: height 1/h in the cell
    containing x (interior nodes y_1..y_N), total mass h * sum = 1."""
    if not (0.0 <= x < grid.y_max):
        raise DomainError(f"x must lie in [0, y_max), got {x}")
    q = x / grid.h
    idx = int(math.floor(q))
    if math.ceil(q) - q < 1e-9 and math.ceil(q) > q:
        idx += 1  # snap when x sits on a node up to roundoff
    u0 = np.zeros(grid.N)
    u0[idx] = 1.0 / grid.h
    return u0


def _boundary_weights(alpha: float, n: int) -> np.ndarray:
    return grunwald_weights(alpha - 1.0, n).values


def integrate(
    matrix: RateMatrix, u0: np.ndarray, times, cfg: SolverConfig = SolverConfig()
) -> ForwardSolution:
    """Integrate u' = A u from u(0) = u0 and record snapshots at the given times."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times <= 0.0) or np.any(np.diff(times) <= 0.0):
        raise DomainError("times must be positive and increasing")
    u0 = np.asarray(u0, dtype=float)
    a = matrix.entries
    if u0.shape != (a.shape[0],):
        raise DomainError("u0 length does not match the matrix")

    if cfg.method == "sdirk3":
        snaps, stats = _integrate_sdirk3(a, u0, times, cfg)
    else:
        snaps, stats = _integrate_adams(a, u0, times, cfg)

    wb = _boundary_weights(matrix.alpha, matrix.grid.N)[1:]
    boundary = -(snaps @ wb)
    return ForwardSolution(matrix.grid, times, snaps, boundary, stats)


def _integrate_sdirk3(a, u0, times, cfg):
    n = a.shape[0]
    identity = np.eye(n)
    tol = cfg.tol

    lu_h = -1.0
    lu_mat = None
    lu_mult = None

    def factor(h):
        nonlocal lu_h, lu_mat, lu_mult
        lu_mat = identity - (h * _GAMMA) * a
        lu_mult = _kernels.hessenberg_lu(lu_mat)
        lu_h = h

    def solve(rhs):
        return _kernels.hessenberg_solve(lu_mat, lu_mult, rhs)

    t = 0.0
    u = u0.copy()
    snaps = np.empty((times.size, n))
    next_i = 0
    rate0 = np.linalg.norm(a @ u0, np.inf)
    h = min(0.1 * times[0], (tol / (rate0 + 1.0)) ** (1.0 / 3.0))
    h = max(h, 1e-14)
    factor(h)
    n_steps = 0
    n_factor = 1
    n_reject = 0
    prev_rejected = False

    while next_i < times.size:
        if n_steps >= cfg.max_steps:
            raise NumericsError(f"step budget exhausted at t={t}", residual=h)
        target = times[next_i]
        clamped = t + h >= target
        h_try = min(h, target - t) if clamped else h
        if h_try != lu_h:
            factor(h_try)
            n_factor += 1
        k1 = solve(a @ u)
        k2 = solve(a @ (u + (h_try * _A21) * k1))
        k3 = solve(a @ (u + h_try * (_B1 * k1 + _B2 * k2)))
        u_new = u + h_try * (_B1 * k1 + _B2 * k2 + _GAMMA * k3)
        err_vec = solve(h_try * ((_B1 - _BH1) * k1 + (_B2 - _BH2) * k2 + _GAMMA * k3))
        err = np.linalg.norm(err_vec, np.inf)
        scale = tol * h_try * (1.0 + np.linalg.norm(u, np.inf)) + cfg.atol
        n_steps += 1
        accepted = err <= scale or h_try <= 1e-13
        if accepted:
            t += h_try
            u = u_new
            if t >= target - 1e-13 * max(1.0, target):
                snaps[next_i] = u
                next_i += 1
        else:
            n_reject += 1
        ratio = scale / max(err, 1e-300)
        # err ~ C h^3 against an allowance at worst constant in h, so the
        # cube-root law cannot overshoot into a reject/grow cycle
        h_prop = h_try * min(4.0, max(0.2, 0.9 * ratio ** (1.0 / 3.0)))
        if not accepted:
            h = min(h_prop, 0.7 * h_try)
            prev_rejected = True
        elif not clamped:
            # reuse the factorization while the proposal stays in a deadband,
            # and do not grow immediately after a rejection
            if prev_rejected:
                h_prop = min(h_prop, h_try)
            if h_prop > 1.3 * h or h_prop < 0.9 * h:
                h = h_prop
            prev_rejected = False
        else:
            if h_prop < h:
                h = h_prop
            prev_rejected = False
    stats = {"steps": n_steps, "rejects": n_reject, "factorizations": n_factor}
    return snaps, stats


def _integrate_adams(a, u0, times, cfg):
    from scipy.integrate import solve_ivp

    sol = solve_ivp(
        lambda _, u: a @ u,
        (0.0, float(times[-1])),
        u0,
        method="LSODA",
        t_eval=times,
        rtol=cfg.tol,
        atol=cfg.tol * 1e-3,
        jac=lambda _, __: a,
    )
    if not sol.success:
        raise NumericsError(f"LSODA failed: {sol.message}")
    return sol.y.T.copy(), {"steps": sol.t.size, "method": "lsoda"}


def transition_density(
    alpha: float,
    x0: float,
    grid: GridSpec,
    times,
    cfg: SolverConfig | None = None,
) -> DensityTable:
    """Transition density y -> p(x0, y, t) from the forward equation.

    Negative integrator undershoots are clipped to zero at this reporting
    stage; the largest clipped magnitude lands in ``meta['clip_max']``.
    """
    if cfg is None:
        cfg = SolverConfig(atol=1e-6)  # delta start, see SolverConfig notes
    matrix = build_rate_matrix(alpha, grid)
    sol = integrate(matrix, initial_delta(x0, grid), times, cfg)
    clip_max = float(max(0.0, -sol.u.min()))
    values = np.clip(sol.u, 0.0, None)
    return DensityTable(
        params=StableParams(alpha),
        grid=grid.interior_nodes(),
        times=sol.times,
        values=values,
        provenance="pde",
        meta={
            "x0": x0,
            "y_max": grid.y_max,
            "N": grid.N,
            "h": grid.h,
            "solver": cfg.method,
            "tol": cfg.tol,
            "clip_max": clip_max,
            "boundary": [float(v) for v in sol.boundary],
            **sol.stats,
        },
    )


def l1_error_vs_analytic(table: DensityTable, t_index: int, reference: str = "cell") -> float:
    """Rectangle-rule L1 distance between a pde table snapshot and the
    analytic started-at-zero density on the same interior grid.

    reference="cell" (default) compares node values against the analytic
    density averaged over the matching cell [y_i - h, y_i] (Simpson), the
    quantity the scheme actually approximates: the initial condition is the
    cell indicator of mass 1/h and the chain interpretation books node i for
    that cell.  reference="node" compares against pointwise p(y_i, t), which
    adds an O(h/2) shift artifact on top of the truncation error.
    """
    t = float(table.times[t_index])
    params = table.params
    h = float(table.grid[1] - table.grid[0])
    if reference == "node":
        ref = np.array([reflected_density_from_zero(y, t, params) for y in table.grid])
    elif reference == "cell":
        pa = np.array([reflected_density_from_zero(y - h, t, params) for y in table.grid])
        pm = np.array(
            [reflected_density_from_zero(y - 0.5 * h, t, params) for y in table.grid]
        )
        pb = np.array([reflected_density_from_zero(y, t, params) for y in table.grid])
        ref = (pa + 4.0 * pm + pb) / 6.0
    else:
        raise DomainError(f"reference must be 'cell' or 'node', got {reference!r}")
    return float(h * np.abs(table.values[t_index] - ref).sum())


def convergence_study(
    alpha: float,
    h_list,
    t: float = 1.0,
    x0: float = 0.0,
    y_max: float = 12.0,
    cfg: SolverConfig | None = None,
):
    """L1 errors against the analytic x0 = 0 density for each grid step,
    with the fitted log-log slope.  Returns (list of (h, error), slope)."""
    h_list = list(h_list)
    if len(h_list) < 3:
        raise DomainError("need at least 3 grid steps")
    if any(b >= a for a, b in zip(h_list, h_list[1:])):
        raise DomainError("h_list must be decreasing")
    pairs = []
    for h in h_list:
        n = int(round(y_max / h))
        table = transition_density(alpha, x0, GridSpec(y_max, n), [t], cfg)
        pairs.append((h, l1_error_vs_analytic(table, 0)))
    logs_h = np.log([p[0] for p in pairs])
    logs_e = np.log([p[1] for p in pairs])
    slope = float(np.polyfit(logs_h, logs_e, 1)[0])
    return pairs, slope
