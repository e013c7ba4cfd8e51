"""Compiled hot loops: stable path ensembles and Hessenberg linear algebra.

Path kernels draw from a per-block xoshiro256++ generator whose state is
derived from (kernel key, block index) with SplitMix64, so the output is
bit-identical for a given key no matter how many threads run the blocks.
Threads are capped by FRACSTABLE_THREADS (see :func:`set_thread_cap`).
"""

from __future__ import annotations

import math
import os

import numba as nb
import numpy as np

U64 = np.uint64

_BLOCK = 4096  # paths per RNG block; fixed so results never depend on thread count


def set_thread_cap() -> None:
    """Apply the FRACSTABLE_THREADS env var to numba's thread pool."""
    cap = os.environ.get("FRACSTABLE_THREADS")
    if cap:
        try:
            n = max(1, int(cap))
        except ValueError:
            return
        nb.set_num_threads(min(n, nb.config.NUMBA_NUM_THREADS))


@nb.njit(cache=True, inline="always")
def _splitmix64(state):
    state = state + U64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
    z = z ^ (z >> U64(31))
    return state, z


@nb.njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << U64(k)) | (x >> U64(64 - k))


@nb.njit(cache=True, inline="always")
def _next_u01(s0, s1, s2, s3):
    # xoshiro256++ step; returns a double strictly inside (0, 1)
    out = _rotl(s0 + s3, 23) + s0
    t = s1 << U64(17)
    s2 = s2 ^ s0
    s3 = s3 ^ s1
    s1 = s1 ^ s2
    s0 = s0 ^ s3
    s2 = s2 ^ t
    s3 = _rotl(s3, 45)
    u = (np.float64(out >> U64(11)) + 0.5) * (1.0 / 9007199254740992.0)
    return s0, s1, s2, s3, u


@nb.njit(cache=True)
def _extrema_block(
    term, run_max, run_min, lo, hi, n_steps, alpha, B, S, inv_alpha, expo, sig_dt, key, block
):
    s = U64(key) ^ (U64(block) * U64(0xD2B74407B1CE6E93))
    s, s0 = _splitmix64(s)
    s, s1 = _splitmix64(s)
    s, s2 = _splitmix64(s)
    s, s3 = _splitmix64(s)
    for p in range(lo, hi):
        y = 0.0
        mx = 0.0
        mn = 0.0
        for _ in range(n_steps):
            s0, s1, s2, s3, u1 = _next_u01(s0, s1, s2, s3)
            s0, s1, s2, s3, u2 = _next_u01(s0, s1, s2, s3)
            u = (u1 - 0.5) * math.pi
            w = -math.log(u2)
            x = (
                S
                * math.sin(alpha * (u + B))
                / math.cos(u) ** inv_alpha
                * (math.cos(u - alpha * (u + B)) / w) ** expo
            )
            y += sig_dt * x
            if y > mx:
                mx = y
            if y < mn:
                mn = y
        term[p] = y
        run_max[p] = mx
        run_min[p] = mn


@nb.njit(cache=True, parallel=True)
def stable_path_extrema(alpha, t_end, n_steps, n_paths, key):
    """Terminal value, running max and running min of the spectrally negative
    stable process on the uniform grid with n_steps steps up to t_end.

    Increments are Chambers-Mallows-Stuck draws of the maximally skewed
    (skew -1, S1 convention) stable law scaled so the characteristic
    exponent is exactly dt * (i*k)**alpha.
    """
    dt = t_end / n_steps
    ta = math.tan(0.5 * math.pi * alpha)
    B = math.atan(-ta) / alpha
    S = (1.0 + ta * ta) ** (0.5 / alpha)
    inv_alpha = 1.0 / alpha
    expo = (1.0 - alpha) / alpha
    sig_dt = abs(math.cos(0.5 * math.pi * alpha)) ** inv_alpha * dt**inv_alpha

    term = np.empty(n_paths)
    run_max = np.empty(n_paths)
    run_min = np.empty(n_paths)
    n_blocks = (n_paths + _BLOCK - 1) // _BLOCK
    for b in nb.prange(n_blocks):
        lo = b * _BLOCK
        hi = min(lo + _BLOCK, n_paths)
        _extrema_block(
            term, run_max, run_min, lo, hi, n_steps, alpha, B, S, inv_alpha, expo, sig_dt, key, b
        )
    return term, run_max, run_min


@nb.njit(cache=True)
def hessenberg_lu(H):
    """In-place LU of an upper Hessenberg matrix (no pivoting).

    H becomes U; the returned vector holds the subdiagonal multipliers.
    Stable here because the solver's matrices I - c*A have dominant positive
    diagonals and subdiagonal magnitude below 1/alpha of the diagonal.
    """
    n = H.shape[0]
    m = np.empty(n - 1)
    for k in range(n - 1):
        mk = H[k + 1, k] / H[k, k]
        m[k] = mk
        for j in range(k, n):
            H[k + 1, j] -= mk * H[k, j]
        H[k + 1, k] = 0.0
    return m


@nb.njit(cache=True)
def hessenberg_solve(U, m, b):
    """Solve using factors from :func:`hessenberg_lu` (O(N^2))."""
    n = U.shape[0]
    x = b.copy()
    for k in range(n - 1):
        x[k + 1] -= m[k] * x[k]
    for i in range(n - 1, -1, -1):
        acc = x[i]
        for j in range(i + 1, n):
            acc -= U[i, j] * x[j]
        x[i] = acc / U[i, i]
    return x
