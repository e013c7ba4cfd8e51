"""Reproducible random number streams.

Python-level sampling uses numpy's counter-based Philox generator keyed by
(seed, stream_id), so identical keys reproduce identical samples and distinct
stream ids are statistically independent.  The compiled path kernels derive
per-block substream keys from the same pair via a SplitMix64 chain, which
keeps results bit-identical regardless of how many threads execute the
blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z = z ^ (z >> 31)
    return state, z


@dataclass(frozen=True)
class RngStream:
    """One independent random stream, identified by (seed, stream_id)."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, k: int) -> "RngStream":
        """A derived stream, independent of this one and of other k values."""
        _, z = _splitmix64((self.stream_id * 0xD2B74407B1CE6E93 + k + 1) & _MASK64)
        return RngStream(self.seed, z)

    def kernel_key(self) -> int:
        """64-bit key handed to compiled kernels (they split it per block)."""
        s, z1 = _splitmix64(self.seed & _MASK64)
        _, z2 = _splitmix64((s ^ (self.stream_id * 0xCA5A826395121157)) & _MASK64)
        return z1 ^ z2


def open_uniform(gen: np.random.Generator, size=None) -> np.ndarray:
    """Uniform draws strictly inside (0, 1)."""
    return (gen.integers(0, 1 << 53, size=size) + 0.5) * (1.0 / (1 << 53))
