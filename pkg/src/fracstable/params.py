"""Parameter containers for the stable index pair and the solver grid."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class StableParams:
    """Index pair (alpha, beta) of the spectrally negative process and its subordinator.

    ``alpha`` is the index of the spectrally negative stable process (no
    positive jumps), restricted to (1, 2].  ``beta = 1/alpha`` is the index
    of the matching standard stable subordinator, so beta lies in [1/2, 1).
    """

    alpha: float

    def __post_init__(self):
        if not (1.0 < self.alpha <= 2.0):
            raise DomainError(f"alpha must lie in (1, 2], got {self.alpha}")

    @property
    def beta(self) -> float:
        return 1.0 / self.alpha

    @classmethod
    def from_beta(cls, beta: float) -> "StableParams":
        if not (0.5 <= beta < 1.0):
            raise DomainError(f"beta must lie in [1/2, 1), got {beta}")
        return cls(alpha=1.0 / beta)


@dataclass(frozen=True)
class GridSpec:
    """Uniform spatial grid y_i = i*h, i = 0..N, on [0, y_max]."""

    y_max: float
    N: int

    def __post_init__(self):
        if self.y_max <= 0.0:
            raise DomainError(f"y_max must be positive, got {self.y_max}")
        if int(self.N) != self.N or self.N < 3:
            raise DomainError(f"N must be an integer >= 3, got {self.N}")

    @property
    def h(self) -> float:
        return self.y_max / self.N

    def interior_nodes(self):
        """Nodes y_1 .. y_N (the solver unknowns; y_0 = 0 is reconstructed)."""
        import numpy as np

        return self.h * np.arange(1, self.N + 1)
