"""Density tables and their CSV/JSON serialization."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .params import StableParams

PROVENANCES = ("analytic", "pde", "monte_carlo")

# Floats are written with 17 significant digits so a round trip through text
# is exact for 64-bit values.
_FMT = "%.17g"


@dataclass(frozen=True)
class DensityTable:
    """Grid x time matrix of density values with provenance metadata."""

    params: StableParams | None
    grid: np.ndarray = field(repr=False)
    times: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)  # shape (n_times, n_grid)
    provenance: str = "analytic"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise DomainError(f"unknown provenance {self.provenance!r}")
        grid = np.asarray(self.grid, dtype=float)
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if np.any(np.diff(grid) <= 0.0):
            raise DomainError("grid must be strictly increasing")
        if np.any(times <= 0.0) or np.any(np.diff(times) <= 0.0):
            raise DomainError("times must be positive and increasing")
        if values.shape != (times.size, grid.size):
            raise DomainError(
                f"values shape {values.shape} does not match (times, grid) = "
                f"({times.size}, {grid.size})"
            )
        if np.any(values < 0.0):
            raise DomainError("density values must be nonnegative")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if self.provenance in ("analytic", "pde"):
            for j, mass in enumerate(self.trapezoid_mass()):
                if not (0.0 <= mass <= 1.0 + 1e-6):
                    raise DomainError(
                        f"trapezoid mass {mass} at t={times[j]} outside [0, 1+tol]"
                    )

    def trapezoid_mass(self) -> np.ndarray:
        return np.trapezoid(self.values, self.grid, axis=1)

    def to_csv(self, path) -> None:
        header = "y," + ",".join("t=" + (_FMT % t) for t in self.times)
        with open(path, "w", newline="") as fh:
            fh.write(header + "\n")
            for i, y in enumerate(self.grid):
                row = [_FMT % y] + [_FMT % v for v in self.values[:, i]]
                fh.write(",".join(row) + "\n")

    def to_json(self, path, extra: dict | None = None) -> None:
        payload = {
            "schema": "fracstable-density-v1",
            "alpha": None if self.params is None else self.params.alpha,
            "provenance": self.provenance,
            "grid": [float(_FMT % g) for g in self.grid],
            "times": list(map(float, self.times)),
            "values": [[float(_FMT % v) for v in row] for row in self.values],
            "meta": {**self.meta, **(extra or {})},
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()
