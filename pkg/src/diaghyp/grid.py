"""Uniform 1D grid functions and the single quadrature rule used everywhere.

All integrals in this package go through :func:`trapezoid` so that norm
computations, entropy integrals and mass bounds are mutually consistent.
Grid functions are treated as compactly supported: they vanish (or are
constant, for solver states) outside the sampled window.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def trapezoid(samples: np.ndarray, dx: float) -> float | np.ndarray:
    """Composite trapezoid rule on a uniform grid, applied along the last axis."""
    s = np.asarray(samples, dtype=float)
    if s.shape[-1] < 2:
        return np.zeros(s.shape[:-1]) if s.ndim > 1 else 0.0
    total = s.sum(axis=-1) - 0.5 * (s[..., 0] + s[..., -1])
    return dx * total


@dataclass(frozen=True)
class ScalarGridFunction:
    """Real-valued samples on a uniform grid starting at ``x0`` with spacing ``dx``."""

    samples: np.ndarray
    dx: float
    x0: float = 0.0

    def __post_init__(self):
        samples = np.atleast_1d(np.asarray(self.samples, dtype=float))
        object.__setattr__(self, "samples", samples)
        if not self.dx > 0:
            raise ValueError(f"grid spacing must be positive, got {self.dx}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("grid samples must be finite")

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    def integral(self) -> float:
        return float(trapezoid(self.samples, self.dx))

    def l1_norm(self) -> float:
        return float(trapezoid(np.abs(self.samples), self.dx))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples))) if self.n else 0.0

    def same_grid(self, other: "ScalarGridFunction") -> bool:
        return (
            self.n == other.n
            and np.isclose(self.dx, other.dx, rtol=1e-12, atol=0.0)
            and np.isclose(self.x0, other.x0, rtol=0.0, atol=1e-12 * max(1.0, abs(self.x0)))
        )


@dataclass(frozen=True)
class GridFunction:
    """Vector-valued grid function with ``d`` components stored as a (d, n) array."""

    data: np.ndarray
    dx: float
    x0: float = 0.0

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data[None, :]
        object.__setattr__(self, "data", data)
        if not self.dx > 0:
            raise ValueError(f"grid spacing must be positive, got {self.dx}")
        if not np.all(np.isfinite(data)):
            raise ValueError("grid data must be finite")

    @property
    def d(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    def component(self, i: int) -> ScalarGridFunction:
        return ScalarGridFunction(self.data[i], self.dx, self.x0)

    def forward_differences(self) -> "GridFunction":
        """Difference quotients (u[j+1]-u[j])/dx on the staggered midpoint grid."""
        w = np.diff(self.data, axis=1) / self.dx
        return GridFunction(w, self.dx, self.x0 + 0.5 * self.dx)

    def sup_norms(self) -> np.ndarray:
        return np.max(np.abs(self.data), axis=1)
