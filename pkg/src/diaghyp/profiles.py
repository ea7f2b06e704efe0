"""Monotone initial data with compactly supported gradients.

Every profile is built from a nondecreasing base shape composed with a clip
to the core interval [-R, R], so the data is exactly constant outside the
core and its gradient is compactly supported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class InitialData:
    """d monotone scalar profiles, constant outside [-core_radius, core_radius]."""

    profiles: tuple
    core_radius: float

    def __post_init__(self):
        if self.core_radius <= 0:
            raise ValueError("core_radius must be positive")
        object.__setattr__(self, "profiles", tuple(self.profiles))

    @property
    def d(self) -> int:
        return len(self.profiles)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        clipped = np.clip(x, -self.core_radius, self.core_radius)
        return np.stack([np.asarray(p(clipped), dtype=float) for p in self.profiles])

    @property
    def left_values(self) -> np.ndarray:
        return self(np.array([-self.core_radius]))[:, 0]

    @property
    def right_values(self) -> np.ndarray:
        return self(np.array([self.core_radius]))[:, 0]

    def sup_norms(self) -> np.ndarray:
        return np.maximum(np.abs(self.left_values), np.abs(self.right_values))


def tanh_data(ranges: Sequence[tuple[float, float]], width: float = 0.5,
              core_radius: float = 4.0, centers: Sequence[float] | None = None) -> InitialData:
    """Smooth monotone ramps lo -> hi with slope scale ``width``."""
    if centers is None:
        centers = [0.0] * len(ranges)

    def make(lo, hi, c):
        return lambda x: lo + (hi - lo) * 0.5 * (1.0 + np.tanh((x - c) / width))

    profiles = [make(lo, hi, c) for (lo, hi), c in zip(ranges, centers)]
    return InitialData(profiles, core_radius)


def step_data(ranges: Sequence[tuple[float, float]], core_radius: float = 4.0) -> InitialData:
    """Sharp steps at the origin; intended to be smoothed by the mollifier."""

    def make(lo, hi):
        return lambda x: np.where(x < 0.0, lo, hi)

    return InitialData([make(lo, hi) for lo, hi in ranges], core_radius)


def piecewise_linear_data(ranges: Sequence[tuple[float, float]], ramp_radius: float = 1.0,
                          core_radius: float = 4.0) -> InitialData:
    """Linear ramps from lo at -ramp_radius to hi at +ramp_radius."""
    if ramp_radius > core_radius:
        raise ValueError("ramp must fit inside the core interval")

    def make(lo, hi):
        return lambda x: np.interp(x, [-ramp_radius, ramp_radius], [lo, hi])

    return InitialData([make(lo, hi) for lo, hi in ranges], core_radius)


def random_monotone_data(ranges: Sequence[tuple[float, float]], core_radius: float,
                         rng: np.random.Generator, n_breaks: int = 6) -> InitialData:
    """Random nondecreasing piecewise-linear profiles spanning the given ranges."""
    profiles = []
    for lo, hi in ranges:
        xs = np.sort(rng.uniform(-core_radius, core_radius, size=n_breaks))
        xs = np.concatenate([[-core_radius], xs, [core_radius]])
        vals = np.sort(rng.uniform(lo, hi, size=n_breaks))
        vals = np.concatenate([[lo], vals, [hi]])
        profiles.append(lambda x, xs=xs, vals=vals: np.interp(x, xs, vals))
    return InitialData(profiles, core_radius)


def constant_data(values: Sequence[float], core_radius: float = 1.0) -> InitialData:
    """Spatially constant data; a fixed point of the dynamics."""
    return InitialData([lambda x, v=float(v): np.full_like(np.asarray(x, float), v)
                        for v in values], core_radius)
