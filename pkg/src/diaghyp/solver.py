"""Explicit upwind/diffusion solver for the viscous regularization.

The transport term is discretized with first-order upwinding by the local
sign of the velocity and the viscosity with the centered second difference,
advanced by forward Euler.  This is the discretization class for which the
discrete maximum principle and monotonicity preservation hold, which is the
whole point: every a-priori estimate measured downstream is a theorem for
the scheme, not an aspiration.

Both the line solver (truncated domain, zero-gradient ghosts, sentinel
cells) and the periodic solver with a nonlocal mean-field velocity live
here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import (
    BoxViolationError,
    CflViolationError,
    DomainContaminationError,
    NumericalAbortError,
)
from .grid import GridFunction
from .profiles import InitialData
from .systems import DiagonalSystem, check_h1

#: slack added to the sampled speed bound before forming the advective CFL limit
CFL_SPEED_SLACK = 1e-6


@dataclass(frozen=True)
class SolverConfig:
    """Viscosity, grid geometry and stepping policy for one run.

    ``domain`` is one of ``("truncated", extra_margin)``, ``("fixed", x0, n)``
    or ``("periodic", period)``.  ``mollifier_width`` defaults to ``epsilon``
    (the regularization couples both, which we keep as the default but allow
    to override; width 0 means pure sampling).  ``dt`` may pin the time step
    explicitly; it is then validated against the hard stability bound.
    ``domain_epsilon`` sizes the truncated domain for a different viscosity
    than the run's own, so sweep members can share a grid.
    """

    epsilon: float
    dx: float
    final_time: float
    mollifier_width: Optional[float] = None
    cfl_safety: float = 0.45
    domain: tuple = ("truncated", 0.0)
    record_every: Optional[float] = None
    dt: Optional[float] = None
    sentinel_cells: int = 5
    sentinel_tol: float = 1e-9
    domain_epsilon: Optional[float] = None

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.dx <= 0 or self.final_time <= 0:
            raise ValueError("dx and final_time must be positive")
        if not 0 < self.cfl_safety <= 1:
            raise ValueError("cfl_safety must lie in (0, 1]")
        if self.domain[0] not in ("truncated", "fixed", "periodic"):
            raise ValueError(f"unknown domain mode {self.domain[0]!r}")
        if self.mollifier_width is not None and self.mollifier_width < 0:
            raise ValueError("mollifier_width must be nonnegative")

    @property
    def width(self) -> float:
        return self.epsilon if self.mollifier_width is None else self.mollifier_width


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered snapshots of one run plus the facts needed to audit it."""

    times: np.ndarray
    states: tuple
    dx: float
    x0: float
    dt: float
    mu: np.ndarray
    config: SolverConfig
    system_name: str
    M0: float
    M1: float
    periodic: bool = False
    jumps: Optional[np.ndarray] = None

    @property
    def n_snapshots(self) -> int:
        return len(self.states)

    @property
    def d(self) -> int:
        return self.states[0].shape[0]

    @property
    def n(self) -> int:
        return self.states[0].shape[1]

    def snapshot(self, k: int) -> GridFunction:
        return GridFunction(self.states[k], self.dx, self.x0)

    @property
    def initial(self) -> GridFunction:
        return self.snapshot(0)

    @property
    def final(self) -> GridFunction:
        return self.snapshot(self.n_snapshots - 1)

    def initial_sup_norms(self) -> np.ndarray:
        return np.max(np.abs(self.states[0]), axis=1)


def bump_kernel(width: float, dx: float) -> np.ndarray:
    """Discrete mollifier weights from the C_c^infinity bump on (-1, 1).

    Samples exp(-1/(1-s^2)) at grid offsets and renormalizes so the weights
    sum to exactly 1; width below dx degenerates to pure sampling.
    """
    k = int(math.floor(width / dx))
    if width <= 0 or k < 1:
        return np.array([1.0])
    s = np.arange(-k, k + 1) * dx / width
    inside = np.abs(s) < 1.0
    w = np.zeros_like(s)
    w[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return w / w.sum()


def mollify(u0: InitialData, width: float, dx: float,
            x_lo: Optional[float] = None, x_hi: Optional[float] = None) -> GridFunction:
    """Sample the data and convolve with the discrete bump of the given width.

    The profile is sampled on an extension of the requested window so the
    convolution never sees artificial boundary values; because the data is
    exactly constant outside its core this reproduces the continuum
    convolution at the grid points.
    """
    if width < 0:
        raise ValueError("mollifier width must be nonnegative")
    if x_lo is None:
        x_lo = -(u0.core_radius + width + 10 * dx)
    if x_hi is None:
        x_hi = u0.core_radius + width + 10 * dx
    n = int(round((x_hi - x_lo) / dx)) + 1
    kernel = bump_kernel(width, dx)
    half = (kernel.size - 1) // 2
    if kernel.size > n:
        raise ValueError("mollifier support is wider than the requested grid")
    x_ext = x_lo + dx * np.arange(-half, n + half)
    values = u0(x_ext)
    if kernel.size == 1:
        data = values
    else:
        data = np.stack([np.convolve(values[i], kernel, mode="valid")
                         for i in range(values.shape[0])])
    return GridFunction(data, dx, x_lo)


def _shifted_differences(data: np.ndarray, left_ghost: np.ndarray,
                         right_ghost: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Backward and forward neighbor differences with explicit ghost columns."""
    dul = np.empty_like(data)
    dul[:, 1:] = data[:, 1:] - data[:, :-1]
    dul[:, 0] = data[:, 0] - left_ghost
    dur = np.empty_like(data)
    dur[:, :-1] = dul[:, 1:]
    dur[:, -1] = right_ghost - data[:, -1]
    return dul, dur


def _upwind_step(data: np.ndarray, velocities: np.ndarray, dt: float, dx: float,
                 eps_comp: np.ndarray, left_ghost: np.ndarray,
                 right_ghost: np.ndarray) -> np.ndarray:
    """One forward-Euler update; written so constant regions stay bit-exact."""
    c = (dt / dx) * velocities
    dul, dur = _shifted_differences(data, left_ghost, right_ghost)
    adv = np.where(c > 0, c * dul, c * dur)
    diff = (dt / (dx * dx)) * eps_comp[:, None] * (dur - dul)
    return data - adv + diff


def _stability_number(velocities: np.ndarray, dt: float, dx: float,
                      eps_comp: np.ndarray) -> float:
    return float(np.max(np.abs(velocities)) * dt / dx
                 + 2.0 * dt * float(np.max(eps_comp)) / (dx * dx))


def step(u: GridFunction, sys: DiagonalSystem, eps: float, dt: float) -> GridFunction:
    """Advance one explicit step on the line with zero-gradient ghost cells.

    Validates box membership (a state outside the box signals a scheme or
    setup bug and is never silently projected) and the combined stability
    number before updating.
    """
    data = u.data
    tol = 1e-8 * max(1.0, float(np.max(sys.box.widths)))
    if not sys.box.contains(data, tol=tol):
        raise BoxViolationError("state left the admissible box before the step")
    velocities = sys.velocities(data)
    eps_comp = eps / sys.mu
    if _stability_number(velocities, dt, u.dx, eps_comp) > 1.0 + 1e-9:
        bound = u.dx / max(float(np.max(np.abs(velocities))), 1e-300)
        if eps > 0:
            bound = min(bound, u.dx * u.dx / (2.0 * float(np.max(eps_comp))))
        raise CflViolationError(dt, bound)
    new = _upwind_step(data, velocities, dt, u.dx, eps_comp,
                       data[:, 0], data[:, -1])
    if not np.all(np.isfinite(new)):
        raise NumericalAbortError(dt, u)
    return GridFunction(new, u.dx, u.x0)


def stable_dt(cfg: SolverConfig, speed_bound: float, mu_min: float) -> float:
    """Automatic step: cfl_safety times the advective/diffusive stability limit."""
    bounds = [cfg.final_time]
    if speed_bound > 0:
        bounds.append(cfg.dx * mu_min / (speed_bound + CFL_SPEED_SLACK))
    if cfg.epsilon > 0:
        bounds.append(mu_min * cfg.dx * cfg.dx / (2.0 * cfg.epsilon))
    dt = cfg.cfl_safety * min(bounds)
    return min(dt, cfg.final_time)


def _validate_explicit_dt(cfg: SolverConfig, speed_bound: float, mu_min: float) -> float:
    hard = math.inf
    if speed_bound > 0:
        hard = cfg.dx * mu_min / speed_bound
    if cfg.epsilon > 0:
        hard = min(hard, mu_min * cfg.dx * cfg.dx / (2.0 * cfg.epsilon))
    if cfg.dt > hard * (1.0 + 1e-12):
        raise CflViolationError(cfg.dt, hard)
    return cfg.dt


def _plan_steps(cfg: SolverConfig, dt: float) -> tuple[int, float, int]:
    n_steps = max(1, int(math.ceil(cfg.final_time / dt * (1.0 - 1e-12))))
    dt = cfg.final_time / n_steps
    target = cfg.record_every if cfg.record_every else cfg.final_time / 128.0
    stride = max(1, int(round(target / dt)))
    return n_steps, dt, stride


def truncated_grid(u0: InitialData, cfg: SolverConfig, speed_bound: float) -> tuple[float, int]:
    """Window wide enough that transport plus diffusion never reach the edge.

    The gradient support starts inside the core; transport moves it at most
    speed*T while diffusion adds a Gaussian tail, suppressed below the
    sentinel tolerance by a 10*sqrt(eps*T) margin.
    """
    extra = cfg.domain[1] if len(cfg.domain) > 1 else 0.0
    eps_dom = cfg.domain_epsilon if cfg.domain_epsilon is not None else cfg.epsilon
    half = (u0.core_radius + cfg.width + speed_bound * cfg.final_time
            + 10.0 * math.sqrt(max(eps_dom, 0.0) * cfg.final_time)
            + 10.0 * cfg.dx + extra)
    cells = int(math.ceil(half / cfg.dx))
    x0 = -cfg.dx * cells
    return x0, 2 * cells + 1


def solve(u0: InitialData, sys: DiagonalSystem, cfg: SolverConfig,
          on_step: Optional[Callable] = None) -> Trajectory:
    """Run the regularized system to the final time and record snapshots.

    The returned trajectory starts with the mollified initial data, keeps a
    snapshot roughly every ``record_every`` time units plus the final state,
    and is checked for NaNs, box violations and boundary contamination
    (sentinel cells near the truncated edges must stay put).
    """
    if u0.d != sys.d:
        raise ValueError("initial data and system dimensions differ")
    M0, M1 = check_h1(sys, 512)
    mu_min = float(sys.mu.min())
    mode = cfg.domain[0]
    if mode == "periodic":
        raise ValueError("use solve_periodic_nonlocal for periodic runs")
    if mode == "fixed":
        x0, n = float(cfg.domain[1]), int(cfg.domain[2])
    else:
        x0, n = truncated_grid(u0, cfg, M0 / mu_min)
    init = mollify(u0, cfg.width, cfg.dx, x0, x0 + (n - 1) * cfg.dx)
    data = init.data.copy()
    box_tol = 1e-8 * max(1.0, float(np.max(sys.box.widths)))
    if not sys.box.contains(data, tol=box_tol):
        raise BoxViolationError("mollified initial data is not inside the box")

    dt = _validate_explicit_dt(cfg, M0 / mu_min, mu_min) if cfg.dt else \
        stable_dt(cfg, M0 / mu_min, mu_min)
    n_steps, dt, stride = _plan_steps(cfg, dt)
    eps_comp = cfg.epsilon / sys.mu

    ns = min(cfg.sentinel_cells, n // 8)
    sentinel_left = data[:, :ns].copy()
    sentinel_right = data[:, n - ns:].copy()

    times = [0.0]
    states = [data.copy()]
    for k in range(1, n_steps + 1):
        velocities = sys.velocities(data)
        if _stability_number(velocities, dt, cfg.dx, eps_comp) > 1.0 + 1e-9:
            raise CflViolationError(dt, cfg.dx / float(np.max(np.abs(velocities))))
        data = _upwind_step(data, velocities, dt, cfg.dx, eps_comp,
                            data[:, 0], data[:, -1])
        if not np.all(np.isfinite(data)):
            raise NumericalAbortError(k * dt, GridFunction(states[-1], cfg.dx, x0))
        if not sys.box.contains(data, tol=box_tol):
            raise BoxViolationError(f"state left the box at t={k * dt:.6g}")
        if k % stride == 0 or k == n_steps:
            times.append(k * dt)
            states.append(data.copy())
            if on_step is not None:
                on_step(k * dt, data)

    if ns:
        moved = max(float(np.max(np.abs(data[:, :ns] - sentinel_left))),
                    float(np.max(np.abs(data[:, n - ns:] - sentinel_right))))
        if moved > cfg.sentinel_tol:
            raise DomainContaminationError(moved, cfg.sentinel_tol)

    return Trajectory(
        times=np.asarray(times),
        states=tuple(states),
        dx=cfg.dx,
        x0=x0,
        dt=dt,
        mu=sys.mu.copy(),
        config=cfg,
        system_name=sys.name,
        M0=M0,
        M1=M1,
    )


@dataclass(frozen=True)
class NonlocalSystem:
    """Linear velocity A u plus a mean-field coupling Q <u> with weights mu.

    The transport velocity of component i is
    (sum_j A_ij u_j(x) + sum_j Q_ij <u_j>) / mu_i, where <.> is the trapezoid
    mean over one period, recomputed every step.
    """

    A: np.ndarray
    Q: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        Q = np.asarray(self.Q, dtype=float)
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "mu", mu)
        d = A.shape[0]
        if A.shape != (d, d) or Q.shape != (d, d) or mu.shape != (d,):
            raise ValueError("A, Q must be d x d and mu length d")
        if np.any(mu <= 0):
            raise ValueError("mu must be positive")

    @property
    def d(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class PeriodicInitialData:
    """Profiles whose deviation from slope * x is periodic with the given period."""

    profiles: tuple
    slopes: np.ndarray
    period: float

    def __post_init__(self):
        object.__setattr__(self, "profiles", tuple(self.profiles))
        object.__setattr__(self, "slopes", np.atleast_1d(np.asarray(self.slopes, float)))
        if self.period <= 0:
            raise ValueError("period must be positive")
        if len(self.profiles) != self.slopes.shape[0]:
            raise ValueError("one slope per profile is required")

    @property
    def d(self) -> int:
        return len(self.profiles)

    def sample(self, x: np.ndarray) -> np.ndarray:
        return np.stack([np.asarray(p(x), dtype=float) for p in self.profiles])


def _period_means(data: np.ndarray, dx: float, jumps: np.ndarray, period: float) -> np.ndarray:
    # trapezoid over one period with the wrap sample u(x0+P) = u(x0) + jump
    integral = dx * data.sum(axis=1) + 0.5 * dx * jumps
    return integral / period


def solve_periodic_nonlocal(u0: PeriodicInitialData, nsys: NonlocalSystem,
                            cfg: SolverConfig) -> Trajectory:
    """Advance the periodic mean-field model over one period window.

    States are stored on one period; wrap neighbors are offset by the slope
    jump slope * period, so periodicity of u - slope*x is preserved exactly
    by construction.
    """
    if cfg.domain[0] != "periodic":
        raise ValueError("solver config must use a periodic domain")
    period = float(cfg.domain[1])
    if not math.isclose(period, u0.period, rel_tol=1e-12):
        raise ValueError("config period and data period differ")
    if u0.d != nsys.d:
        raise ValueError("data and system dimensions differ")
    n = int(round(period / cfg.dx))
    if n < 4 or not math.isclose(n * cfg.dx, period, rel_tol=1e-9):
        raise ValueError("period must be an integer multiple of dx")
    x0 = -0.5 * period
    x = x0 + cfg.dx * np.arange(n)
    data = u0.sample(x)
    jumps = u0.slopes * period
    if cfg.width > 0:
        kernel = bump_kernel(cfg.width, cfg.dx)
        half = (kernel.size - 1) // 2
        if half:
            line = u0.slopes[:, None] * x[None, :]
            dev = data - line
            padded = np.concatenate([dev[:, -half:], dev, dev[:, :half]], axis=1)
            data = np.stack([np.convolve(padded[i], kernel, mode="valid")
                             for i in range(u0.d)]) + line

    def velocities(state):
        means = _period_means(state, cfg.dx, jumps, period)
        return (nsys.A @ state + (nsys.Q @ means)[:, None]) / nsys.mu[:, None]

    v0 = velocities(data)
    speed = 2.0 * float(np.max(np.abs(v0))) + CFL_SPEED_SLACK
    mu_min = float(nsys.mu.min())
    dt = _validate_explicit_dt(cfg, speed, mu_min) if cfg.dt else \
        stable_dt(cfg, speed, mu_min)
    n_steps, dt, stride = _plan_steps(cfg, dt)
    eps_comp = cfg.epsilon / nsys.mu

    times = [0.0]
    states = [data.copy()]
    for k in range(1, n_steps + 1):
        vel = velocities(data)
        if _stability_number(vel, dt, cfg.dx, eps_comp) > 1.0 + 1e-9:
            raise CflViolationError(dt, cfg.dx / float(np.max(np.abs(vel))))
        data = _upwind_step(data, vel, dt, cfg.dx, eps_comp,
                            data[:, -1] - jumps[:, None].ravel(),
                            data[:, 0] + jumps[:, None].ravel())
        if not np.all(np.isfinite(data)):
            raise NumericalAbortError(k * dt, GridFunction(states[-1], cfg.dx, x0))
        if k % stride == 0 or k == n_steps:
            times.append(k * dt)
            states.append(data.copy())

    return Trajectory(
        times=np.asarray(times),
        states=tuple(states),
        dx=cfg.dx,
        x0=x0,
        dt=dt,
        mu=nsys.mu.copy(),
        config=cfg,
        system_name="periodic-nonlocal",
        M0=float(np.max(np.abs(v0))),
        M1=float(np.max(np.sum(np.abs(nsys.A), axis=1))),
        periodic=True,
        jumps=jumps,
    )
