"""Diagonal hyperbolic systems: velocity maps, Jacobians and hypothesis checks.

A system couples d scalar transport equations through a velocity map
``lam : U -> R^d`` on a box of states. The two quantitative hypotheses are
measured numerically: uniform bounds and a Lipschitz constant for ``lam``
(via Jacobian row sums, matching the l1 vector norm), and copositivity of
the velocity Jacobian on the nonnegative cone, exactly for d <= 2 and by
simplex sampling above.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)


@dataclass(frozen=True)
class StateBox:
    """Cartesian product of per-component intervals [alpha_i, beta_i]."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        if alpha.shape != beta.shape:
            raise ValueError("alpha and beta must have matching shapes")
        if np.any(alpha > beta):
            raise ValueError("box requires alpha[i] <= beta[i]")

    @property
    def d(self) -> int:
        return self.alpha.shape[0]

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.alpha + self.beta)

    @property
    def widths(self) -> np.ndarray:
        return self.beta - self.alpha

    def contains(self, u: np.ndarray, tol: float = 0.0) -> bool:
        u = np.asarray(u, dtype=float)
        lo = self.alpha.reshape(-1, *([1] * (u.ndim - 1)))
        hi = self.beta.reshape(-1, *([1] * (u.ndim - 1)))
        return bool(np.all(u >= lo - tol) and np.all(u <= hi + tol))

    def corners(self) -> np.ndarray:
        """All 2^d corner states, shape (2^d, d)."""
        grids = np.meshgrid(*[(a, b) for a, b in zip(self.alpha, self.beta)], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def halton_points(self, n: int) -> np.ndarray:
        """Deterministic low-discrepancy samples, shape (n, d).

        Uses the unscrambled Halton sequence, so the first n points of a longer
        request are always a prefix of it.
        """
        if self.d > len(_PRIMES):
            raise ValueError(f"Halton sampling supports at most d={len(_PRIMES)}")
        idx = np.arange(1, n + 1)
        cols = [_radical_inverse(idx, _PRIMES[j]) for j in range(self.d)]
        unit = np.stack(cols, axis=-1)
        return self.alpha + unit * self.widths

    def sample_points(self, n: int) -> np.ndarray:
        """Corners, the center, then Halton fill, shape (>=n, d)."""
        pts = [self.corners(), self.center[None, :]]
        fill = max(0, n - sum(p.shape[0] for p in pts))
        if fill:
            pts.append(self.halton_points(fill))
        return np.concatenate(pts, axis=0)


def _radical_inverse(idx: np.ndarray, base: int) -> np.ndarray:
    result = np.zeros(idx.shape, dtype=float)
    frac = 1.0 / base
    i = idx.copy()
    while np.any(i > 0):
        result += frac * (i % base)
        i //= base
        frac /= base
    return result


@dataclass(frozen=True)
class DiagonalSystem:
    """Velocity map, Jacobian, state box and time-derivative weights.

    ``lam`` maps states of shape (d,) or (d, m) to values of the same shape.
    ``jacobian`` (optional) maps them to (d, d) or (d, d, m); when absent,
    centered finite differences are used.  ``mu`` are the positive weights
    multiplying the time derivative; the transport velocity of component i
    is lam_i / mu_i.
    """

    d: int
    lam: Callable[[np.ndarray], np.ndarray]
    box: StateBox
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    mu: np.ndarray = None
    name: str = "custom"

    def __post_init__(self):
        mu = np.ones(self.d) if self.mu is None else np.atleast_1d(np.asarray(self.mu, float))
        object.__setattr__(self, "mu", mu)
        if mu.shape != (self.d,) or np.any(mu <= 0):
            raise ValueError("mu must be d positive weights")
        if self.box.d != self.d:
            raise ValueError("box dimension does not match system dimension")
        probe = np.asarray(self.lam(self.box.center), dtype=float)
        if probe.shape != (self.d,) or not np.all(np.isfinite(probe)):
            raise ValueError("lam must return d finite components at the box center")

    def velocities(self, u: np.ndarray) -> np.ndarray:
        """Transport velocities lam(u)/mu, broadcast over trailing axes."""
        lam = np.asarray(self.lam(u), dtype=float)
        mu = self.mu.reshape(-1, *([1] * (lam.ndim - 1)))
        return lam / mu

    def jac(self, u: np.ndarray, step: float = 1e-6) -> np.ndarray:
        """Velocity Jacobian (of the raw lam, not lam/mu) at one or many states."""
        if self.jacobian is not None:
            return np.asarray(self.jacobian(u), dtype=float)
        return jacobian_fd(self, u, step)

    def max_speed_bound(self, n_samples: int = 512) -> float:
        """Upper bound on |lam_i/mu_i| used for CFL, from box sampling."""
        m0, _ = check_h1(self, n_samples)
        return m0 / float(self.mu.min())


def jacobian_fd(sys: DiagonalSystem, u: np.ndarray, step: float = 1e-6,
                full_output: bool = False):
    """Centered-difference Jacobian of lam at u, one-sided near the box boundary.

    ``u`` may be a single state (d,) or a batch (d, m); the result is (d, d)
    or (d, d, m).  With ``full_output`` a boolean flag (or flag array) is also
    returned marking where one-sided differences were used.
    """
    u = np.asarray(u, dtype=float)
    single = u.ndim == 1
    batch = u[:, None] if single else u
    d, m = batch.shape
    alpha = sys.box.alpha[:, None]
    beta = sys.box.beta[:, None]
    jac = np.empty((d, d, m))
    onesided = np.zeros(m, dtype=bool)
    for j in range(d):
        up = batch.copy()
        dn = batch.copy()
        hits_hi = batch[j] + step > beta[j]
        hits_lo = batch[j] - step < alpha[j]
        up[j] = np.minimum(batch[j] + step, beta[j, 0])
        dn[j] = np.maximum(batch[j] - step, alpha[j, 0])
        onesided |= hits_hi | hits_lo
        span = up[j] - dn[j]
        span = np.where(span > 0, span, 1.0)
        jac[:, j, :] = (np.asarray(sys.lam(up), float) - np.asarray(sys.lam(dn), float)) / span
    if single:
        jac = jac[:, :, 0]
        onesided = bool(onesided[0])
    return (jac, onesided) if full_output else jac


def check_h1(sys: DiagonalSystem, n_samples: int = 512) -> tuple[float, float]:
    """Sampled sup bound M0 for |lam_i| and Lipschitz bound M1 via Jacobian row sums.

    Row sums match the l1 norm on state increments, which is the vector norm
    entering the entropy-budget constant.  Sampling includes all box corners,
    so the bounds are monotone nondecreasing in n_samples.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    pts = sys.box.sample_points(n_samples).T  # (d, m)
    lam = np.asarray(sys.lam(pts), dtype=float)
    m0 = float(np.max(np.abs(lam)))
    jac = sys.jac(pts)
    m1 = float(np.max(np.sum(np.abs(jac), axis=1)))
    return m0, m1


def _copositive_min_2x2(s: np.ndarray) -> tuple[float, np.ndarray]:
    """Exact minimum of xi^T S xi over the unit simplex for symmetric 2x2 S."""
    s11, s12, s22 = s[0, 0], s[0, 1], s[1, 1]
    candidates = [(s11, 1.0), (s22, 0.0)]
    denom = s11 - 2.0 * s12 + s22
    if denom > 0:
        t = (s22 - s12) / denom
        if 0.0 < t < 1.0:
            q = s11 * t * t + 2.0 * s12 * t * (1.0 - t) + s22 * (1.0 - t) ** 2
            candidates.append((q, t))
    value, t = min(candidates, key=lambda c: c[0])
    return value, np.array([t, 1.0 - t])


def simplex_directions(d: int, n_target: int) -> np.ndarray:
    """Deterministic grid on the unit l1 simplex with roughly n_target points."""
    m = 1
    while _composition_count(m + 1, d) <= max(n_target, d):
        m += 1
    pts = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            pts.append(prefix + [remaining])
            return
        for k in range(remaining + 1):
            rec(prefix + [k], remaining - k, slots - 1)

    rec([], m, d)
    return np.asarray(pts, dtype=float) / m


def _composition_count(m: int, d: int) -> int:
    from math import comb

    return comb(m + d - 1, d - 1)


@dataclass(frozen=True)
class HypothesisReport:
    """Measured hypothesis constants and the copositivity minimum with witness."""

    M0: float
    M1: float
    h2_min: float
    h2_witness_state: np.ndarray
    h2_witness_direction: np.ndarray
    samples_used: int
    exact_directions: bool

    @property
    def h2_holds(self) -> bool:
        return self.h2_min >= -1e-12


def check_h2(sys: DiagonalSystem, n_state_samples: int = 256,
             n_dir_samples: int = 512) -> HypothesisReport:
    """Minimum of xi^T Jac(u) xi over box states and the nonnegative unit simplex.

    For d <= 2 the simplex minimum at each state is computed exactly from the
    symmetrized Jacobian; for d > 2 a deterministic simplex grid of directions
    is used, so a nonnegative result is evidence, not a certificate.  A
    negative minimum is a finding reported with its witness, never an error.
    """
    if n_state_samples < 1 or n_dir_samples < 1:
        raise ValueError("sample counts must be at least 1")
    m0, m1 = check_h1(sys, max(2, n_state_samples))
    pts = sys.box.sample_points(n_state_samples)  # (m, d)
    jac = sys.jac(pts.T)  # (d, d, m)
    d = sys.d
    best = (np.inf, None, None)
    if d == 1:
        vals = jac[0, 0, :]
        k = int(np.argmin(vals))
        best = (float(vals[k]), pts[k], np.array([1.0]))
        exact = True
    elif d == 2:
        sym = 0.5 * (jac + np.transpose(jac, (1, 0, 2)))
        for k in range(pts.shape[0]):
            val, xi = _copositive_min_2x2(sym[:, :, k])
            if val < best[0]:
                best = (float(val), pts[k], xi)
        exact = True
    else:
        dirs = simplex_directions(d, n_dir_samples)  # (r, d)
        quad = np.einsum("rd,dem,re->rm", dirs, jac, dirs)
        r, k = np.unravel_index(int(np.argmin(quad)), quad.shape)
        best = (float(quad[r, k]), pts[k], dirs[r])
        exact = False
    return HypothesisReport(
        M0=m0,
        M1=m1,
        h2_min=best[0],
        h2_witness_state=np.asarray(best[1], float),
        h2_witness_direction=np.asarray(best[2], float),
        samples_used=pts.shape[0],
        exact_directions=exact,
    )


def _crossing_lam(u):
    u = np.asarray(u, dtype=float)
    return np.stack([np.cos(u[1]), u[0] * np.sin(u[1])])


def _crossing_jacobian(u):
    u = np.asarray(u, dtype=float)
    z = np.zeros_like(u[0])
    s, c = np.sin(u[1]), np.cos(u[1])
    return np.stack([np.stack([z, -s]), np.stack([s, u[0] * c])])


def linear_system(A: np.ndarray, box: StateBox | None = None,
                  mu: np.ndarray | None = None, name: str = "linear") -> DiagonalSystem:
    """System with velocity lam(u) = A u and constant Jacobian A."""
    A = np.asarray(A, dtype=float)
    d = A.shape[0]
    if A.shape != (d, d):
        raise ValueError("A must be square")
    if box is None:
        box = StateBox(-np.ones(d), np.ones(d))

    def lam(u):
        u = np.asarray(u, dtype=float)
        return np.tensordot(A, u, axes=(1, 0))

    def jac(u):
        u = np.asarray(u, dtype=float)
        if u.ndim == 1:
            return A.copy()
        return np.repeat(A[:, :, None], u.shape[1], axis=2)

    return DiagonalSystem(d=d, lam=lam, box=box, jacobian=jac, mu=mu, name=name)


def polynomial_system(coeff_tables, box: StateBox, mu=None,
                      name: str = "polynomial") -> DiagonalSystem:
    """System whose velocities are multivariate polynomials in the state.

    ``coeff_tables[i]`` is a list of ``{"coef": c, "powers": [p_1..p_d]}``
    terms defining lam_i(u) = sum c * prod_j u_j^p_j.  The Jacobian is
    assembled analytically term by term.
    """
    d = box.d
    if len(coeff_tables) != d:
        raise ValueError("one coefficient table per component is required")
    terms = []
    for table in coeff_tables:
        parsed = []
        for term in table:
            powers = np.asarray(term["powers"], dtype=int)
            if powers.shape != (d,) or np.any(powers < 0):
                raise ValueError("each term needs d nonnegative integer powers")
            parsed.append((float(term["coef"]), powers))
        terms.append(parsed)

    def lam(u):
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape)
        for i, parsed in enumerate(terms):
            for coef, powers in parsed:
                mon = np.full(u.shape[1:], coef)
                for j in range(d):
                    if powers[j]:
                        mon = mon * u[j] ** powers[j]
                out[i] += mon
        return out

    def jac(u):
        u = np.asarray(u, dtype=float)
        single = u.ndim == 1
        batch = u[:, None] if single else u
        out = np.zeros((d, d) + batch.shape[1:])
        for i, parsed in enumerate(terms):
            for coef, powers in parsed:
                for j in range(d):
                    if powers[j] == 0:
                        continue
                    mon = np.full(batch.shape[1:], coef * powers[j])
                    for k in range(d):
                        p = powers[k] - (1 if k == j else 0)
                        if p:
                            mon = mon * batch[k] ** p
                    out[i, j] += mon
        return out[:, :, 0] if single else out

    return DiagonalSystem(d=d, lam=lam, box=box, jacobian=jac, mu=mu, name=name)


def builtin(name: str, **params) -> DiagonalSystem:
    """Construct one of the shipped systems by name.

    Names: ``burgers``; ``crossing`` (the non-strictly-hyperbolic 2x2 example);
    ``linear`` (A, optional box/mu); ``dislocation`` (A, mu, optional box);
    ``advection`` (constant speed, d=1).
    """
    if name == "burgers":
        box = params.get("box") or StateBox([-1.0], [1.0])

        def lam(u):
            return np.asarray(u, dtype=float).copy()

        def jac(u):
            u = np.asarray(u, dtype=float)
            one = np.ones(u.shape[1:])
            return one[None, None] if u.ndim > 1 else np.array([[1.0]])

        return DiagonalSystem(d=1, lam=lam, box=box, jacobian=jac, name="burgers")
    if name == "crossing":
        box = params.get("box") or StateBox([1.0, -np.pi / 2], [2.0, np.pi / 2])
        return DiagonalSystem(d=2, lam=_crossing_lam, box=box,
                              jacobian=_crossing_jacobian, name="crossing")
    if name == "linear":
        return linear_system(params["A"], params.get("box"), params.get("mu"))
    if name == "dislocation":
        A = np.asarray(params["A"], dtype=float)
        return linear_system(A, params.get("box"), params.get("mu"), name="dislocation")
    if name == "advection":
        speed = float(params.get("speed", 1.0))
        box = params.get("box") or StateBox([-1.0], [1.0])

        def lam(u):
            u = np.asarray(u, dtype=float)
            return np.full(u.shape, speed)

        def jac(u):
            u = np.asarray(u, dtype=float)
            zero = np.zeros(u.shape[1:])
            return zero[None, None] if u.ndim > 1 else np.array([[0.0]])

        return DiagonalSystem(d=1, lam=lam, box=box, jacobian=jac, name="advection")
    raise ValueError(f"unknown builtin system {name!r}")
