"""Zygmund/exponential Orlicz norms on grid functions.

Provides the truncated entropy integrand, Luxemburg norms for the
``L log L`` and ``EXP`` classes computed by bracketed bisection, and the
inequalities connecting the entropy integral, the two norms and ``L1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import ScalarGridFunction, trapezoid

E_INV = 1.0 / np.e

#: relative tolerance of the Luxemburg root finder
ROOT_RTOL = 1e-10
_MAX_ITERATIONS = 200


def entropy_f(x):
    """Convex entropy x*ln(x) + 1/e, truncated to 0 on [0, 1/e].

    Accepts scalars or arrays; rejects negative input.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("entropy_f is only defined for nonnegative arguments")
    out = np.zeros_like(arr)
    m = arr > E_INV
    out[m] = arr[m] * np.log(arr[m]) + E_INV
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def entropy_g(x):
    """Piecewise-linear companion of entropy_f: x - 1/e above 1/e, else 0."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("entropy_g is only defined for nonnegative arguments")
    out = np.maximum(arr - E_INV, 0.0)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


@dataclass(frozen=True)
class NormResult:
    value: float
    converged: bool
    iterations: int


def _bisect_decreasing(func, lo, hi):
    """Root of a strictly decreasing function, with bracket expansion.

    ``lo``/``hi`` are an initial guess bracket; they are widened geometrically
    until func(lo) >= 0 >= func(hi), then bisected to ROOT_RTOL relative width.
    """
    iterations = 0
    with np.errstate(over="ignore"):
        f_lo = func(lo)
        while f_lo < 0 and iterations < _MAX_ITERATIONS:
            hi = lo
            lo *= 0.5
            f_lo = func(lo)
            iterations += 1
        f_hi = func(hi)
        while f_hi > 0 and iterations < _MAX_ITERATIONS:
            lo = hi
            hi *= 2.0
            f_hi = func(hi)
            iterations += 1
        if f_lo < 0 or f_hi > 0:
            return 0.5 * (lo + hi), False, iterations
        while hi - lo > ROOT_RTOL * hi and iterations < _MAX_ITERATIONS:
            mid = 0.5 * (lo + hi)
            if func(mid) >= 0:
                lo = mid
            else:
                hi = mid
            iterations += 1
    return 0.5 * (lo + hi), hi - lo <= ROOT_RTOL * hi, iterations


def norm_llogl(h: ScalarGridFunction) -> NormResult:
    """Luxemburg norm of the Zygmund class: inf{mu : int (|h|/mu) ln(e+|h|/mu) <= 1}.

    The constraint integral is strictly decreasing in mu, so the infimum is the
    root of the equation with equality, located by bracketed bisection.
    """
    a = np.abs(h.samples)
    l1 = float(trapezoid(a, h.dx))
    if l1 <= 0.0:
        return NormResult(0.0, True, 0)
    amax = float(a.max())

    def constraint(mu):
        t = a / mu
        return float(trapezoid(t * np.log(np.e + t), h.dx)) - 1.0

    lo = l1 / (1.0 + np.log(np.e + amax))
    hi = l1 * (1.0 + amax)
    root, converged, iterations = _bisect_decreasing(constraint, lo, hi)
    if not converged:
        raise RuntimeError(
            "L log L norm did not converge; the input support or quadrature is degenerate"
        )
    return NormResult(root, converged, iterations)


def norm_exp(h: ScalarGridFunction) -> NormResult:
    """Luxemburg norm of the exponential class: inf{lam : int (e^{|h|/lam}-1) <= 1}."""
    a = np.abs(h.samples)
    l1 = float(trapezoid(a, h.dx))
    if l1 <= 0.0:
        return NormResult(0.0, True, 0)
    amax = float(a.max())
    support = float(trapezoid((a > 0).astype(float), h.dx))
    support = max(support, h.dx)

    def constraint(lam):
        return float(trapezoid(np.expm1(a / lam), h.dx)) - 1.0

    # int(e^{a/lam}-1) <= support*(e^{amax/lam}-1), so this lam is feasible
    hi = amax / np.log1p(1.0 / support)
    lo = 0.5 * hi
    root, converged, iterations = _bisect_decreasing(constraint, lo, hi)
    if not converged:
        raise RuntimeError(
            "EXP norm did not converge; the input support or quadrature is degenerate"
        )
    return NormResult(root, converged, iterations)


@dataclass(frozen=True)
class ZygmundBoundsReport:
    """Entropy integral, both norms, and slack of the two-sided comparison."""

    entropy_integral: float
    llogl_norm: float
    l1_norm: float
    entropy_slack: float
    norm_slack: float

    @property
    def satisfied(self) -> bool:
        return self.entropy_slack >= -1e-9 and self.norm_slack >= -1e-9


def check_llogl_bounds(h: ScalarGridFunction) -> ZygmundBoundsReport:
    """Verify the two-sided comparison between int f(h), ||h||_LlogL and ||h||_L1.

    Upper bound: int f(h) <= 1 + ||h|| + ||h||_L1 * ln(1 + ||h||).
    Lower bound: ||h|| <= 1 + int f(h) + ln(1+e^2) * ||h||_L1.
    Both slacks (rhs - lhs) are returned and must be >= -quadrature tolerance.
    """
    if np.any(h.samples < 0):
        raise ValueError("check_llogl_bounds expects a nonnegative function")
    entropy_integral = float(trapezoid(entropy_f(h.samples), h.dx))
    llogl = norm_llogl(h).value
    l1 = h.l1_norm()
    entropy_slack = 1.0 + llogl + l1 * np.log1p(llogl) - entropy_integral
    norm_slack = 1.0 + entropy_integral + np.log(1.0 + np.e**2) * l1 - llogl
    return ZygmundBoundsReport(entropy_integral, llogl, l1, entropy_slack, norm_slack)


@dataclass(frozen=True)
class HolderReport:
    """Products and norms entering ||hg||_L1 <= 2 ||h||_EXP ||g||_LlogL."""

    product_l1: float
    exp_norm: float
    llogl_norm: float
    slack: float

    @property
    def satisfied(self) -> bool:
        return self.slack >= -1e-9


def check_holder(h: ScalarGridFunction, g: ScalarGridFunction) -> HolderReport:
    """Verify the generalized Hoelder inequality for an EXP/LlogL pair."""
    if not h.same_grid(g):
        raise ValueError("check_holder requires both functions on the same grid")
    product_l1 = float(trapezoid(np.abs(h.samples * g.samples), h.dx))
    exp_n = norm_exp(h).value
    llogl_n = norm_llogl(g).value
    slack = 2.0 * exp_n * llogl_n - product_l1
    return HolderReport(product_l1, exp_n, llogl_n, slack)
