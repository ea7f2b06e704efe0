"""Exception hierarchy shared by the solver and the CLI."""


class DiaghypError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(DiaghypError):
    """Invalid run configuration (schema violation or inconsistent numerics)."""


class CflViolationError(DiaghypError):
    """Requested time step exceeds the advective/diffusive stability bound."""

    def __init__(self, dt, bound):
        super().__init__(
            f"time step dt={dt:.6g} violates the CFL bound "
            f"min(dx/max|velocity|, dx^2/(2 eps)) = {bound:.6g}"
        )
        self.dt = dt
        self.bound = bound


class NumericalAbortError(DiaghypError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, t, last_good):
        super().__init__(f"non-finite state detected at t={t:.6g}; aborting")
        self.t = t
        self.last_good = last_good


class DomainContaminationError(DiaghypError):
    """Sentinel cells near the truncated boundary changed during the run."""

    def __init__(self, max_change, tol):
        super().__init__(
            f"boundary sentinel cells moved by {max_change:.3e} "
            f"(tolerance {tol:.1e}); the truncated domain is too small"
        )
        self.max_change = max_change
        self.tol = tol


class BoxViolationError(DiaghypError):
    """A state left the admissible box; indicates a scheme or setup bug."""
