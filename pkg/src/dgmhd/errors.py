"""Exception types shared across the solver."""


class SolverError(Exception):
    """Base class for every failure raised by this package."""


class NonPositiveDensity(SolverError):
    """Density was zero or negative where a positive value is required."""


class NegativePressure(SolverError):
    """Recovered thermal pressure was zero or negative."""


class NonFiniteResidual(SolverError):
    """A quadrature-point state broke down during residual assembly.

    Raised when a state is non-finite or has nonpositive density, which makes
    flux evaluation meaningless.  Carries the offending cell index (ix, iy)
    and, when raised inside a Runge-Kutta stage, the 1-based stage number.
    """

    def __init__(self, message, cell=None, stage=None):
        super().__init__(message)
        self.cell = cell
        self.stage = stage

    def __str__(self):
        base = super().__str__()
        extra = []
        if self.cell is not None:
            extra.append(f"cell={self.cell}")
        if self.stage is not None:
            extra.append(f"stage={self.stage}")
        if extra:
            return f"{base} [{', '.join(extra)}]"
        return base


class NonFiniteSpeed(SolverError):
    """Wave-speed estimate came out NaN or infinite."""


class InadmissibleInitialData(SolverError):
    """Initial condition produced rho <= 0 or p <= 0 at a sample point."""


class NonPositiveError(SolverError):
    """Convergence orders need strictly positive error inputs."""
