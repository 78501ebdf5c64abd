"""Exception hierarchy shared by the solver, profile and report layers."""


class CalabiError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CalabiError, ValueError):
    """Parameters outside the admissible region (non-positive m, cone angle, ...)."""


class IntegrationError(CalabiError, RuntimeError):
    """The integrator could not finish (step budget exhausted, step underflow)."""


class SolverError(CalabiError, RuntimeError):
    """Shooting failed: no bracket, non-monotone residual, or no convergence.

    ``history`` keeps the probe log so callers can report what was tried.
    """

    def __init__(self, message: str, history=None):
        super().__init__(message)
        self.history = list(history or [])


class ProfileError(CalabiError, ValueError):
    """A momentum profile was requested from an unusable trajectory."""


class ReconstructionError(CalabiError, ArithmeticError):
    """Potential reconstruction hit a non-positive profile or a bad quadrature."""


class NumericError(CalabiError, ArithmeticError):
    """A quadrature produced a non-finite value."""
