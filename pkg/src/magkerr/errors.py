"""Exception types shared across the package."""

from __future__ import annotations


class MagkerrError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(MagkerrError, ValueError):
    """Invalid, inconsistent, or incomplete model/sweep configuration."""


class SolverError(MagkerrError, RuntimeError):
    """Mean-field solver failed to converge.

    Carries the best iterate found so far in ``best`` so callers can
    inspect how far the solve got.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class StabilityError(MagkerrError, ValueError):
    """An operation required a stable drift matrix and got an unstable one."""


class NumericalError(MagkerrError, RuntimeError):
    """A numerical routine lost accuracy or failed to converge."""


class PhysicalityError(MagkerrError, ValueError):
    """A covariance matrix violates the bosonic uncertainty bound."""


class IntegrationError(NumericalError):
    """Transient integration overflowed or produced non-finite values."""


class SqueezeDomainError(MagkerrError, ValueError):
    """Two-mode squeezing frame is undefined for the given coefficients."""
