"""Exception and warning types shared across the package, plus the guard helper.

Regime guards are soft by default: a violated guard emits a
:class:`RegimeWarning` and the computation proceeds. Under a strict policy the
same violation raises :class:`RegimeError` instead.
"""

from __future__ import annotations

import warnings


class SpdiffError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(SpdiffError, ValueError):
    """An argument is outside the domain accepted by an operation."""


class UndefinedRatioError(InvalidInputError):
    """A ratio of phases was requested while its denominator vanishes."""


class RegimeError(SpdiffError):
    """A perturbative-regime guard failed under a strict policy."""


class DispersionError(SpdiffError):
    """Laser wave number and frequency are inconsistent with ``k c = omega_L``."""


class ConvergenceError(SpdiffError):
    """An iterative or step-halving procedure did not converge."""


class BoundaryLeakError(SpdiffError):
    """A wave packet reached the edge of the simulation grid."""


class ConfigError(SpdiffError, ValueError):
    """A scenario configuration failed schema validation."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class RegimeWarning(UserWarning):
    """A perturbative-regime guard failed under the default soft policy."""


def guard(condition: bool, message: str, strict: bool = False) -> bool:
    """Check a regime condition, warning or raising when it does not hold.

    Returns ``condition`` so callers can record guard statuses.
    """
    if condition:
        return True
    if strict:
        raise RegimeError(message)
    warnings.warn(message, RegimeWarning, stacklevel=3)
    return False
