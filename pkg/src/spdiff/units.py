"""Unit system and nondimensionalization.

Internally every quantity is dimensionless with ``hbar = 1``. Time is measured
in units of ``time_scale`` (typically ``1/Omega``) and length in units of
``length_scale`` (typically ``1/k``). Because ``hbar = 1`` the momentum scale
is not independent: it equals ``hbar / length_scale``, i.e. ``hbar k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants

from .errors import InvalidInputError

STANDARD_GRAVITY = constants.g

# Exponents (time, length, mass) of each supported dimension tag, in SI.
_DIMENSIONS = {
    "time": (1, 0, 0),
    "length": (0, 1, 0),
    "momentum": (-1, 1, 1),
    "frequency": (-1, 0, 0),
    "acceleration": (-2, 1, 0),
    "velocity": (-1, 1, 0),
    "mass": (0, 0, 1),
    "wavenumber": (0, -1, 0),
    "phase": (0, 0, 0),
}

DIMENSION_TAGS = tuple(_DIMENSIONS)


@dataclass(frozen=True)
class UnitSystem:
    """Characteristic scales used to map SI quantities to internal numbers.

    Parameters
    ----------
    time_scale : float
        Seconds per internal time unit.
    length_scale : float
        Meters per internal length unit.
    speed_of_light : float
        Speed of light in m/s. May be reduced below the physical value to
        amplify relativistic corrections.
    grav_accel : float
        Gravitational acceleration in m/s^2.
    hbar : float
        Reduced Planck constant in J s.
    """

    time_scale: float
    length_scale: float
    speed_of_light: float = constants.c
    grav_accel: float = STANDARD_GRAVITY
    hbar: float = constants.hbar

    def __post_init__(self):
        for name in ("time_scale", "length_scale", "speed_of_light", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be positive and finite, got {value!r}")
        if not math.isfinite(self.grav_accel) or self.grav_accel < 0:
            raise InvalidInputError(f"grav_accel must be finite and non-negative, got {self.grav_accel!r}")

    @classmethod
    def natural(cls, rabi_frequency: float, wavenumber: float, **kwargs) -> "UnitSystem":
        """Scales set by a Rabi frequency (rad/s) and a wave number (rad/m)."""
        if rabi_frequency == 0 or wavenumber <= 0:
            raise InvalidInputError("rabi_frequency must be nonzero and wavenumber positive")
        return cls(time_scale=1.0 / abs(rabi_frequency), length_scale=1.0 / wavenumber, **kwargs)

    @property
    def mass_scale(self) -> float:
        """Kilograms per internal mass unit, fixed by ``hbar = 1``."""
        return self.hbar * self.time_scale / self.length_scale**2

    @property
    def momentum_scale(self) -> float:
        """kg m/s per internal momentum unit (``hbar / length_scale``)."""
        return self.hbar / self.length_scale

    def scale(self, kind: str) -> float:
        """SI value of one internal unit of the given dimension."""
        try:
            t_exp, l_exp, m_exp = _DIMENSIONS[kind]
        except KeyError:
            raise InvalidInputError(
                f"unknown dimension tag {kind!r}; expected one of {', '.join(DIMENSION_TAGS)}"
            ) from None
        return self.time_scale**t_exp * self.length_scale**l_exp * self.mass_scale**m_exp

    def nondimensionalize(self, value, kind: str):
        """Convert an SI quantity to an internal dimensionless number."""
        return value / self.scale(kind)

    def redimensionalize(self, value, kind: str):
        """Convert an internal dimensionless number back to SI."""
        return value * self.scale(kind)

    @property
    def c(self) -> float:
        """Speed of light in internal units."""
        return self.nondimensionalize(self.speed_of_light, "velocity")

    @property
    def g(self) -> float:
        """Gravitational acceleration in internal units."""
        return self.nondimensionalize(self.grav_accel, "acceleration")
