"""Dilaton field and dilaton-dependent atomic masses including the mass defect.

All quantities are in the internal unit system (``hbar = 1``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, RegimeError, guard

AMPLITUDE_LIMIT = 1e-2
MASS_DEFECT_LIMIT = 1e-3


@dataclass(frozen=True)
class DilatonField:
    """Oscillating dark-matter part plus the EEP-violating gradient part.

    The field is ``amplitude * cos(frequency*t - wavenumber*z + phase)``
    plus ``eep_coefficient * g * z / c**2``.
    """

    amplitude: float = 0.0
    frequency: float = 0.0
    wavenumber: float = 0.0
    phase: float = 0.0
    eep_coefficient: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise InvalidInputError("dilaton amplitude must be non-negative")
        if self.frequency < 0 or self.wavenumber < 0:
            raise InvalidInputError("dilaton frequency and wave number must be non-negative")

    def check_regime(self, strict: bool = False, amplitude_limit: float = AMPLITUDE_LIMIT) -> bool:
        return guard(
            self.amplitude < amplitude_limit,
            f"dilaton amplitude {self.amplitude:g} is not small (limit {amplitude_limit:g})",
            strict,
        )


def dm_value(field: DilatonField, z, t):
    """Dark-matter part of the field at ``(z, t)``."""
    return field.amplitude * np.cos(field.frequency * t - field.wavenumber * z + field.phase)


def ep_value(field: DilatonField, z, g: float, c: float):
    """EEP-violating gradient part of the field at height ``z``."""
    return field.eep_coefficient * g * z / c**2


def field_value(field: DilatonField, z, t, g: float, c: float):
    """Total dilaton field at ``(z, t)``."""
    return dm_value(field, z, t) + ep_value(field, z, g, c)


def dm_frozen_value(field: DilatonField, z):
    """Dark-matter part frozen at the start of the pulse, ``t = 0``."""
    return dm_value(field, z, 0.0)


@dataclass(frozen=True)
class AtomSpecies:
    """Two-level atom (plus ancilla) with mass defect and dilaton couplings.

    Parameters
    ----------
    mass : float
        Mean mass of the two states.
    transition_frequency : float
        Internal energy difference ``omega_eg`` between excited and ground state.
    beta_e, beta_g : float
        Linear dilaton couplings of the two state masses.
    beta_a : float, optional
        Dilaton coupling of the ancilla. Defaults to the mean of ``beta_e`` and
        ``beta_g``.
    """

    mass: float
    transition_frequency: float
    beta_e: float = 0.0
    beta_g: float = 0.0
    beta_a: float | None = None

    def __post_init__(self):
        if not self.mass > 0:
            raise InvalidInputError("mean mass must be positive")

    @property
    def delta_beta(self) -> float:
        return self.beta_e - self.beta_g

    @property
    def mean_beta(self) -> float:
        return 0.5 * (self.beta_e + self.beta_g)

    @property
    def ancilla_beta(self) -> float:
        return self.mean_beta if self.beta_a is None else self.beta_a

    def mean_frequency(self, c: float) -> float:
        """Compton frequency of the mean mass, ``m c**2 / hbar``."""
        return self.mass * c**2

    def mass_defect_ratio(self, c: float) -> float:
        """``omega_eg / omega_bar``."""
        return self.transition_frequency / self.mean_frequency(c)

    def rest_mass(self, state: str, c: float) -> float:
        """Mass of a state at vanishing dilaton field."""
        if state == "e":
            return self.mass + 0.5 * self.transition_frequency / c**2
        if state == "g":
            return self.mass - 0.5 * self.transition_frequency / c**2
        raise InvalidInputError(f"state must be 'e' or 'g', got {state!r}")

    def check_regime(self, c: float, strict: bool = False, ratio_limit: float = MASS_DEFECT_LIMIT) -> bool:
        ratio = abs(self.mass_defect_ratio(c))
        return guard(
            ratio < ratio_limit,
            f"mass-defect ratio {ratio:g} is not small (limit {ratio_limit:g})",
            strict,
        )


def state_mass(species: AtomSpecies, state: str, rho, c: float):
    """Dilaton-dependent mass ``m_j(0) * (1 + beta_j * rho)`` of state ``j``."""
    if np.any(np.abs(rho) >= 1):
        raise RegimeError("dilaton field magnitude must stay below 1")
    beta = species.beta_e if state == "e" else species.beta_g
    return species.rest_mass(state, c) * (1.0 + beta * rho)
