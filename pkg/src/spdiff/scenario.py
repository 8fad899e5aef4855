"""Scenario: every physical input of a single-pulse simulation in internal units."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .dilaton import AMPLITUDE_LIMIT, MASS_DEFECT_LIMIT, AtomSpecies, DilatonField
from .elimination import EffectiveTwoLevel, direct_transition_mode, effective_two_level
from .errors import InvalidInputError
from .threelevel import ELIMINATION_LIMIT, LaserField

TRANSITIONS = ("magnetic", "direct")


@dataclass(frozen=True)
class Channels:
    """Independent on/off switches for each perturbation.

    ``wave_vector`` covers every chirp- and gravity-induced change of the
    transferred momentum; ``chirp`` sets the chirp rate itself to zero.
    """

    mass_defect: bool = True
    dark_matter: bool = True
    eep: bool = True
    wave_vector: bool = True
    chirp: bool = True
    stark: bool = True

    @classmethod
    def none(cls, **on: bool) -> "Channels":
        """All perturbations off except the ones passed as ``True``."""
        values = {f.name: False for f in fields(cls)}
        values.update(on)
        return cls(**values)

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


@dataclass(frozen=True)
class Scenario:
    """Atom, laser, dilaton, gravity and channel switches.

    The laser must satisfy the dispersion relation ``k c = omega_L``; use
    :func:`spdiff.resonance.tuned` to choose the resonant laser frequency.
    """

    species: AtomSpecies
    laser: LaserField
    dilaton: DilatonField = DilatonField()
    gravity: float = 0.0
    speed_of_light: float = 1e4
    resonant_momentum: float = 0.0
    channels: Channels = Channels()
    transition: str = "magnetic"
    strict: bool = False
    mass_defect_limit: float = MASS_DEFECT_LIMIT
    amplitude_limit: float = AMPLITUDE_LIMIT
    elimination_limit: float = ELIMINATION_LIMIT

    def __post_init__(self):
        if self.transition not in TRANSITIONS:
            raise InvalidInputError(f"transition must be one of {TRANSITIONS}, got {self.transition!r}")
        if not (math.isfinite(self.speed_of_light) and self.speed_of_light > 0):
            raise InvalidInputError("speed of light must be positive")
        self.laser.check_dispersion(self.speed_of_light)
        if self.effective.rabi == 0:
            raise InvalidInputError("effective Rabi frequency vanishes")

    def guard_status(self) -> dict[str, bool]:
        """Evaluate every regime guard, warning or raising per ``strict``."""
        status = {
            "dilaton_amplitude": self.dilaton.check_regime(self.strict, self.amplitude_limit),
        }
        if self.channels.mass_defect:
            status["mass_defect"] = self.species.check_regime(self.c, self.strict, self.mass_defect_limit)
        if self.transition == "magnetic":
            status["elimination"] = self.laser.check_elimination(self.strict, self.elimination_limit)
        return status

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def with_channels(self, **changes) -> "Scenario":
        return replace(self, channels=replace(self.channels, **changes))

    @property
    def c(self) -> float:
        return self.speed_of_light

    @property
    def g(self) -> float:
        return self.gravity

    @property
    def k(self) -> float:
        return self.laser.wavenumber

    @property
    def mass(self) -> float:
        return self.species.mass

    @property
    def alpha(self) -> float:
        """Chirp rate with the chirp switch applied."""
        return self.laser.chirp_rate if self.channels.chirp else 0.0

    @property
    def recoil_frequency(self) -> float:
        return self.k**2 / (2.0 * self.mass)

    @property
    def recoil_velocity(self) -> float:
        return self.k / self.mass

    @property
    def mean_frequency(self) -> float:
        return self.species.mean_frequency(self.c)

    @property
    def mass_defect_ratio(self) -> float:
        """``omega_eg / omega_bar`` with the mass-defect switch applied."""
        return self.species.mass_defect_ratio(self.c) if self.channels.mass_defect else 0.0

    @property
    def two_level_detuning(self) -> float:
        """``omega_eg - omega_L``."""
        return self.species.transition_frequency - self.laser.frequency

    @property
    def effective(self) -> EffectiveTwoLevel:
        laser = self.laser
        if self.transition == "direct":
            return direct_transition_mode(laser.electric_rabi)
        eff = effective_two_level(laser.electric_rabi, laser.magnetic_rabi, laser.ancilla_detuning)
        if not self.channels.stark:
            eff = EffectiveTwoLevel(rabi=eff.rabi)
        return eff

    @property
    def rabi(self) -> float:
        return self.effective.rabi

    @property
    def pi_time(self) -> float:
        """Duration of a mirror pulse."""
        return math.pi / abs(self.rabi)

    def rest_mass(self, state: str) -> float:
        """Mass of a state at vanishing dilaton, with the mass-defect switch applied."""
        if not self.channels.mass_defect:
            return self.mass
        if state == "a":
            return self.mass + (0.5 * self.laser.frequency + self.laser.ancilla_detuning) / self.c**2
        return self.species.rest_mass(state, self.c)
