"""Laser field, laser phase and the rotating-frame three-level Hamiltonian.

Operators are represented as c-number functions of a phase-space point
``(z, p)`` and time ``t``. All functions accept NumPy arrays and broadcast.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dilaton import dm_value, ep_value
from .errors import DispersionError, InvalidInputError, UndefinedRatioError, guard

ELIMINATION_LIMIT = 0.1
DISPERSION_TOLERANCE = 1e-12


@dataclass(frozen=True)
class LaserField:
    """Chirped optical field plus the static magnetic coupling.

    Parameters
    ----------
    wavenumber, frequency : float
        Wave number ``k`` and angular frequency ``omega_L``; must satisfy
        ``k c = omega_L``, which is checked by :meth:`check_dispersion`.
    chirp_rate : float
        Chirp ``alpha`` in units of an acceleration; ``alpha = -g``
        compensates the free-fall Doppler shift.
    phase_offset : float
        Laser phase offset.
    electric_rabi, magnetic_rabi : float
        Rabi frequencies of the ancilla couplings to ground and excited state.
        In direct mode ``electric_rabi`` is the two-level Rabi frequency.
    ancilla_detuning : float
        Detuning of the ancilla from the two-photon-free virtual level.
    """

    wavenumber: float
    frequency: float
    chirp_rate: float = 0.0
    phase_offset: float = 0.0
    electric_rabi: float = 1.0
    magnetic_rabi: float = 1.0
    ancilla_detuning: float = 100.0

    @classmethod
    def from_frequency(cls, frequency: float, c: float, **kwargs) -> "LaserField":
        """Laser whose wave number follows from the dispersion relation."""
        return cls(wavenumber=frequency / c, frequency=frequency, **kwargs)

    def with_frequency(self, frequency: float, c: float) -> "LaserField":
        return replace(self, wavenumber=frequency / c, frequency=frequency)

    def check_dispersion(self, c: float) -> None:
        mismatch = abs(self.wavenumber * c - self.frequency)
        if not mismatch <= DISPERSION_TOLERANCE * abs(self.frequency):
            raise DispersionError(
                f"k c = {self.wavenumber * c!r} differs from omega_L = {self.frequency!r}"
            )

    def check_elimination(self, strict: bool = False, limit: float = ELIMINATION_LIMIT) -> bool:
        if self.ancilla_detuning == 0:
            raise InvalidInputError("ancilla detuning must be nonzero")
        ratio = max(abs(self.electric_rabi), abs(self.magnetic_rabi)) / abs(self.ancilla_detuning)
        return guard(ratio < limit, f"coupling/ancilla-detuning ratio {ratio:g} exceeds {limit:g}", strict)


def laser_phase(laser: LaserField, z, t, g: float, c: float):
    """Spacetime phase of the chirped, gravitationally redshifted field."""
    k, a = laser.wavenumber, laser.chirp_rate
    spatial = k * z * (1.0 + a * t / c - (g + a) * z / (2.0 * c**2))
    return spatial - laser.phase_offset - laser.frequency * t * (1.0 + a * t / (2.0 * c))


def laser_phase_rate(laser: LaserField, z, t, c: float):
    """Time derivative of :func:`laser_phase`."""
    k, a = laser.wavenumber, laser.chirp_rate
    return k * z * a / c - laser.frequency * (1.0 + a * t / c)


def rwa_validity(laser: LaserField, z, t, c: float):
    """Ratio of the laser phase rate to the electric Rabi frequency.

    Values of order ten or below signal that the rotating-wave approximation
    is suspect.
    """
    if laser.electric_rabi == 0:
        raise UndefinedRatioError("RWA ratio undefined for vanishing electric Rabi frequency")
    return np.abs(laser_phase_rate(laser, z, t, c)) / abs(laser.electric_rabi)


def momentum_displacement(scenario, z, t):
    """Half the local, time-dependent momentum transfer ``kappa(z, t)``."""
    k = scenario.k
    if not scenario.channels.wave_vector:
        return 0.5 * k * np.ones(np.broadcast(z, t).shape)
    a, g, c = scenario.alpha, scenario.g, scenario.c
    return 0.5 * k * (1.0 + a * t / c - (g + a) * z / c**2)


def dilaton_field(scenario, z, t):
    """Dilaton field with the dark-matter and EEP channels applied."""
    rho = 0.0
    if scenario.channels.dark_matter:
        rho = rho + dm_value(scenario.dilaton, z, t)
    if scenario.channels.eep:
        rho = rho + ep_value(scenario.dilaton, z, scenario.g, scenario.c)
    return rho


def _chirp_term(scenario, z, t):
    # Chirp shifts the excited/ancilla and ground energies by +/- this amount.
    k, a, c = scenario.k, scenario.alpha, scenario.c
    position = z / c if scenario.channels.wave_vector else 0.0
    return 0.5 * k * a * (position - t)


def state_energy(scenario, state: str, z, p, t):
    """Rotating-frame kinetic, potential and rest-energy block of one state.

    This is the c-number ``nu_j(z, p, t)``: the state Hamiltonian evaluated at
    the displaced momentum, minus the bare internal frequency, plus the chirp
    term.
    """
    rest = scenario.rest_mass(state)
    beta = {"e": scenario.species.beta_e, "g": scenario.species.beta_g, "a": scenario.species.ancilla_beta}[state]
    rho = dilaton_field(scenario, z, t)
    mass = rest * (1.0 + beta * rho)
    kappa = momentum_displacement(scenario, z, t)
    shifted = p - kappa if state == "g" else p + kappa
    sign = -1.0 if state == "g" else 1.0
    c2 = scenario.c**2
    return (
        rest * c2 * beta * rho
        + shifted**2 / (2.0 * mass)
        + mass * scenario.g * z
        + sign * _chirp_term(scenario, z, t)
    )


def build_rotating_hamiltonian(scenario, z, p, t):
    """Three-level rotating-frame Hamiltonian in the basis (a, e, g).

    Returns an array of shape ``broadcast(z, p, t).shape + (3, 3)``.
    """
    laser = scenario.laser
    nu_a = state_energy(scenario, "a", z, p, t)
    nu_e = state_energy(scenario, "e", z, p, t)
    nu_g = state_energy(scenario, "g", z, p, t)
    shape = np.broadcast(nu_a, nu_e, nu_g).shape
    h = np.zeros(shape + (3, 3), dtype=complex)
    delta = scenario.two_level_detuning
    h[..., 0, 0] = nu_a + laser.ancilla_detuning
    h[..., 1, 1] = nu_e + 0.5 * delta
    h[..., 2, 2] = nu_g - 0.5 * delta
    h[..., 0, 1] = h[..., 1, 0] = 0.5 * laser.magnetic_rabi
    h[..., 0, 2] = h[..., 2, 0] = 0.5 * laser.electric_rabi
    return h


def ancilla_frequency(scenario) -> float:
    """Ancilla frequency implied by the stored ancilla detuning."""
    return scenario.mean_frequency + 0.5 * scenario.laser.frequency + scenario.laser.ancilla_detuning

