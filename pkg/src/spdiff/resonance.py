"""Mean Heisenberg picture, resonance condition and the time-polynomial detuning.

In the mean Heisenberg picture the center of mass follows the unperturbed
free-fall trajectory. The residual detuning and mean energy along that
trajectory are cubic polynomials in time once the dark-matter field is frozen
at the start of the pulse.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dilaton import dm_value
from .elimination import effective_two_level
from .errors import DispersionError

MAX_FIXED_POINT_ITERATIONS = 20


@dataclass(frozen=True)
class HeisenbergTrajectory:
    """Unperturbed free-fall trajectory starting at ``(z, p)``."""

    z: float
    p: float
    mass: float
    g: float

    def momentum(self, t):
        return self.p - self.mass * self.g * t

    def position(self, t):
        return self.z + self.p * t / self.mass - 0.5 * self.g * t**2


def resonant_laser_frequency(species, laser, p_r: float, c: float, stark: bool = True) -> float:
    """Laser frequency resonant with momentum ``p_r``, consistent with ``k = omega_L / c``.

    Solves ``omega_L = omega_eg + (omega_L / c) p_r / m + diff_stark`` by
    fixed-point iteration.
    """
    diff_stark = 0.0
    if stark:
        diff_stark = effective_two_level(laser.electric_rabi, laser.magnetic_rabi, laser.ancilla_detuning).diff_stark
    base = species.transition_frequency + diff_stark
    omega = base
    for _ in range(MAX_FIXED_POINT_ITERATIONS):
        updated = base + omega * p_r / (species.mass * c)
        if abs(updated - omega) <= 4 * np.spacing(abs(updated)):
            return updated
        omega = updated
    raise DispersionError(f"resonant laser frequency did not converge in {MAX_FIXED_POINT_ITERATIONS} iterations")


def tuned(scenario, offset: float = 0.0):
    """Scenario with the laser set to the resonant frequency plus ``offset``."""
    stark = scenario.channels.stark and scenario.transition == "magnetic"
    omega = resonant_laser_frequency(
        scenario.species, scenario.laser, scenario.resonant_momentum, scenario.c, stark=stark
    )
    return replace(scenario, laser=scenario.laser.with_frequency(omega + offset, scenario.c))


def _dilaton_along(scenario, z, z_start, t, frozen_dm: bool):
    # A frozen dark-matter field is read at the start of the pulse and of the trajectory.
    ch = scenario.channels
    dm = ep = 0.0
    if ch.dark_matter:
        dm = dm_value(scenario.dilaton, z_start, 0.0) if frozen_dm else dm_value(scenario.dilaton, z, t)
    if ch.eep:
        ep = scenario.dilaton.eep_coefficient * scenario.g * z / scenario.c**2
    return dm + ep


def heisenberg_detuning(scenario, z, p, t, frozen_dm: bool = False):
    """Effective detuning along the free-fall trajectory starting at ``(z, p)``."""
    s = scenario
    k, m, g, c, a = s.k, s.mass, s.g, s.c, s.alpha
    traj = HeisenbergTrajectory(z, p, m, g)
    p_h, z_h = traj.momentum(t), traj.position(t)
    r = s.mass_defect_ratio
    nu = (
        s.two_level_detuning + k * p / m + s.effective.diff_stark
        - k * (a + g) * t
        + r * (m * g * z_h - p_h**2 / (2 * m) - s.recoil_frequency / 4)
        + s.mean_frequency * s.species.delta_beta * _dilaton_along(s, z_h, z, t, frozen_dm)
    )
    if s.channels.wave_vector:
        nu = nu + k * a * z_h / c + (k * p_h / m) * (a * t / c - (g + a) * z_h / c**2)
    return nu


def heisenberg_mean_energy(scenario, z, p, t, frozen_dm: bool = False):
    """Mean energy shift along the free-fall trajectory starting at ``(z, p)``."""
    s = scenario
    k, m, g, c, a = s.k, s.mass, s.g, s.c, s.alpha
    traj = HeisenbergTrajectory(z, p, m, g)
    p_h, z_h = traj.momentum(t), traj.position(t)
    nub = (
        s.mean_frequency * s.species.mean_beta * _dilaton_along(s, z_h, z, t, frozen_dm)
        - k * p_h / (4 * m) * s.mass_defect_ratio
    )
    if s.channels.wave_vector:
        nub = nub + 0.5 * s.recoil_frequency * (a * t / c + (0.5 * a**2 * t**2 - (g + a) * z_h) / c**2)
    return nub


@dataclass(frozen=True)
class PolynomialDetuning:
    """Coefficients of ``nu_H = sum_j detuning[j] t**j`` and the mean energy.

    Coefficients may be arrays when the phase-space point is an array.
    """

    detuning: tuple
    mean: tuple
    resonant_momentum: float
    laser_frequency: float

    def detuning_at(self, t):
        return sum(c * t**j for j, c in enumerate(self.detuning))

    def mean_at(self, t):
        return sum(c * t**j for j, c in enumerate(self.mean))

    def mean_integral(self, t):
        """``sum_j mean[j] t**(j+1) / (j+1)``."""
        return sum(c * t ** (j + 1) / (j + 1) for j, c in enumerate(self.mean))


def detuning_polynomial(scenario, z, p, uncorrected: bool = False) -> PolynomialDetuning:
    """Time-polynomial coefficients of detuning and mean energy at ``(z, p)``.

    With ``uncorrected=True`` three coefficients take a variant that disagrees
    with the Taylor expansion of the Heisenberg detuning.
    """
    s = scenario
    k, m, g, c, a = s.k, s.mass, s.g, s.c, s.alpha
    ch = s.channels
    r = s.mass_defect_ratio
    wk = s.recoil_frequency
    wbar = s.mean_frequency
    db, bb = s.species.delta_beta, s.species.mean_beta
    b_s = s.dilaton.eep_coefficient if ch.eep else 0.0
    rho_dm = dm_value(s.dilaton, z, 0.0) if ch.dark_matter else 0.0 * z
    nu_k = k * p / m
    wv = 1.0 if ch.wave_vector else 0.0

    nu0 = (
        s.two_level_detuning + nu_k + s.effective.diff_stark
        + wv * k * a * z / c
        + r * (m * g * z - p**2 / (2 * m) - wk / 4)
        + wbar * db * rho_dm + wbar * db * b_s * g * z / c**2
        - wv * nu_k * (g + a) * z / c**2
    )
    nu1 = (
        -k * (g + a) * (1 + wv * (p**2 / (m**2 * c**2) - g * z / c**2))
        + wv * 2 * nu_k * a / c
        + (2 * r + db * b_s) * g * p
    )
    doppler_redshift = 1.0 if uncorrected else 1.5
    nu2 = (
        wv * (-1.5 * k * g * a / c + doppler_redshift * nu_k * g * (g + a) / c**2)
        - r * m * g**2
        - wbar * db * b_s * g**2 / (2 * c**2)
    )
    nu3 = -wv * k * (g + a) * g**2 / c**2 * (1.0 if uncorrected else 0.5)

    mean0 = (
        wbar * bb * rho_dm + wbar * bb * b_s * g * z / c**2
        - k * p / (4 * m) * r
        - wv * 0.5 * wk * (g + a) * z / c**2
    )
    mean1 = bb * b_s * g * p + k * g / 4 * r + wv * 0.5 * wk * (a / c - (g + a) * p / (m * c**2))
    chirp_square = 1.0 if uncorrected else 0.5
    mean2 = -wbar * bb * b_s * g**2 / (2 * c**2) + wv * 0.5 * wk * (chirp_square * a**2 + 0.5 * (g + a) * g) / c**2
    mean3 = 0.0 * mean2

    return PolynomialDetuning(
        detuning=(nu0, nu1, nu2, nu3),
        mean=(mean0, mean1, mean2, mean3),
        resonant_momentum=s.resonant_momentum,
        laser_frequency=s.laser.frequency,
    )


def doppler_slope(scenario, z, p):
    """Part of the linear detuning coefficient driven by uncompensated free fall.

    Vanishes exactly for ``alpha = -g`` and is linear in ``g + alpha``.
    """
    s = scenario
    wv = 1.0 if s.channels.wave_vector else 0.0
    return -s.k * (s.g + s.alpha) * (1 + wv * (p**2 / (s.mass**2 * s.c**2) - s.g * z / s.c**2))


def ordering_cross_terms(scenario) -> tuple[tuple, tuple]:
    """Coefficients of the symmetrized product ``(z p + p z)/2`` per order.

    Only these terms are sensitive to operator ordering; everything else in
    the coefficients is a sum of a function of ``z`` and a function of ``p``.
    """
    s = scenario
    cross = 0.0
    if s.channels.wave_vector:
        cross = -s.k * (s.g + s.alpha) / (s.mass * s.c**2)
    return (cross, 0.0, 0.0, 0.0), (0.0, 0.0, 0.0, 0.0)


def tuned_to_packet(scenario, ground_momentum: float, offset: float = 0.0):
    """Tune the laser so that a ground packet at ``ground_momentum`` is resonant.

    The resonant momentum ``ground_momentum + k/2`` depends on the photon
    momentum, which in turn follows the laser frequency; both are iterated to
    a common fixed point.
    """
    s = scenario
    for _ in range(MAX_FIXED_POINT_ITERATIONS):
        updated = tuned(s.with_(resonant_momentum=ground_momentum + 0.5 * s.k), offset)
        if abs(updated.laser.frequency - s.laser.frequency) <= 4 * np.spacing(abs(updated.laser.frequency)):
            return updated
        s = updated
    raise DispersionError(f"packet resonance did not converge in {MAX_FIXED_POINT_ITERATIONS} iterations")
