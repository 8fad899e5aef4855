"""Closed-form mirror-pulse phase budget for Gaussian packets.

The phase difference between the ground-to-excited and excited-to-ground
diffracted packets splits into an unperturbed line and one line per
perturbation channel. Each line is switched off together with its channel.

Three closed forms have variants that disagree with the first-order
propagator and the grid oracle. The default is the form that agrees; the
other is kept behind ``uncorrected=True`` for comparison.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import InvalidInputError, UndefinedRatioError, guard
from .packets import GaussianWavePacket

__all__ = [
    "GaussianWavePacket",
    "PhaseBudget",
    "mirror_phase_budget",
    "unperturbed_phase",
    "dm_phase",
    "ep_phase",
    "md_phase",
    "wv_phase_perfect",
    "wv_phase_general",
    "wv_md_ratio",
    "width_terms",
    "is_perfect_chirp",
]

LINES = ("phi0", "phi_dm", "phi_ep", "phi_md", "phi_wv")
PERFECT_CHIRP_TOLERANCE = 1e-12
WIDTH_LIMIT = 0.1


@dataclass(frozen=True)
class PhaseBudget:
    phi0: float
    phi_dm: float
    phi_ep: float
    phi_md: float
    phi_wv: float
    chirp_perfect: bool

    @property
    def total(self) -> float:
        return self.phi0 + self.phi_dm + self.phi_ep + self.phi_md + self.phi_wv

    def as_dict(self) -> dict:
        out = asdict(self)
        out["total"] = self.total
        return out


def _mirror_time(scenario, t):
    return scenario.pi_time if t is None else t


def _separation(scenario, p, t):
    """Classical displacement combination ``p t/m + v_r t/2 + g t^2/2``."""
    return p * t / scenario.mass + 0.5 * scenario.recoil_velocity * t + 0.5 * scenario.g * t**2


def _doppler_redshift(scenario, p, t):
    """``(g / v_r)(k p/m + omega_k + k g t/2)``, written without the division."""
    return scenario.g * (p + 0.5 * scenario.k + 0.5 * scenario.mass * scenario.g * t)


def unperturbed_phase(packet, scenario, p: float, t: float | None = None) -> float:
    """Laser offset, momentum-transfer, separation, chirp-mismatch and clock terms."""
    s = scenario
    t = _mirror_time(s, t)
    k, a = s.k, s.alpha
    return (
        -2 * s.laser.phase_offset
        - k * (packet.mean_z + 0.5 * packet.delta_z)
        - packet.delta_z * (p + s.mass * s.g * t)
        + 2 * k * (s.g + a) / s.rabi**2
        - s.laser.frequency * (t + a * t**2 / (2 * s.c))
    )


def dm_phase(packet, scenario, p: float, t: float | None = None, uncorrected: bool = False) -> float:
    """Mean dark-matter coupling across the initial separation.

    The corrected form is ``-omega_bar beta_bar t dz d(rho_DM)/dz`` at the
    packet center ``z = -z_bar``. ``uncorrected=True`` evaluates the gradient at
    ``+z_bar`` with an additional factor of the dark-matter wave number.
    """
    s = scenario
    if not s.channels.dark_matter:
        return 0.0
    t = _mirror_time(s, t)
    f = s.dilaton
    guard(
        f.wavenumber < WIDTH_LIMIT * min(packet.sigma_e, packet.sigma_g),
        "dark-matter wave number is not small against the packet momentum widths",
        s.strict,
    )
    pref = s.mean_frequency * s.species.mean_beta * t * packet.delta_z
    if uncorrected:
        gradient = f.amplitude * f.wavenumber * math.sin(f.phase - f.wavenumber * packet.mean_z)
        return pref * gradient * f.wavenumber
    gradient = f.amplitude * f.wavenumber * math.sin(f.phase + f.wavenumber * packet.mean_z)
    return -pref * gradient


def ep_phase(packet, scenario, p: float, t: float | None = None) -> float:
    """Mean gravitational potential difference plus differential free-fall Doppler shift."""
    s = scenario
    if not s.channels.eep:
        return 0.0
    t = _mirror_time(s, t)
    b_s = s.dilaton.eep_coefficient
    sp = s.species
    return (
        -sp.mean_beta * b_s * s.mass * s.g * packet.delta_z * t
        - 2 * sp.delta_beta * b_s * _doppler_redshift(s, p, t) / s.rabi**2
    )


def md_phase(packet, scenario, p: float, t: float | None = None) -> float:
    """Asymmetric diffraction of the two mass states under gravity."""
    s = scenario
    if not s.channels.mass_defect:
        return 0.0
    t = _mirror_time(s, t)
    return -4 * s.mass_defect_ratio * _doppler_redshift(s, p, t) / s.rabi**2


def wv_phase_perfect(packet, scenario, p: float, t: float | None = None, uncorrected: bool = False) -> float:
    """Wave-vector phase for perfect chirping, ``alpha = -g``.

    ``uncorrected=True`` halves the momentum part of the pulse-area term,
    which then disagrees with the propagator and the oracle.
    """
    s = scenario
    if not s.channels.wave_vector:
        return 0.0
    t = _mirror_time(s, t)
    _check_mirror(s, t)
    k, g, c, m, v_r = s.k, s.g, s.c, s.mass, s.recoil_velocity
    first = k * g * t / c * (packet.mean_z - _separation(s, p, t))
    if uncorrected:
        area = 2 * p / m + v_r + g * t
    else:
        area = 4 * p / m + 2 * v_r + g * t
    return first + k * g / (c * s.rabi**2) * area


def wv_phase_general(packet, scenario, p: float, t: float | None = None, uncorrected: bool = False) -> float:
    """Wave-vector phase for arbitrary chirp, including the packet-width terms.

    Every term beyond the first line is proportional to ``g + alpha`` and
    vanishes for perfect chirping. ``uncorrected=True`` halves the momentum
    part of the pulse-area term in the first line.
    """
    s = scenario
    if not s.channels.wave_vector:
        return 0.0
    t = _mirror_time(s, t)
    _check_mirror(s, t)
    k, g, c, m, a = s.k, s.g, s.c, s.mass, s.alpha
    v_r, w_k, rabi2 = s.recoil_velocity, s.recoil_frequency, s.rabi**2
    zb, dz = packet.mean_z, packet.delta_z
    sep = packet.mean_z - _separation(s, p, t)
    area = (2 * p / m + v_r + g * t) if uncorrected else (4 * p / m + 2 * v_r + g * t)
    first = -k * a * t / c * sep - k * a / (c * rabi2) * area

    mismatch = g + a
    width = (
        ((packet.p_e - p - k - m * g * t) / packet.sigma_e**2) ** 2 - 1 / packet.sigma_e**2
        + ((packet.p_g - p - m * g * t) / packet.sigma_g**2) ** 2 - 1 / packet.sigma_g**2
        - sep**2 - zb**2 - 0.5 * dz**2
    )
    pulse = (
        2 * (p / (m * c) + v_r / (2 * c)) ** 2
        + p * g * t / (m * c**2) + v_r * g * t / (2 * c**2)
        + 2 * g * zb / c**2
        + (math.pi**2 - 12) / (2 * math.pi**2) * (g * t / c) ** 2
    )
    rest = k * mismatch / (2 * c**2) * width + dz * mismatch / (2 * c**2) * w_k * t + k * mismatch / rabi2 * pulse
    return first + rest


def width_terms(packet, scenario, p: float, t: float | None = None) -> float:
    """Part of the general wave-vector phase that depends on the packet widths."""
    s = scenario
    if not s.channels.wave_vector:
        return 0.0
    t = _mirror_time(s, t)
    k, g, m = s.k, s.g, s.mass
    bracket = (
        ((packet.p_e - p - k - m * g * t) / packet.sigma_e**2) ** 2 - 1 / packet.sigma_e**2
        + ((packet.p_g - p - m * g * t) / packet.sigma_g**2) ** 2 - 1 / packet.sigma_g**2
    )
    return k * (g + s.alpha) / (2 * s.c**2) * bracket


def _check_mirror(scenario, t):
    if not math.isclose(abs(scenario.rabi) * t, math.pi, rel_tol=1e-9):
        raise InvalidInputError(f"closed-form phases require a mirror pulse, got |Omega| t = {abs(scenario.rabi) * t!r}")


def is_perfect_chirp(scenario) -> bool:
    g = scenario.g
    return abs(g + scenario.alpha) <= PERFECT_CHIRP_TOLERANCE * max(abs(g), 1.0)


def mirror_phase_budget(packet, scenario, p: float, t: float | None = None, uncorrected: bool = False) -> PhaseBudget:
    """Phase budget of a mirror pulse evaluated at final ground momentum ``p``.

    The wave-vector line uses the perfect-chirp form when ``alpha = -g`` and
    the general form otherwise.
    """
    s = scenario
    t = _mirror_time(s, t)
    _check_mirror(s, t)
    perfect = is_perfect_chirp(s)
    if perfect:
        wv = wv_phase_perfect(packet, s, p, t, uncorrected)
    else:
        wv = wv_phase_general(packet, s, p, t, uncorrected)
    return PhaseBudget(
        phi0=unperturbed_phase(packet, s, p, t),
        phi_dm=dm_phase(packet, s, p, t, uncorrected),
        phi_ep=ep_phase(packet, s, p, t),
        phi_md=md_phase(packet, s, p, t),
        phi_wv=wv,
        chirp_perfect=perfect,
    )


def wv_md_ratio(scenario, packet, p: float, t: float | None = None, uncorrected: bool = False) -> float:
    """Closed-form ratio of the perfect-chirp wave-vector phase to the mass-defect phase.

    The default bracket ``pi^2/2 - 2 + (g t^2 - pi^2 z_bar) / D`` with
    ``D = 2 p t/m + v_r t + g t^2`` is the exact quotient of
    :func:`wv_phase_perfect` and :func:`md_phase`. ``uncorrected=True`` returns
    the bracket ``1 + pi^2/2 - pi^2 z_bar / D``.
    """
    s = scenario
    t = _mirror_time(s, t)
    _check_mirror(s, t)
    if s.mass_defect_ratio == 0 or s.g == 0:
        raise UndefinedRatioError("the mass-defect phase vanishes")
    d = 2 * p * t / s.mass + s.recoil_velocity * t + s.g * t**2
    if d == 0:
        raise UndefinedRatioError("the mass-defect phase vanishes")
    pre = s.k * s.c / (2 * s.species.transition_frequency)
    zb = packet.mean_z
    if uncorrected:
        return pre * (1 + math.pi**2 / 2 - zb * math.pi**2 / d)
    return pre * (math.pi**2 / 2 - 2 + (s.g * t**2 - math.pi**2 * zb) / d)
