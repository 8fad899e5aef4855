"""First-order Dyson propagator for a square pulse.

The pulse propagator is built in the mean Heisenberg picture around the
unperturbed Rabi rotation. :func:`propagate_heisenberg` evaluates it at a
phase-space point; :func:`propagate_schroedinger` applies it as an operator to
Gaussian packets on a grid and returns Schroedinger-picture amplitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, guard
from .grid import GridSpec, sample_momentum
from .resonance import detuning_polynomial, ordering_cross_terms

PERTURBATIVE_LIMIT = 0.1
LAMBDA = {"e": -1.0, "g": 1.0}
_CERTIFIED_AREAS = (0.0, math.pi / 4, math.pi / 2)


def dyson_coefficients(j: int, phi):
    """Closed forms ``(eta_j, xi_j)`` at half pulse area ``phi``.

    ``eta_j`` enters the diagonal and ``xi_j`` the off-diagonal elements.
    """
    s, c = np.sin(phi), np.cos(phi)
    if j == 0:
        return 2 * s, 0.0 * phi
    if j == 1:
        return 2 * phi * s, -2 * s + 2 * phi * c
    if j == 2:
        return -4 * s + 4 * phi * c + 4 * phi**2 * s, 4 * phi * (-s + phi * c)
    if j == 3:
        return (
            -12 * phi * s + 12 * phi**2 * c + 8 * phi**3 * s,
            2 * (4 * phi**2 - 6) * (-s + phi * c) - 4 * phi**2 * s,
        )
    raise InvalidInputError(f"Dyson coefficient order must be 0..3, got {j}")


@dataclass(frozen=True)
class PulsePropagator:
    """Pulse propagator in the basis (e, g).

    ``matrix`` has shape ``(..., 2, 2)``; ``certified`` is false for pulse
    areas other than zero, beam splitter and mirror.
    """

    half_area: float
    matrix: np.ndarray
    epsilon: float
    certified: bool

    def transfer_probability(self, initial: str = "g"):
        col = 1 if initial == "g" else 0
        return np.abs(self.matrix[..., 1 - col, col]) ** 2

    def unitarity_defect(self):
        m = self.matrix
        prod = np.conj(np.swapaxes(m, -1, -2)) @ m
        return np.max(np.abs(prod - np.eye(2)), axis=(-1, -2))


def dyson_matrix(detuning, mean, rabi: float, t: float, reexponentiate: bool = False) -> np.ndarray:
    """Assemble the first-order propagator from polynomial coefficients.

    ``detuning`` and ``mean`` are length-4 sequences of coefficients (scalars
    or arrays broadcasting together).
    """
    phi = 0.5 * rabi * t
    mean_phase = sum(mean[j] * t ** (j + 1) / (j + 1) for j in range(4))
    diag = sum(detuning[j] * dyson_coefficients(j, phi)[0] / rabi**j for j in range(4)) / (2 * rabi)
    off = sum(detuning[j] * dyson_coefficients(j, phi)[1] / rabi**j for j in range(4)) / (2 * rabi)
    envelope = np.exp(-1j * mean_phase) if reexponentiate else 1 - 1j * mean_phase
    shape = np.broadcast(envelope, diag, off).shape
    u = np.empty(shape + (2, 2), dtype=complex)
    for n, state in enumerate("eg"):
        lam = LAMBDA[state]
        u[..., n, n] = np.cos(phi) * envelope + 1j * lam * diag
        u[..., n, 1 - n] = -1j * np.sin(phi) * envelope - lam * off
    return u


def perturbation_size(coefficients, rabi: float, t: float) -> float:
    """``max_j |nu^(j)| t^j / |Omega|`` over detuning and mean coefficients."""
    values = [np.max(np.abs(c)) * t**j for group in coefficients for j, c in enumerate(group)]
    return float(max(values) / abs(rabi))


def propagate_heisenberg(scenario, z, p, t: float, reexponentiate: bool = False, uncorrected: bool = False) -> PulsePropagator:
    """Mean-Heisenberg-picture pulse propagator at the phase-space point ``(z, p)``."""
    coeffs = detuning_polynomial(scenario, z, p, uncorrected=uncorrected)
    rabi = scenario.rabi
    eps = perturbation_size((coeffs.detuning, coeffs.mean), rabi, t)
    guard(eps < PERTURBATIVE_LIMIT, f"perturbation size {eps:g} is not small against the Rabi frequency", scenario.strict)
    phi = 0.5 * rabi * t
    certified = any(math.isclose(abs(phi), a, abs_tol=1e-12) for a in _CERTIFIED_AREAS)
    return PulsePropagator(phi, dyson_matrix(coeffs.detuning, coeffs.mean, rabi, t, reexponentiate), eps, certified)


class _Operator:
    """``A(p) + B(z) + C (z p + p z) / 2`` acting on grid wave functions."""

    def __init__(self, grid: GridSpec, a, b, c: float):
        self.grid, self.a, self.b, self.c = grid, a, b, c

    def scaled_sum(self, weights, others):
        a = sum(w * o.a for w, o in zip(weights, others))
        b = sum(w * o.b for w, o in zip(weights, others))
        c = sum(w * o.c for w, o in zip(weights, others))
        return _Operator(self.grid, a, b, c)

    def apply(self, psi):
        z = self.grid.z
        out = _in_momentum(self.grid, psi, self.a) + self.b * psi
        if self.c:
            p_psi = _in_momentum(self.grid, psi, self.grid.p)
            out = out + 0.5 * self.c * (z * p_psi + _in_momentum(self.grid, z * psi, self.grid.p))
        return out


def _in_momentum(grid, psi, factor):
    return np.fft.ifft(factor * np.fft.fft(psi))


def _coefficient_operators(scenario, grid: GridSpec, uncorrected: bool):
    """Per-order detuning and mean-energy operators on the grid."""
    z, p = grid.z, grid.p
    at_p = detuning_polynomial(scenario, 0.0, p, uncorrected)
    at_z = detuning_polynomial(scenario, z, 0.0, uncorrected)
    at_0 = detuning_polynomial(scenario, 0.0, 0.0, uncorrected)
    cross_det, cross_mean = ordering_cross_terms(scenario)
    detuning = [
        _Operator(grid, at_p.detuning[j] + 0 * p, at_z.detuning[j] - at_0.detuning[j] + 0 * z, cross_det[j])
        for j in range(4)
    ]
    mean = [
        _Operator(grid, at_p.mean[j] + 0 * p, at_z.mean[j] - at_0.mean[j] + 0 * z, cross_mean[j])
        for j in range(4)
    ]
    return detuning, mean


def _spatial_laser_phase(scenario, z, t):
    """Position-dependent part of the laser phase, with the wave-vector switch."""
    k = scenario.k
    if not scenario.channels.wave_vector:
        return k * z
    a, g, c = scenario.alpha, scenario.g, scenario.c
    return k * z * (1.0 + a * t / c - (g + a) * z / (2.0 * c**2))


def laser_clock_phase(scenario, t):
    """Purely temporal part ``omega_L t (1 + alpha t / (2 c))`` of the laser phase."""
    return scenario.laser.frequency * t * (1.0 + scenario.alpha * t / (2.0 * scenario.c))


@dataclass(frozen=True)
class SchroedingerAmplitudes:
    """Schroedinger-picture amplitudes ``psi_{n,j}`` on a position grid.

    ``components[(n, j)]`` is the amplitude in final state ``n`` for initial
    state ``j``. The common rest-energy phase ``-omega_bar t`` is omitted and
    ``clock_phase[n]`` holds the purely temporal laser phase of state ``n``;
    both are added only inside phase differences.
    """

    grid: GridSpec
    time: float
    components: dict
    clock_phase: dict

    def momentum_amplitude(self, final: str, initial: str, p):
        """Amplitude at momentum ``p`` without the clock phase."""
        return sample_momentum(self.grid, self.components[(final, initial)], p)

    def transfer_probability(self, initial: str = "g") -> float:
        final = "e" if initial == "g" else "g"
        psi = self.components[(final, initial)]
        return float(np.sum(np.abs(psi) ** 2) * self.grid.dz)

    def mirror_phase(self, p: float, k: float) -> float:
        """``arg psi_eg(p + k) - arg psi_ge(p)`` including the clock phases, unwrapped to (-pi, pi]."""
        up = self.momentum_amplitude("e", "g", p + k)[0]
        down = self.momentum_amplitude("g", "e", p)[0]
        reduced = np.angle(up * np.conj(down))
        clock = self.clock_phase["e"] - self.clock_phase["g"]
        return float(reduced + clock)


def propagate_schroedinger(scenario, packet, t: float, grid: GridSpec, uncorrected: bool = False) -> SchroedingerAmplitudes:
    """Apply the first-order pulse propagator to both Gaussian packets.

    The initial rotating-frame transformation, the operator-valued Dyson
    propagator, the exact mean free fall and the final rotating-frame
    transformation are applied in turn on ``grid``.
    """
    z = grid.z
    rabi = scenario.rabi
    phi = 0.5 * rabi * t
    detuning, mean = _coefficient_operators(scenario, grid, uncorrected)
    zero = _Operator(grid, 0 * grid.p, 0 * z, 0.0)
    mean_phase = zero.scaled_sum([t ** (j + 1) / (j + 1) for j in range(4)], mean)
    diag = zero.scaled_sum([dyson_coefficients(j, phi)[0] / rabi ** (j + 1) / 2 for j in range(4)], detuning)
    off = zero.scaled_sum([dyson_coefficients(j, phi)[1] / rabi ** (j + 1) / 2 for j in range(4)], detuning)
    half_k = 0.5 * scenario.k
    centers = ((-packet.z_e, packet.p_e - half_k), (-packet.z_g, packet.p_g + half_k))
    size = 0.0
    for zc, pc in centers:
        coeffs = detuning_polynomial(scenario, zc, pc, uncorrected)
        size = max(size, perturbation_size((coeffs.detuning, coeffs.mean), rabi, t))
    guard(
        size < PERTURBATIVE_LIMIT,
        "perturbation size is not small against the Rabi frequency",
        scenario.strict,
    )

    offset = scenario.laser.phase_offset
    start = _spatial_laser_phase(scenario, z, 0.0) - offset
    end = _spatial_laser_phase(scenario, z, t) - offset
    m, g = scenario.mass, scenario.g
    q = grid.p
    free = np.exp(-1j * (q**2 * t - q * m * g * t**2 + (m * g) ** 2 * t**3 / 3) / (2 * m))
    constant = np.exp(-1j * (scenario.recoil_frequency / 4 + scenario.effective.mean_stark) * t)
    sign = {"e": 1.0, "g": -1.0}

    components = {}
    for initial in "eg":
        psi0 = packet.position_amplitude(initial, z) * np.exp(-0.5j * sign[initial] * start)
        mean_part = mean_phase.apply(psi0)
        for final in "eg":
            lam = LAMBDA[final]
            if final == initial:
                out = np.cos(phi) * (psi0 - 1j * mean_part) + 1j * lam * diag.apply(psi0)
            else:
                out = -1j * np.sin(phi) * (psi0 - 1j * mean_part) - lam * off.apply(psi0)
            out = np.exp(-1j * m * g * z * t) * np.fft.ifft(free * np.fft.fft(out)) * constant
            components[(final, initial)] = out * np.exp(0.5j * sign[final] * end)
    clock = laser_clock_phase(scenario, t)
    return SchroedingerAmplitudes(grid, t, components, {"e": -0.5 * clock, "g": 0.5 * clock})
