"""Brute-force reference engines.

* :func:`ode_two_level` integrates the mean-Heisenberg-picture two-level
  problem along the free-fall trajectory of a phase-space point.
* :func:`ode_three_level` integrates the rotating-frame three-level problem at
  a frozen phase-space point.
* :func:`grid_evolve` propagates two-component wave packets on a position grid
  with second-order operator splitting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from ._rk4 import rk4_chunk
from .elimination import effective_hamiltonian
from .errors import BoundaryLeakError, ConvergenceError, InvalidInputError
from .grid import GridSpec, edge_fraction, write_snapshot
from .propagator import SchroedingerAmplitudes, laser_clock_phase
from .resonance import HeisenbergTrajectory, heisenberg_detuning, heisenberg_mean_energy
from .threelevel import build_rotating_hamiltonian, dilaton_field

ODE_TOLERANCE = 1e-12
MAX_HALVINGS = 20
CHUNK_STEPS = 1 << 15
EDGE_LIMIT = 1e-10

__all__ = [
    "GridSpec",
    "OracleResult",
    "OdeSolution",
    "integrate_propagator",
    "ode_two_level",
    "ode_polynomial",
    "ode_three_level",
    "ode_effective_two_level",
    "dressed_initial_state",
    "dyson_quadrature",
    "grid_evolve",
    "ode_transfer",
    "transfer_scan",
    "locate_resonance",
]


@dataclass(frozen=True)
class OdeSolution:
    matrix: np.ndarray
    steps: int
    change: float


def _run(hamiltonian, basis, energies, t_final, steps):
    n = energies.size
    u = np.eye(n, dtype=complex)
    h = t_final / steps
    h0 = basis @ np.diag(energies) @ basis.conj().T
    gaps = np.subtract.outer(energies, energies)
    done = 0
    while done < steps:
        count = min(CHUNK_STEPS, steps - done)
        times = (done + 0.5 * np.arange(2 * count + 1)) * h
        # Interaction picture with respect to the exactly solved H(0).
        v = basis.conj().T @ (np.asarray(hamiltonian(times), dtype=complex) - h0) @ basis
        v *= np.exp(1j * gaps[None] * times[:, None, None])
        rk4_chunk(u, np.ascontiguousarray(v), h)
        done += count
    return basis @ (np.exp(-1j * energies * t_final)[:, None] * u) @ basis.conj().T


def integrate_propagator(hamiltonian, t_final: float, tolerance: float = ODE_TOLERANCE, steps: int | None = None) -> OdeSolution:
    """Propagator of ``i dU/dt = H(t) U`` by RK4 with step halving.

    ``hamiltonian`` maps an array of times to an array of shape
    ``(len(times), n, n)``. The constant part ``H(0)`` is exponentiated
    exactly and RK4 integrates the interaction-picture remainder. The step is
    halved until no matrix element changes by more than ``tolerance``.
    """
    if t_final < 0:
        raise InvalidInputError("final time must be non-negative")
    probe = np.asarray(hamiltonian(np.linspace(0.0, t_final, 5)), dtype=complex)
    n = probe.shape[-1]
    if t_final == 0:
        return OdeSolution(np.eye(n, dtype=complex), 0, 0.0)
    energies, basis = np.linalg.eigh(probe[0])
    if steps is None:
        spread = energies.max() - energies.min()
        steps = max(8, math.ceil(spread * t_final / 4.0))
    previous = _run(hamiltonian, basis, energies, t_final, steps)
    for _ in range(MAX_HALVINGS):
        steps *= 2
        current = _run(hamiltonian, basis, energies, t_final, steps)
        change = float(np.max(np.abs(current - previous)))
        if change < tolerance:
            return OdeSolution(current, steps, change)
        previous = current
    raise ConvergenceError(f"no convergence to {tolerance:g} after {MAX_HALVINGS} step halvings")


def _two_level(detuning, mean, rabi):
    h = np.empty(np.shape(detuning) + (2, 2), dtype=complex)
    h[..., 0, 0] = mean + 0.5 * detuning
    h[..., 1, 1] = mean - 0.5 * detuning
    h[..., 0, 1] = h[..., 1, 0] = 0.5 * rabi
    return h


def ode_two_level(scenario, z: float, p: float, t_final: float, frozen_dm: bool = True, tolerance: float = ODE_TOLERANCE) -> np.ndarray:
    """Mean-Heisenberg-picture propagator in the basis (e, g).

    The detuning and mean energy are evaluated along the free-fall trajectory
    directly, without the time-polynomial expansion.
    """
    def hamiltonian(t):
        nu = heisenberg_detuning(scenario, z, p, t, frozen_dm) + 0 * t
        nub = heisenberg_mean_energy(scenario, z, p, t, frozen_dm) + 0 * t
        return _two_level(nu, nub, scenario.rabi)

    return integrate_propagator(hamiltonian, t_final, tolerance).matrix


def ode_polynomial(detuning, mean, rabi: float, t_final: float, tolerance: float = ODE_TOLERANCE) -> np.ndarray:
    """Two-level propagator for detuning and mean energy given as cubic polynomials."""
    def hamiltonian(t):
        nu = sum(c * t**j for j, c in enumerate(detuning)) + 0 * t
        nub = sum(c * t**j for j, c in enumerate(mean)) + 0 * t
        return _two_level(nu, nub, rabi)

    return integrate_propagator(hamiltonian, t_final, tolerance).matrix


def _path(scenario, z, p, moving):
    if not moving:
        return lambda t: (z, p)
    path = HeisenbergTrajectory(z, p, scenario.mass, scenario.g)
    return lambda t: (path.position(t), path.momentum(t))


def ode_three_level(
    scenario, z: float, p: float, t_final: float, tolerance: float = ODE_TOLERANCE, moving: bool = True
) -> np.ndarray:
    """Rotating-frame three-level propagator in the basis (a, e, g).

    The phase-space point follows the free-fall trajectory from ``(z, p)``
    unless ``moving=False`` freezes it.
    """
    at = _path(scenario, z, p, moving)
    return integrate_propagator(lambda t: build_rotating_hamiltonian(scenario, *at(t), t), t_final, tolerance).matrix


def ode_effective_two_level(
    scenario, z: float, p: float, t_final: float, tolerance: float = ODE_TOLERANCE, moving: bool = True
) -> np.ndarray:
    """Rotating-frame effective two-level propagator in the basis (e, g), along the trajectory as above."""
    at = _path(scenario, z, p, moving)
    return integrate_propagator(lambda t: effective_hamiltonian(scenario, *at(t), t)[1], t_final, tolerance).matrix


def dressed_initial_state(scenario, initial: str = "g") -> np.ndarray:
    """Normalized three-level state ``(P_0 psi, psi)`` in the basis (a, e, g).

    Starting in the adiabatically dressed state avoids the fast ancilla
    transient of a sudden switch-on.
    """
    laser = scenario.laser
    lower = np.array([1.0, 0.0]) if initial == "e" else np.array([0.0, 1.0])
    ancilla = -(0.5 * laser.magnetic_rabi * lower[0] + 0.5 * laser.electric_rabi * lower[1]) / laser.ancilla_detuning
    state = np.array([ancilla, lower[0], lower[1]], dtype=complex)
    return state / np.linalg.norm(state)


def dyson_quadrature(j: int, phi: float) -> tuple[float, float]:
    """Diagonal and off-diagonal Dyson integrals by adaptive quadrature.

    ``eta_j = 2**(j+1) int_0^phi u**j cos(2u - phi) du`` and
    ``xi_j = 2**(j+1) int_0^phi u**j sin(phi - 2u) du``.
    """
    if j not in range(4):
        raise InvalidInputError(f"Dyson coefficient order must be 0..3, got {j}")
    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=200)
    eta = integrate.quad(lambda u: u**j * math.cos(2 * u - phi), 0.0, phi, **opts)[0]
    xi = integrate.quad(lambda u: u**j * math.sin(phi - 2 * u), 0.0, phi, **opts)[0]
    return 2 ** (j + 1) * eta, 2 ** (j + 1) * xi


@dataclass(frozen=True)
class OracleResult(SchroedingerAmplitudes):
    """Grid-oracle amplitudes plus run metadata."""

    steps: int = 0
    norm_error: float = 0.0
    edge_leak: float = 0.0
    initial_norms: dict = field(default_factory=dict)

    def weighted_mirror_phase(self, p: float, k: float, half_width: float) -> float:
        """Amplitude-weighted phase over ``[p - half_width, p + half_width]``."""
        q = np.linspace(p - half_width, p + half_width, 65)
        up = self.momentum_amplitude("e", "g", q + k)
        down = self.momentum_amplitude("g", "e", q)
        reduced = np.angle(np.sum(up * np.conj(down)))
        return float(reduced + self.clock_phase["e"] - self.clock_phase["g"])


def _potentials(scenario, z, t):
    s = scenario
    eff = s.effective
    rho = dilaton_field(s, z, t)
    c2 = s.c**2
    drive = 0.5 * (s.two_level_detuning + eff.diff_stark - s.k * s.alpha * t)
    out = []
    for sign, state, beta in ((1.0, "e", s.species.beta_e), (-1.0, "g", s.species.beta_g)):
        m = s.rest_mass(state)
        out.append(sign * drive + eff.mean_stark + m * c2 * beta * rho + m * (1.0 + beta * rho) * s.g * z)
    k = s.k
    if s.channels.wave_vector:
        a = s.alpha
        phase = k * z * (1.0 + a * t / s.c - (s.g + a) * z / (2.0 * c2))
    else:
        phase = k * z
    return out[0], out[1], 0.5 * s.rabi * np.exp(1j * phase)


def _coupling_step(psi_e, psi_g, a, d, b, h):
    mean = 0.5 * (a + d)
    half = 0.5 * (a - d)
    w = np.sqrt(half**2 + np.abs(b) ** 2)
    cos = np.cos(w * h)
    sinc = h * np.sinc(w * h / np.pi)
    common = np.exp(-1j * mean * h)
    new_e = common * ((cos - 1j * sinc * half) * psi_e - 1j * sinc * b * psi_g)
    new_g = common * (-1j * sinc * np.conj(b) * psi_e + (cos + 1j * sinc * half) * psi_g)
    return new_e, new_g


def grid_evolve(
    scenario, packet, grid: GridSpec, t_final: float, snapshot=None, check_edges: bool = True, coupling: bool = True
) -> OracleResult:
    """Split-step propagation of both packets through a pulse of duration ``t_final``.

    The frame removes only the purely temporal laser phase and the common
    rest energy, so the spatial laser phase and all position-dependent energies
    act on the grid. Raises :class:`BoundaryLeakError` when the density at the
    grid edges exceeds ``1e-10`` of its peak. ``coupling=False`` switches the
    laser coupling off, leaving free evolution in the state potentials.
    """
    s = scenario
    z, p = grid.z, grid.p
    steps = grid.steps(t_final)
    h = t_final / steps
    kinetic = {state: np.exp(-0.5j * h * p**2 / (2.0 * s.rest_mass(state))) for state in "eg"}
    offset = s.laser.phase_offset
    start_phase = {"e": 0.5 * offset, "g": -0.5 * offset}

    states = {}
    norms = {}
    for initial in "eg":
        psi = {n: np.zeros(grid.points, dtype=complex) for n in "eg"}
        psi[initial] = packet.position_amplitude(initial, z) * np.exp(1j * start_phase[initial])
        norms[initial] = float(np.sum(np.abs(psi[initial]) ** 2) * grid.dz)
        states[initial] = psi

    for n_step in range(steps):
        t_mid = (n_step + 0.5) * h
        a, d, b = _potentials(s, z, t_mid)
        if not coupling:
            b = 0.0 * b
        for psi in states.values():
            e = np.fft.ifft(kinetic["e"] * np.fft.fft(psi["e"]))
            g = np.fft.ifft(kinetic["g"] * np.fft.fft(psi["g"]))
            e, g = _coupling_step(e, g, a, d, b, h)
            psi["e"] = np.fft.ifft(kinetic["e"] * np.fft.fft(e))
            psi["g"] = np.fft.ifft(kinetic["g"] * np.fft.fft(g))

    components = {(n, j): states[j][n] for j in "eg" for n in "eg"}
    norm_error = max(
        abs(sum(np.sum(np.abs(states[j][n]) ** 2) * grid.dz for n in "eg") - norms[j]) for j in "eg"
    )
    leak = max(edge_fraction(states[j][n]) for j in "eg" for n in "eg" if np.any(states[j][n]))
    if check_edges and leak > EDGE_LIMIT:
        raise BoundaryLeakError(f"edge density {leak:.3g} of peak exceeds {EDGE_LIMIT:g}; enlarge the grid")
    if snapshot is not None:
        write_snapshot(snapshot, grid, [components[key] for key in sorted(components)])
    clock = laser_clock_phase(s, t_final) + offset
    return OracleResult(
        grid=grid,
        time=t_final,
        components=components,
        clock_phase={"e": -0.5 * clock, "g": 0.5 * clock},
        steps=steps,
        norm_error=float(norm_error),
        edge_leak=float(leak),
        initial_norms=norms,
    )


def transfer_scan(scenario, frequencies, z: float = 0.0, p: float | None = None, initial: str = "g") -> np.ndarray:
    """Oracle transfer probability after a mirror pulse for each laser frequency.

    Magnetic transitions use the three-level integrator from the dressed
    initial state; direct transitions use the rotating-frame two-level one.
    The laser wave number follows each frequency and the pulse length is
    fixed by the unshifted Rabi frequency.
    """
    p = scenario.resonant_momentum if p is None else p
    t_final = scenario.pi_time
    out = []
    for w in np.atleast_1d(frequencies):
        s = scenario.with_(laser=scenario.laser.with_frequency(float(w), scenario.c))
        out.append(ode_transfer(s, z, p, t_final, initial))
    return np.array(out)


def ode_transfer(scenario, z: float, p: float, t_final: float, initial: str = "g") -> float:
    """Transfer probability out of ``initial`` at the phase-space point ``(z, p)``."""
    if scenario.transition == "magnetic":
        u = ode_three_level(scenario, z, p, t_final, tolerance=1e-10)
        final = u @ dressed_initial_state(scenario, initial)
        return float(abs(final[1 if initial == "g" else 2]) ** 2)
    u = ode_effective_two_level(scenario, z, p, t_final, tolerance=1e-10)
    col = 1 if initial == "g" else 0
    return float(abs(u[1 - col, col]) ** 2)


def locate_resonance(scenario, center: float, half_width: float, points: int = 21, z: float = 0.0, p: float | None = None) -> tuple[float, float]:
    """Laser frequency of maximal oracle transfer near ``center``.

    A coarse scan brackets the maximum, then a bounded scalar search refines
    it. Returns ``(frequency, transfer)``.
    """
    p = scenario.resonant_momentum if p is None else p
    grid_w = np.linspace(center - half_width, center + half_width, points)
    values = transfer_scan(scenario, grid_w, z, p)
    i = int(np.argmax(values))
    lo, hi = grid_w[max(i - 1, 0)], grid_w[min(i + 1, points - 1)]
    t_final = scenario.pi_time

    def negative(w):
        s = scenario.with_(laser=scenario.laser.with_frequency(float(w), scenario.c))
        return -ode_transfer(s, z, p, t_final, "g")

    res = optimize.minimize_scalar(negative, bounds=(lo, hi), method="bounded", options={"xatol": 1e-7 * max(1.0, abs(center))})
    return float(res.x), float(-res.fun)
