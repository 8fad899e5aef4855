"""Adiabatic elimination of the far-detuned ancilla state.

The projector ``P`` maps the (e, g) amplitudes onto the ancilla amplitude and
solves the Bloch equation order by order in ``1/Delta``. The effective
two-level Hamiltonian is kept at order ``1/Delta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidInputError
from .threelevel import state_energy

FD_STEP = 1e-4


@dataclass(frozen=True)
class EffectiveTwoLevel:
    """Effective Rabi frequency and Stark shifts of the reduced two-level system."""

    rabi: float
    mean_stark: float = 0.0
    diff_stark: float = 0.0


def effective_two_level(electric_rabi: float, magnetic_rabi: float, ancilla_detuning: float) -> EffectiveTwoLevel:
    """Couplings and Stark shifts obtained from the lowest-order projector."""
    if ancilla_detuning == 0:
        raise InvalidInputError("ancilla detuning must be nonzero")
    d = ancilla_detuning
    return EffectiveTwoLevel(
        rabi=-magnetic_rabi * electric_rabi / (2.0 * d),
        mean_stark=-(electric_rabi**2 + magnetic_rabi**2) / (8.0 * d),
        diff_stark=(electric_rabi**2 - magnetic_rabi**2) / (4.0 * d),
    )


def direct_transition_mode(rabi: float) -> EffectiveTwoLevel:
    """Two-level parameters of a direct transition: no Stark shifts."""
    if rabi == 0:
        raise InvalidInputError("direct Rabi frequency must be nonzero")
    return EffectiveTwoLevel(rabi=float(rabi))


@dataclass(frozen=True)
class Blocks:
    """Time-dependent blocks of the three-level Hamiltonian at a fixed point.

    ``nu_a(t)`` returns the ancilla energy (without ``Delta``), ``nu_eg(t)``
    the two diagonal entries of the (e, g) block, and ``coupling`` is the
    column ``T = (Omega_B/2, Omega_E/2)``.
    """

    nu_a: Callable[[float], float]
    nu_eg: Callable[[float], np.ndarray]
    coupling: np.ndarray
    detuning: float

    @classmethod
    def constant(cls, nu_a: float, nu_eg, coupling, detuning: float) -> "Blocks":
        nu_eg = np.asarray(nu_eg, dtype=float)
        return cls(lambda t: nu_a, lambda t: nu_eg, np.asarray(coupling, dtype=float), detuning)


def scenario_blocks(scenario, z: float, p: float) -> Blocks:
    """Blocks of the rotating-frame Hamiltonian at the phase-space point ``(z, p)``."""
    delta = scenario.two_level_detuning
    laser = scenario.laser

    def nu_eg(t):
        return np.array([
            state_energy(scenario, "e", z, p, t) + 0.5 * delta,
            state_energy(scenario, "g", z, p, t) - 0.5 * delta,
        ])

    return Blocks(
        nu_a=lambda t: float(state_energy(scenario, "a", z, p, t)),
        nu_eg=nu_eg,
        coupling=0.5 * np.array([laser.magnetic_rabi, laser.electric_rabi]),
        detuning=laser.ancilla_detuning,
    )


def projector_order(n: int, blocks: Blocks, t: float, step: float | None = None) -> np.ndarray:
    """Order-``n`` term of the projector series as a complex row of length 2.

    Time derivatives are central finite differences with step ``step``
    (default ``1e-4`` divided by the effective Rabi frequency).
    """
    if n < 0:
        raise InvalidInputError("projector order must be non-negative")
    if blocks.detuning == 0:
        raise InvalidInputError("singular ancilla detuning")
    if step is None:
        rabi = abs(effective_two_level(2 * blocks.coupling[1], 2 * blocks.coupling[0], blocks.detuning).rabi)
        step = FD_STEP / rabi if rabi > 0 else FD_STEP
    return _order(n, blocks, t, step)


def _order(n: int, blocks: Blocks, t: float, h: float) -> np.ndarray:
    d, T = blocks.detuning, blocks.coupling
    if n == 0:
        return -T.astype(complex) / d
    prev = _order(n - 1, blocks, t, h)
    derivative = (_order(n - 1, blocks, t + h, h) - _order(n - 1, blocks, t - h, h)) / (2 * h)
    rhs = -blocks.nu_a(t) * prev + prev * blocks.nu_eg(t) + 1j * derivative
    for k in range(n - 1):
        rhs = rhs + _order(k, blocks, t, h) @ T * _order(n - 2 - k, blocks, t, h)
    return rhs / d


@dataclass(frozen=True)
class ProjectorSeries:
    """Projector terms ``P_0 .. P_N`` evaluated at one time."""

    orders: list = field(default_factory=list)

    @property
    def truncation_order(self) -> int:
        return len(self.orders) - 1

    def total(self) -> np.ndarray:
        return np.sum(self.orders, axis=0)

    def norms(self) -> np.ndarray:
        return np.array([np.linalg.norm(term) for term in self.orders])

    def is_ordered(self, detuning: float, margin: float) -> bool:
        """Whether every ratio of consecutive norms is below ``margin/|Delta|``."""
        n = self.norms()
        return bool(np.all(n[1:] <= margin / abs(detuning) * n[:-1]))


def projector_series(blocks: Blocks, t: float, order: int = 1, step: float | None = None) -> ProjectorSeries:
    return ProjectorSeries([projector_order(n, blocks, t, step) for n in range(order + 1)])


def reduced_hamiltonian(blocks: Blocks, t: float, order: int = 0, step: float | None = None) -> np.ndarray:
    """``T P + nu_eg`` with the projector truncated at ``order``.

    Only ``order = 0`` is Hermitian; higher orders are for convergence studies.
    """
    P = projector_series(blocks, t, order, step).total()
    return np.outer(blocks.coupling, P) + np.diag(blocks.nu_eg(t))


def effective_hamiltonian(scenario, z, p, t):
    """Effective two-level Hamiltonian in the rotating frame.

    Returns ``(EffectiveTwoLevel, H)`` where ``H`` has shape
    ``broadcast(z, p, t).shape + (2, 2)`` in the basis (e, g).
    """
    eff = scenario.effective
    nu_e = state_energy(scenario, "e", z, p, t)
    nu_g = state_energy(scenario, "g", z, p, t)
    mean = 0.5 * (nu_e + nu_g) + eff.mean_stark
    det = nu_e - nu_g + scenario.two_level_detuning + eff.diff_stark
    shape = np.broadcast(mean, det).shape
    h = np.empty(shape + (2, 2), dtype=complex)
    h[..., 0, 0] = mean + 0.5 * det
    h[..., 1, 1] = mean - 0.5 * det
    h[..., 0, 1] = h[..., 1, 0] = 0.5 * eff.rabi
    return eff, h
