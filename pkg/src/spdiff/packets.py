"""Gaussian center-of-mass wave packets for the two internal states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class GaussianWavePacket:
    """Pair of Gaussian packets, one per internal state.

    In momentum representation each packet is proportional to
    ``exp(-(p - p_j)**2 / (2 sigma_j**2) + i p z_j)``. With this sign
    convention the packet is centered at position ``-z_j``.
    """

    sigma_e: float
    sigma_g: float
    p_e: float
    p_g: float
    z_e: float = 0.0
    z_g: float = 0.0

    def __post_init__(self):
        for name in ("sigma_e", "sigma_g"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be positive, got {value!r}")

    @classmethod
    def symmetric(cls, sigma: float, p_g: float, k: float, z_g: float = 0.0, z_e: float | None = None):
        """Ground packet at ``p_g`` and excited packet one photon momentum higher."""
        return cls(sigma, sigma, p_g + k, p_g, z_g if z_e is None else z_e, z_g)

    @property
    def delta_z(self) -> float:
        return self.z_e - self.z_g

    @property
    def mean_z(self) -> float:
        return 0.5 * (self.z_e + self.z_g)

    def parameters(self, state: str) -> tuple[float, float, float]:
        """``(sigma, p, z)`` of the packet in ``state``."""
        if state == "e":
            return self.sigma_e, self.p_e, self.z_e
        if state == "g":
            return self.sigma_g, self.p_g, self.z_g
        raise InvalidInputError(f"state must be 'e' or 'g', got {state!r}")

    def momentum_amplitude(self, state: str, p):
        """Normalized momentum-space amplitude, ``integral |.|^2 dp / (2 pi) = 1``."""
        sigma, p0, z0 = self.parameters(state)
        norm = (4 * math.pi / sigma**2) ** 0.25
        return norm * np.exp(-((p - p0) ** 2) / (2 * sigma**2) + 1j * p * z0)

    def position_amplitude(self, state: str, z):
        """Normalized position-space amplitude, ``integral |.|^2 dz = 1``."""
        sigma, p0, z0 = self.parameters(state)
        x = z + z0
        return (sigma**2 / math.pi) ** 0.25 * np.exp(1j * p0 * x - 0.5 * sigma**2 * x**2)

    def position_width(self, state: str, t: float = 0.0, mass: float = 1.0) -> float:
        """Standard deviation of the position density after free flight for ``t``."""
        sigma = self.parameters(state)[0]
        return math.sqrt(0.5 / sigma**2 + 0.5 * (sigma * t / mass) ** 2)
