"""Uniform position grid with its FFT momentum grid."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError

SNAPSHOT_MAGIC = b"SPDF"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<4sIQd")


@dataclass(frozen=True)
class GridSpec:
    """Position grid ``center - extent/2 + n * extent/points`` and a time step."""

    extent: float
    points: int
    time_step: float
    center: float = 0.0
    splitting_order: int = 2

    def __post_init__(self):
        if not (math.isfinite(self.extent) and self.extent > 0):
            raise InvalidInputError("grid extent must be positive")
        if self.points < 2 or self.points & (self.points - 1):
            raise InvalidInputError(f"grid points must be a power of two, got {self.points}")
        if not (math.isfinite(self.time_step) and self.time_step > 0):
            raise InvalidInputError("time step must be positive")
        if self.splitting_order != 2:
            raise InvalidInputError("only second-order splitting is implemented")

    @property
    def dz(self) -> float:
        return self.extent / self.points

    @property
    def z(self) -> np.ndarray:
        return self.center - 0.5 * self.extent + self.dz * np.arange(self.points)

    @property
    def p(self) -> np.ndarray:
        """Momenta in FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.points, self.dz)

    def steps(self, duration: float) -> int:
        return max(1, math.ceil(duration / self.time_step - 1e-9))

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.extent, self.points, self.time_step / factor, self.center, self.splitting_order)


def sample_momentum(grid: GridSpec, psi: np.ndarray, p) -> np.ndarray:
    """Continuous Fourier transform ``sum_n psi(z_n) exp(-i p z_n) dz`` at arbitrary ``p``."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    phase = np.exp(-1j * np.outer(p, grid.z))
    return phase @ psi * grid.dz


def edge_fraction(psi: np.ndarray, width: int = 8) -> float:
    """Largest density in the outer ``width`` points relative to the peak density."""
    density = np.abs(psi) ** 2
    peak = density.max()
    if peak == 0:
        return 0.0
    return float(max(density[:width].max(), density[-width:].max()) / peak)


def write_snapshot(path, grid: GridSpec, components) -> Path:
    """Write components to the little-endian ``SPDF`` binary layout."""
    path = Path(path)
    data = np.stack([np.asarray(c, dtype=np.complex128) for c in components])
    if data.shape[1] != grid.points:
        raise InvalidInputError("component length does not match the grid")
    interleaved = np.empty(data.shape + (2,), dtype="<f8")
    interleaved[..., 0] = data.real
    interleaved[..., 1] = data.imag
    with path.open("wb") as fh:
        fh.write(_HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, grid.points, grid.extent))
        fh.write(interleaved.tobytes())
    return path


def read_snapshot(path) -> tuple[int, float, np.ndarray]:
    """Return ``(points, extent, components)`` from an ``SPDF`` file."""
    raw = Path(path).read_bytes()
    magic, version, points, extent = _HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC or version != SNAPSHOT_VERSION:
        raise InvalidInputError("not an SPDF snapshot")
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if values.size % (2 * points):
        raise InvalidInputError("truncated SPDF snapshot")
    pairs = values.reshape(-1, points, 2)
    return points, extent, pairs[..., 0] + 1j * pairs[..., 1]
