"""Single-photon atomic diffraction: perturbative pulse propagators and reference oracles."""

from .dilaton import AtomSpecies, DilatonField
from .errors import (
    BoundaryLeakError,
    ConfigError,
    ConvergenceError,
    DispersionError,
    InvalidInputError,
    RegimeError,
    RegimeWarning,
    SpdiffError,
    UndefinedRatioError,
)
from .packets import GaussianWavePacket
from .scenario import Channels, Scenario
from .threelevel import LaserField
from .units import UnitSystem

__version__ = "0.1.0"

__all__ = [
    "AtomSpecies",
    "BoundaryLeakError",
    "Channels",
    "ConfigError",
    "ConvergenceError",
    "DilatonField",
    "DispersionError",
    "GaussianWavePacket",
    "InvalidInputError",
    "LaserField",
    "RegimeError",
    "RegimeWarning",
    "Scenario",
    "SpdiffError",
    "UndefinedRatioError",
    "UnitSystem",
]
