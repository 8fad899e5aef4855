"""Strict JSON scenario configuration with unit-suffixed keys.

Every dimensional key names its unit (``_s``, ``_m``, ``_kg``,
``_rad_per_s`` ...). Values are converted to internal units through the
configured :class:`~spdiff.units.UnitSystem`; choosing ``hbar_J_s = 1`` and
unit scales gives a configuration that is already in internal units.
"""

from __future__ import annotations

import json
import math
import typing
from dataclasses import MISSING, asdict, dataclass, field, fields, is_dataclass
from pathlib import Path


from .dilaton import AtomSpecies, DilatonField
from .errors import ConfigError, SpdiffError
from .grid import GridSpec
from .packets import GaussianWavePacket
from .resonance import tuned_to_packet
from .scenario import Channels, Scenario
from .threelevel import LaserField
from .units import UnitSystem

ENGINES = ("analytic", "oracle", "both")


@dataclass
class UnitsConfig:
    time_scale_s: float = 1.0
    length_scale_m: float = 1.0
    speed_of_light_m_per_s: float = 10.0
    grav_accel_m_per_s2: float = 0.0
    hbar_J_s: float = 1.0


@dataclass
class SpeciesConfig:
    mass_kg: float = 100.0
    transition_frequency_rad_per_s: float = 10.0
    beta_e: float = 0.0
    beta_g: float = 0.0


@dataclass
class LaserConfig:
    """``frequency_rad_per_s = null`` selects the resonant frequency."""

    frequency_rad_per_s: typing.Optional[float] = None
    detuning_rad_per_s: float = 0.0
    chirp_rate_m_per_s2: float = 0.0
    phase_offset_rad: float = 0.0
    electric_rabi_rad_per_s: float = 1.0
    magnetic_rabi_rad_per_s: float = 1.0
    ancilla_detuning_rad_per_s: float = 100.0
    transition: str = "direct"


@dataclass
class DilatonConfig:
    amplitude: float = 0.0
    frequency_rad_per_s: float = 0.0
    wavenumber_per_m: float = 0.0
    phase_rad: float = 0.0
    eep_coefficient: float = 0.0


@dataclass
class PacketConfig:
    """Ground packet; the excited packet carries one photon momentum more."""

    sigma_per_m: float = 0.5
    momentum_kg_m_per_s: float = 5.0
    z_g_m: float = 0.0
    z_e_m: float = 0.0


@dataclass
class PulseConfig:
    """``duration_s = null`` means the duration that realizes ``area_rad``."""

    area_rad: float = math.pi
    duration_s: typing.Optional[float] = None


@dataclass
class GridConfig:
    points: int = 2048
    extent_m: float = 60.0
    steps: int = 1000


@dataclass
class SweepConfig:
    """Sweep ``parameter`` (``section.key``) over ``count`` values in ``[start, stop]``.

    Values are evenly spaced unless ``random`` is set, in which case they are
    drawn uniformly from the run seed and sorted.
    """

    parameter: str = "laser.detuning_rad_per_s"
    start: float = -0.5
    stop: float = 0.5
    count: int = 11
    random: bool = False


@dataclass
class GuardConfig:
    strict: bool = False
    mass_defect_limit: float = 1e-3
    amplitude_limit: float = 1e-2
    elimination_limit: float = 0.1


@dataclass
class ChannelConfig:
    mass_defect: bool = False
    dark_matter: bool = False
    eep: bool = False
    wave_vector: bool = False
    chirp: bool = False
    stark: bool = False


@dataclass
class ScenarioConfig:
    units: UnitsConfig = field(default_factory=UnitsConfig)
    species: SpeciesConfig = field(default_factory=SpeciesConfig)
    laser: LaserConfig = field(default_factory=LaserConfig)
    dilaton: DilatonConfig = field(default_factory=DilatonConfig)
    packet: PacketConfig = field(default_factory=PacketConfig)
    pulse: PulseConfig = field(default_factory=PulseConfig)
    channels: ChannelConfig = field(default_factory=ChannelConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    guards: GuardConfig = field(default_factory=GuardConfig)
    engine: str = "analytic"

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data) -> "ScenarioConfig":
        config = _parse(cls, data, "")
        config.validate()
        return config

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}, column {exc.colno}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        return cls.from_json(Path(path).read_text())

    def validate(self) -> None:
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}", "engine")
        if self.laser.transition not in ("direct", "magnetic"):
            raise ConfigError("transition must be 'direct' or 'magnetic'", "laser.transition")
        if self.sweep.count < 1:
            raise ConfigError("sweep count must be positive", "sweep.count")
        section, _, key = self.sweep.parameter.partition(".")
        target = getattr(self, section, None)
        if not is_dataclass(target) or key not in {f.name for f in fields(target)}:
            raise ConfigError(f"unknown sweep parameter {self.sweep.parameter!r}", "sweep.parameter")
        hint = typing.get_type_hints(type(target))[key]
        if hint not in (float, typing.Optional[float]):
            raise ConfigError(f"sweep parameter {self.sweep.parameter!r} is not numeric", "sweep.parameter")
        if self.packet.sigma_per_m <= 0:
            raise ConfigError("packet width must be positive", "packet.sigma_per_m")
        if self.grid.points < 2 or self.grid.points & (self.grid.points - 1):
            raise ConfigError("grid points must be a power of two", "grid.points")

    def with_value(self, path: str, value) -> "ScenarioConfig":
        """Copy with ``section.key`` replaced by ``value``."""
        data = self.to_dict()
        section, _, key = path.partition(".")
        data[section][key] = value
        return ScenarioConfig.from_dict(data)


def _parse(cls, data, location):
    if not isinstance(data, dict):
        raise ConfigError("expected an object", location or "<root>")
    known = {f.name: f for f in fields(cls)}
    hints = typing.get_type_hints(cls)
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown key {key!r}", _join(location, key))
    values = {}
    for name, f in known.items():
        where = _join(location, name)
        if name not in data:
            if f.default is MISSING and f.default_factory is MISSING:
                raise ConfigError("missing required key", where)
            continue
        values[name] = _convert(hints[name], data[name], where)
    return cls(**values)


def _convert(hint, value, where):
    if is_dataclass(hint):
        return _parse(hint, value, where)
    if typing.get_origin(hint) is typing.Union:
        if value is None:
            return None
        hint = next(a for a in typing.get_args(hint) if a is not type(None))
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError("expected true or false", where)
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError("expected an integer", where)
        return value
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError("expected a finite number", where)
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ConfigError("expected a string", where)
        return value
    raise ConfigError(f"unsupported field type {hint!r}", where)


def _join(location, key):
    return f"{location}.{key}" if location else key


@dataclass(frozen=True)
class Resolved:
    """A configuration converted to internal units."""

    units: UnitSystem
    scenario: Scenario
    packet: GaussianWavePacket
    duration: float
    grid: GridSpec


def resolve(config: ScenarioConfig) -> Resolved:
    """Build the scenario, packet, pulse duration and grid in internal units."""
    u = config.units
    try:
        units = UnitSystem(
            time_scale=u.time_scale_s,
            length_scale=u.length_scale_m,
            speed_of_light=u.speed_of_light_m_per_s,
            grav_accel=u.grav_accel_m_per_s2,
            hbar=u.hbar_J_s,
        )
    except SpdiffError as exc:
        raise ConfigError(str(exc), "units") from exc
    nd = units.nondimensionalize
    c = units.c
    sp, la, di, pk, gd = config.species, config.laser, config.dilaton, config.packet, config.guards
    try:
        species = AtomSpecies(
            mass=nd(sp.mass_kg, "mass"),
            transition_frequency=nd(sp.transition_frequency_rad_per_s, "frequency"),
            beta_e=sp.beta_e,
            beta_g=sp.beta_g,
        )
        laser_kw = dict(
            chirp_rate=nd(la.chirp_rate_m_per_s2, "acceleration"),
            phase_offset=la.phase_offset_rad,
            electric_rabi=nd(la.electric_rabi_rad_per_s, "frequency"),
            magnetic_rabi=nd(la.magnetic_rabi_rad_per_s, "frequency"),
            ancilla_detuning=nd(la.ancilla_detuning_rad_per_s, "frequency"),
        )
        frequency = species.transition_frequency if la.frequency_rad_per_s is None else nd(la.frequency_rad_per_s, "frequency")
        laser = LaserField.from_frequency(frequency, c, **laser_kw)
        dilaton = DilatonField(
            amplitude=di.amplitude,
            frequency=nd(di.frequency_rad_per_s, "frequency"),
            wavenumber=di.wavenumber_per_m * units.length_scale,
            phase=di.phase_rad,
            eep_coefficient=di.eep_coefficient,
        )
        p_g = nd(pk.momentum_kg_m_per_s, "momentum")
        scenario = Scenario(
            species,
            laser,
            dilaton,
            gravity=units.g,
            speed_of_light=c,
            resonant_momentum=p_g + 0.5 * laser.wavenumber,
            channels=Channels(**asdict(config.channels)),
            transition=la.transition,
            strict=gd.strict,
            mass_defect_limit=gd.mass_defect_limit,
            amplitude_limit=gd.amplitude_limit,
            elimination_limit=gd.elimination_limit,
        )
        if la.frequency_rad_per_s is None:
            scenario = tuned_to_packet(scenario, p_g, nd(la.detuning_rad_per_s, "frequency"))
        sigma = pk.sigma_per_m * units.length_scale
        packet = GaussianWavePacket.symmetric(
            sigma, p_g, scenario.k, z_g=nd(pk.z_g_m, "length"), z_e=nd(pk.z_e_m, "length")
        )
    except ConfigError:
        raise
    except SpdiffError as exc:
        raise ConfigError(str(exc), "scenario") from exc
    pulse = config.pulse
    duration = pulse.area_rad / abs(scenario.rabi) if pulse.duration_s is None else nd(pulse.duration_s, "time")
    extent = nd(config.grid.extent_m, "length")
    if duration < 0:
        raise ConfigError("pulse duration must be non-negative", "pulse.duration_s")
    # A zero-length pulse still needs a valid grid; borrow the mirror-pulse step.
    span = duration if duration > 0 else math.pi / abs(scenario.rabi)
    grid = GridSpec(extent, config.grid.points, span / config.grid.steps, center=-packet.mean_z)
    return Resolved(units, scenario, packet, duration, grid)
