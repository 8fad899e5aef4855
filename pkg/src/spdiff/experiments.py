"""The four batch experiments behind the command line.

Each experiment resolves one configuration per sweep value, evaluates the
analytic and/or oracle engines, and returns a :class:`Table` whose metadata
is enough to reproduce it. Sweep points run in a process pool capped by the
``SPDIFF_THREADS`` environment variable; rows are collected in sweep order,
so results do not depend on the pool size.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import platform
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numba
import numpy as np
import scipy

from . import __version__, phases
from .config import ScenarioConfig, resolve
from .errors import ConfigError, RegimeError, RegimeWarning, UndefinedRatioError
from .oracle import grid_evolve, locate_resonance, ode_transfer
from .propagator import propagate_heisenberg
from .resonance import detuning_polynomial, doppler_slope, resonant_laser_frequency

EXPERIMENTS = ("rabi", "resonance-scan", "phase-budget", "chirp-sweep")
THREADS_ENV = "SPDIFF_THREADS"
CHANNEL_LINES = {"dark_matter": "dm", "eep": "ep", "mass_defect": "md", "wave_vector": "wv"}


@dataclass
class Table:
    """Rows of one experiment plus the metadata needed to reproduce them."""

    name: str
    columns: tuple
    rows: list
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows])

    @property
    def guards_passed(self) -> bool:
        return self.metadata.get("guards", {}).get("passed", True)

    def to_csv(self) -> str:
        """RFC 4180 text with shortest round-trip float formatting."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\r\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_cell(v) for v in row])
        return buffer.getvalue()

    def write(self, out_dir, stem: str | None = None) -> tuple[Path, Path]:
        """Write ``<stem>.csv`` and its ``<stem>.json`` sidecar into ``out_dir``."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = stem or self.name
        csv_path, json_path = out / f"{stem}.csv", out / f"{stem}.json"
        csv_path.write_text(self.to_csv(), newline="")
        json_path.write_text(json.dumps(self.metadata, indent=2, sort_keys=True, default=_json_default) + "\n")
        return csv_path, json_path


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def engine_versions() -> dict:
    return {
        "spdiff": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
        "python": platform.python_version(),
    }


def sweep_values(config: ScenarioConfig, seed: int = 0) -> list[float]:
    sw = config.sweep
    if sw.random:
        values = np.sort(np.random.default_rng(seed).uniform(sw.start, sw.stop, sw.count))
    else:
        values = np.linspace(sw.start, sw.stop, sw.count)
    return [float(v) for v in values]


def worker_count(tasks: int) -> int:
    cap = os.environ.get(THREADS_ENV)
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = min(limit, max(1, int(cap)))
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV} must be a positive integer", THREADS_ENV) from exc
    return max(1, min(limit, tasks))


def _map(function, items):
    items = [(function, item) for item in items]
    function = _safe_row
    workers = worker_count(len(items))
    if workers == 1:
        return [function(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(function, items))


def _safe_row(job):
    """Evaluate one sweep row; a strict guard failure yields an empty row."""
    function, task = job
    try:
        return function(task)
    except RegimeError as exc:
        return None, [str(exc)]


def _guarded(compute, *args):
    """Run ``compute`` and collect guard failures instead of letting them escape.

    Returns ``(values, messages)``; ``values`` is ``None`` when a strict guard
    aborted the row.
    """
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RegimeWarning)
        try:
            values = compute(*args)
        except RegimeError as exc:
            return None, [str(exc)]
    messages = sorted({str(w.message) for w in caught if issubclass(w.category, RegimeWarning)})
    return values, messages


def _scenario_guards(resolved) -> list[str]:
    """Guard warnings of the scenario; in strict mode a failure aborts the row."""
    status, messages = _guarded(resolved.scenario.guard_status)
    if status is None:
        raise RegimeError(messages[0])
    return messages


def _evaluation_point(resolved):
    """Heisenberg phase-space point of the ground packet: its center and mean momentum."""
    pk = resolved.packet
    return -pk.z_g, pk.p_g + 0.5 * resolved.scenario.k


def _build(name, config, seed, columns, row_function, extra=None):
    values = sweep_values(config, seed)
    data = config.to_dict()
    results = _map(row_function, [(data, config.sweep.parameter, v) for v in values])
    rows, failures = [], []
    for i, (value, (row, messages)) in enumerate(zip(values, results)):
        if row is None:
            row = (value,) + (math.nan,) * (len(columns) - 2) + ("; ".join(messages),)
        rows.append(row)
        failures.extend({"row": i, "message": m} for m in messages)
    metadata = {
        "experiment": name,
        "config": data,
        "seed": seed,
        "versions": engine_versions(),
        "sweep": {"parameter": config.sweep.parameter, "values": values},
        "guards": {"passed": not failures, "failures": failures},
    }
    if extra:
        metadata.update(extra)
    return Table(name, tuple(columns), rows, metadata)


def _with_strict(config: ScenarioConfig, strict: bool | None) -> ScenarioConfig:
    if strict is None:
        return config
    return replace(config, guards=replace(config.guards, strict=strict))


def _uses(engine: str, which: str) -> bool:
    return engine in (which, "both")


# --- rabi -------------------------------------------------------------------

RABI_COLUMNS = ("duration", "laser_frequency", "pulse_area", "epsilon", "transfer_analytic", "transfer_oracle")


def _rabi_row(task):
    data, parameter, value = task
    config = ScenarioConfig.from_dict(data).with_value(parameter, value)
    resolved = resolve(config)
    messages = _scenario_guards(resolved)
    s, t = resolved.scenario, resolved.duration
    z, p = _evaluation_point(resolved)
    analytic = oracle = eps = math.nan
    if _uses(config.engine, "analytic"):
        prop, found = _guarded(propagate_heisenberg, s, z, p, t)
        messages += found
        if prop is not None:
            analytic, eps = prop.transfer_probability(), prop.epsilon
    if _uses(config.engine, "oracle"):
        oracle = ode_transfer(s, z, p, t, "g")
    row = (value, t, s.laser.frequency, abs(s.rabi) * t, eps, analytic, oracle, "; ".join(messages))
    return row, messages


def run_rabi(config: ScenarioConfig, seed: int = 0, strict: bool | None = None) -> Table:
    """Transfer probability across the sweep, analytic and oracle side by side.

    Sweep ``pulse.duration_s`` for Rabi oscillations in time or
    ``laser.detuning_rad_per_s`` for the detuning line shape.
    """
    config = _with_strict(config, strict)
    columns = (config.sweep.parameter,) + RABI_COLUMNS + ("guards",)
    return _build("rabi", config, seed, columns, _rabi_row)


# --- resonance scan -----------------------------------------------------------

SCAN_COLUMNS = ("laser_frequency", "predicted_frequency", "transfer_analytic", "transfer_oracle")


def _predicted(s):
    return resonant_laser_frequency(s.species, s.laser, s.resonant_momentum, s.c, stark=s.channels.stark)


def _scan_row(task):
    data, parameter, value = task
    config = ScenarioConfig.from_dict(data).with_value(parameter, value)
    resolved = resolve(config)
    messages = _scenario_guards(resolved)
    s, t = resolved.scenario, resolved.duration
    z, p = _evaluation_point(resolved)
    analytic = oracle = math.nan
    if _uses(config.engine, "analytic"):
        prop, found = _guarded(propagate_heisenberg, s, z, p, t)
        messages += found
        if prop is not None:
            analytic = prop.transfer_probability()
    if _uses(config.engine, "oracle"):
        oracle = ode_transfer(s, z, p, t, "g")
    return (value, s.laser.frequency, math.nan, analytic, oracle, "; ".join(messages)), messages


def run_resonance_scan(config: ScenarioConfig, seed: int = 0, strict: bool | None = None) -> Table:
    """Scan the laser frequency (or another parameter) through the resonance.

    The metadata records the analytic resonance and, with an oracle engine,
    the refined oracle maximum within the scanned frequency range.
    """
    config = _with_strict(config, strict)
    columns = (config.sweep.parameter,) + SCAN_COLUMNS + ("guards",)
    table = _build("resonance-scan", config, seed, columns, _scan_row)
    base = resolve(config)
    s = base.scenario
    predicted = _predicted(s)
    i = columns.index("predicted_frequency")
    table.rows = [row[:i] + (predicted,) + row[i + 1:] for row in table.rows]
    table.metadata["predicted_frequency"] = predicted
    if _uses(config.engine, "oracle") and table.rows:
        z, p = _evaluation_point(base)
        frequencies = table.column("laser_frequency")
        half_width = float(max(np.max(np.abs(frequencies - predicted)), 10 * abs(s.rabi)))
        found, transfer = locate_resonance(s, predicted, half_width, z=z, p=p)
        tolerance = abs(s.rabi) / 20
        table.metadata["resonance"] = {
            "oracle_frequency": found,
            "oracle_transfer": transfer,
            "offset": found - predicted,
            "tolerance": tolerance,
            "within_tolerance": abs(found - predicted) <= tolerance,
        }
    return table


# --- phase budget -------------------------------------------------------------

BUDGET_LINES = ("phi0", "phi_dm", "phi_ep", "phi_md", "phi_wv")
BUDGET_COLUMNS = BUDGET_LINES + ("total", "chirp_perfect", "wv_md_ratio", "phi_dm_2x", "phi_ep_2x", "phi_md_2x")
ORACLE_COLUMNS = ("oracle_total", "oracle_dm", "oracle_ep", "oracle_md", "oracle_wv")


def _doubled(s, line):
    """Scenario whose coupling for one budget line is doubled."""
    if line == "dm":
        return s.with_(dilaton=replace(s.dilaton, amplitude=2 * s.dilaton.amplitude))
    if line == "ep":
        return s.with_(dilaton=replace(s.dilaton, eep_coefficient=2 * s.dilaton.eep_coefficient))
    return s.with_(species=replace(s.species, transition_frequency=2 * s.species.transition_frequency))


def _final_momentum(resolved):
    s = resolved.scenario
    return resolved.packet.p_g - s.mass * s.g * resolved.duration


def _oracle_phase(resolved, scenario, snapshot=None):
    result = grid_evolve(scenario, resolved.packet, resolved.grid, resolved.duration, snapshot=snapshot)
    return result.mirror_phase(_final_momentum(resolved), scenario.k)


def _wrap(x):
    return float(np.angle(np.exp(1j * x)))


def _budget_row(task):
    data, parameter, value, snapshot = task
    config = ScenarioConfig.from_dict(data).with_value(parameter, value)
    resolved = resolve(config)
    messages = _scenario_guards(resolved)
    s, pk, t = resolved.scenario, resolved.packet, resolved.duration
    if not math.isclose(config.pulse.area_rad, math.pi, rel_tol=1e-12) or not math.isclose(abs(s.rabi) * t, math.pi, rel_tol=1e-9):
        raise ConfigError("the phase budget requires a mirror pulse of area pi", "pulse")
    p = _final_momentum(resolved)
    values = {}
    if _uses(config.engine, "analytic"):
        budget, found = _guarded(phases.mirror_phase_budget, pk, s, p, t)
        messages += found
        if budget is not None:
            values.update(budget.as_dict())
            try:
                values["wv_md_ratio"] = phases.wv_md_ratio(s, pk, p, t)
            except UndefinedRatioError:
                values["wv_md_ratio"] = math.nan
            for line, fn in (("dm", phases.dm_phase), ("ep", phases.ep_phase), ("md", phases.md_phase)):
                doubled, found = _guarded(fn, pk, _doubled(s, line), p, t)
                messages += found
                values[f"phi_{line}_2x"] = math.nan if doubled is None else doubled
    if _uses(config.engine, "oracle"):
        values["oracle_total"] = _oracle_phase(resolved, s, snapshot)
        quiet = s.with_channels(**{name: False for name in CHANNEL_LINES})
        reference = None
        for name, line in CHANNEL_LINES.items():
            if getattr(s.channels, name):
                if reference is None:
                    reference = _oracle_phase(resolved, quiet)
                alone = quiet.with_channels(**{name: True})
                values[f"oracle_{line}"] = _wrap(_oracle_phase(resolved, alone) - reference)
            else:
                values[f"oracle_{line}"] = 0.0
    return values, messages


def run_phase_budget(config: ScenarioConfig, seed: int = 0, strict: bool | None = None, snapshot_dir=None) -> Table:
    """Mirror-pulse phase budget per sweep value.

    Analytic columns hold the five budget lines, their total, the
    wave-vector to mass-defect ratio and the doubled-coupling lines. Oracle
    columns hold the grid phase (unwrapped along the sweep) and, for each
    enabled channel, the grid phase difference with that channel alone on.
    """
    config = _with_strict(config, strict)
    names = ()
    if _uses(config.engine, "analytic"):
        names += BUDGET_COLUMNS
    if _uses(config.engine, "oracle"):
        names += ORACLE_COLUMNS
    values = sweep_values(config, seed)
    data = config.to_dict()
    tasks = []
    for i, v in enumerate(values):
        snap = None if snapshot_dir is None else str(Path(snapshot_dir) / f"phase-budget_{i:04d}.spdf")
        tasks.append((data, config.sweep.parameter, v, snap))
    results = _map(_budget_row, tasks)
    results = [({} if row is None else row, messages) for row, messages in results]
    if "oracle_total" in names:
        done = [r for r, _ in results if "oracle_total" in r]
        for r, u in zip(done, np.unwrap([r["oracle_total"] for r in done])):
            r["oracle_total"] = float(u)
    rows, failures = [], []
    for i, (v, (row, messages)) in enumerate(zip(values, results)):
        rows.append((v,) + tuple(row.get(n, math.nan) for n in names) + ("; ".join(messages),))
        failures.extend({"row": i, "message": m} for m in messages)
    metadata = {
        "experiment": "phase-budget",
        "config": data,
        "seed": seed,
        "versions": engine_versions(),
        "sweep": {"parameter": config.sweep.parameter, "values": values},
        "guards": {"passed": not failures, "failures": failures},
    }
    return Table("phase-budget", (config.sweep.parameter,) + names + ("guards",), rows, metadata)


# --- chirp sweep --------------------------------------------------------------

CHIRP_COLUMNS = ("chirp_rate", "mismatch", "nu3", "width_terms", "doppler_slope", "phi_wv_general", "phi_wv_perfect", "wv_difference")


def _chirp_row(task):
    data, parameter, value = task
    config = ScenarioConfig.from_dict(data).with_value(parameter, value)
    resolved = resolve(config)
    messages = _scenario_guards(resolved)
    s, pk, t = resolved.scenario, resolved.packet, resolved.duration
    z, p_mean = _evaluation_point(resolved)
    p = _final_momentum(resolved)
    perfect_scenario = s.with_(laser=replace(s.laser, chirp_rate=-s.g))
    general, found = _guarded(phases.wv_phase_general, pk, s, p, t)
    messages += found
    perfect, found = _guarded(phases.wv_phase_perfect, pk, perfect_scenario, p, t)
    messages += found
    general = math.nan if general is None else general
    perfect = math.nan if perfect is None else perfect
    row = (
        value,
        s.alpha,
        s.g + s.alpha,
        float(detuning_polynomial(s, z, p_mean).detuning[3]),
        phases.width_terms(pk, s, p, t),
        float(doppler_slope(s, z, p_mean)),
        general,
        perfect,
        general - perfect,
        "; ".join(messages),
    )
    return row, messages


def run_chirp_sweep(config: ScenarioConfig, seed: int = 0, strict: bool | None = None) -> Table:
    """Sweep the chirp rate around perfect compensation of free fall.

    The metadata holds a least-squares line of the Doppler slope against the
    chirp mismatch ``g + alpha`` with its intercept and relative residual.
    """
    config = _with_strict(config, strict)
    if not config.channels.chirp:
        raise ConfigError("the chirp sweep needs the chirp channel", "channels.chirp")
    columns = (config.sweep.parameter,) + CHIRP_COLUMNS + ("guards",)
    table = _build("chirp-sweep", config, seed, columns, _chirp_row)
    x, y = table.column("mismatch"), table.column("doppler_slope")
    if len(x) >= 2 and np.ptp(x) > 0:
        slope, intercept = np.polyfit(x, y, 1)
        scale = float(np.max(np.abs(y))) or 1.0
        residual = float(np.max(np.abs(y - (slope * x + intercept)))) / scale
        table.metadata["doppler_fit"] = {
            "slope": float(slope),
            "intercept": float(intercept),
            "relative_intercept": abs(float(intercept)) / scale,
            "relative_residual": residual,
        }
    return table


RUNNERS = {
    "rabi": run_rabi,
    "resonance-scan": run_resonance_scan,
    "phase-budget": run_phase_budget,
    "chirp-sweep": run_chirp_sweep,
}
