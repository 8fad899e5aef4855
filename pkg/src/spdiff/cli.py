"""Command-line front end: ``spdiff <experiment> CONFIG [options]``.

Exit codes: 0 success, 1 unexpected library error, 2 usage or configuration
error, 3 a regime guard failed (unless ``--soft``), 4 a numerical check
failed (non-convergence or boundary leak).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import ENGINES, ScenarioConfig, resolve
from .errors import BoundaryLeakError, ConfigError, ConvergenceError, RegimeError, SpdiffError
from .experiments import EXPERIMENTS, RUNNERS, _guarded

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_GUARDS = 3
EXIT_NUMERICS = 4

log = logging.getLogger("spdiff")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spdiff", description="Single-photon diffraction phase and transfer experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("config", help="scenario JSON file, or the JSON sidecar of an earlier run")
        mode = p.add_mutually_exclusive_group()
        mode.add_argument("--strict", action="store_true", help="turn regime-guard warnings into row failures")
        mode.add_argument("--soft", action="store_true", help="exit 0 even when regime guards fail")
        p.add_argument("--engine", choices=ENGINES, help="override the configured engine")
        p.add_argument("--out-dir", default=".", type=Path, help="directory for all output files")
        p.add_argument("--seed", type=int, help="seed for randomized sweeps (default: sidecar seed or 0)")
        p.add_argument("--snapshot", action="store_true", help="also write a regression baseline and grid snapshots")
    p = sub.add_parser("validate-config", help="check a configuration and report guard statuses")
    p.add_argument("config")
    p.add_argument("--strict", action="store_true")
    return parser


def load_config(path) -> tuple[ScenarioConfig, int | None]:
    """Read a configuration, accepting an output sidecar in place of a config."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc.strerror}", str(path)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from exc
    if isinstance(data, dict) and "experiment" in data and "config" in data:
        return ScenarioConfig.from_dict(data["config"]), data.get("seed")
    return ScenarioConfig.from_dict(data), None


def _validate(args) -> int:
    config, _ = load_config(args.config)
    if args.strict:
        config = replace(config, guards=replace(config.guards, strict=True))
    resolved = resolve(config)
    status, messages = _guarded(resolved.scenario.guard_status)
    s = resolved.scenario
    report = {
        "valid": True,
        "guards": status,
        "guard_messages": messages,
        "internal": {
            "laser_frequency": s.laser.frequency,
            "wavenumber": s.k,
            "rabi_frequency": s.rabi,
            "duration": resolved.duration,
            "grid_points": resolved.grid.points,
        },
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK if not messages else EXIT_GUARDS


def _run(args) -> int:
    config, sidecar_seed = load_config(args.config)
    if args.engine:
        config = replace(config, engine=args.engine)
    seed = args.seed if args.seed is not None else (sidecar_seed or 0)
    out_dir = Path(args.out_dir)
    runner = RUNNERS[args.command]
    kwargs = {"seed": seed, "strict": True if args.strict else None}
    if args.command == "phase-budget" and args.snapshot and config.engine != "analytic":
        kwargs["snapshot_dir"] = out_dir / "snapshots"
        kwargs["snapshot_dir"].mkdir(parents=True, exist_ok=True)
    table = runner(config, **kwargs)
    for path in table.write(out_dir):
        print(path)
    if args.snapshot:
        for path in table.write(out_dir / "baseline"):
            print(path)
    if not table.guards_passed:
        for failure in table.metadata["guards"]["failures"]:
            log.warning("row %d: %s", failure["row"], failure["message"])
        return EXIT_OK if args.soft else EXIT_GUARDS
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(format="%(name)s: %(message)s", level=logging.WARNING)
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate-config":
            return _validate(args)
        return _run(args)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_USAGE
    except RegimeError as exc:
        log.error("regime guard failed: %s", exc)
        return EXIT_GUARDS
    except (ConvergenceError, BoundaryLeakError) as exc:
        log.error("numerical check failed: %s", exc)
        return EXIT_NUMERICS
    except SpdiffError as exc:
        log.error("%s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
