import json
import subprocess
import sys

import pytest

from spdiff.cli import EXIT_GUARDS, EXIT_NUMERICS, EXIT_OK, EXIT_USAGE, main

BASE = {
    "units": {"grav_accel_m_per_s2": 0.1},
    "laser": {"chirp_rate_m_per_s2": -0.1},
    "channels": {"chirp": True, "wave_vector": True},
    "packet": {"z_g_m": 0.66, "z_e_m": 0.66},
    "sweep": {"parameter": "laser.detuning_rad_per_s", "start": -0.02, "stop": 0.02, "count": 3},
}


def _write(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_rabi_writes_table_and_sidecar(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["rabi", _write(tmp_path, BASE), "--out-dir", str(out)]) == EXIT_OK
    shown = capsys.readouterr().out.split()
    assert shown == [str(out / "rabi.csv"), str(out / "rabi.json")]
    lines = (out / "rabi.csv").read_text().splitlines()
    assert len(lines) == 1 + 3
    meta = json.loads((out / "rabi.json").read_text())
    assert meta["experiment"] == "rabi" and meta["guards"]["passed"]
    assert set(meta["versions"]) >= {"spdiff", "numpy", "scipy", "numba"}


@pytest.mark.parametrize("command", ["rabi", "chirp-sweep", "phase-budget"])
def test_rerun_from_sidecar_is_bit_identical(tmp_path, command):
    data = dict(BASE, sweep={"parameter": "laser.chirp_rate_m_per_s2", "start": -0.11, "stop": -0.09, "count": 4, "random": True})
    first, second = tmp_path / "a", tmp_path / "b"
    assert main([command, _write(tmp_path, data), "--out-dir", str(first), "--seed", "7"]) == EXIT_OK
    stem = command
    assert main([command, str(first / f"{stem}.json"), "--out-dir", str(second)]) == EXIT_OK
    assert (first / f"{stem}.csv").read_bytes() == (second / f"{stem}.csv").read_bytes()
    assert (first / f"{stem}.json").read_text() == (second / f"{stem}.json").read_text()


def test_guard_failure_exit_code_and_soft_mode(tmp_path):
    data = dict(BASE, channels={"chirp": True, "mass_defect": True})
    path = _write(tmp_path, data)
    assert main(["rabi", path, "--out-dir", str(tmp_path / "o")]) == EXIT_GUARDS
    assert main(["rabi", path, "--out-dir", str(tmp_path / "o"), "--soft"]) == EXIT_OK
    assert main(["rabi", path, "--out-dir", str(tmp_path / "o"), "--strict"]) == EXIT_GUARDS
    with pytest.raises(SystemExit) as info:
        main(["rabi", path, "--strict", "--soft"])
    assert info.value.code == EXIT_USAGE


def test_configuration_errors_exit_with_usage_code(tmp_path, caplog):
    assert main(["rabi", _write(tmp_path, {"lasers": {}})]) == EXIT_USAGE
    assert "lasers" in caplog.text
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["rabi", str(bad)]) == EXIT_USAGE
    assert main(["rabi", str(tmp_path / "missing.json")]) == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        main(["teleport", str(bad)])
    assert info.value.code == EXIT_USAGE


def test_boundary_leak_exits_with_numerics_code(tmp_path):
    data = dict(BASE, grid={"points": 64, "extent_m": 4.0, "steps": 20}, sweep={"parameter": "laser.chirp_rate_m_per_s2", "start": -0.1, "stop": -0.1, "count": 1})
    assert main(["phase-budget", _write(tmp_path, data), "--engine", "oracle", "--out-dir", str(tmp_path)]) == EXIT_NUMERICS


def test_validate_config(tmp_path, capsys):
    assert main(["validate-config", _write(tmp_path, BASE)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["valid"] and report["guard_messages"] == []
    assert report["internal"]["wavenumber"] == pytest.approx(report["internal"]["laser_frequency"] / 10.0)
    loud = dict(BASE, channels={"mass_defect": True})
    assert main(["validate-config", _write(tmp_path, loud)]) == EXIT_GUARDS
    assert main(["validate-config", _write(tmp_path, loud), "--strict"]) == EXIT_GUARDS


def test_snapshot_writes_baseline_and_grids(tmp_path):
    data = dict(BASE, grid={"steps": 100}, sweep={"parameter": "laser.chirp_rate_m_per_s2", "start": -0.1, "stop": -0.1, "count": 1})
    out = tmp_path / "out"
    assert main(["phase-budget", _write(tmp_path, data), "--engine", "both", "--snapshot", "--out-dir", str(out)]) == EXIT_OK
    assert (out / "baseline" / "phase-budget.csv").read_bytes() == (out / "phase-budget.csv").read_bytes()
    assert (out / "snapshots" / "phase-budget_0000.spdf").read_bytes()[:4] == b"SPDF"


def test_module_entry_point(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "spdiff", "validate-config", _write(tmp_path, BASE)], capture_output=True, text=True
    )
    assert result.returncode == 0
    assert json.loads(result.stdout)["valid"]
    version = subprocess.run([sys.executable, "-m", "spdiff", "--version"], capture_output=True, text=True)
    assert version.stdout.startswith("spdiff ")
