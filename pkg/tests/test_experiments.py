import csv
import io
import json
import math

import numpy as np
import pytest

from spdiff import ConfigError
from spdiff.config import ScenarioConfig, resolve
from spdiff.experiments import (
    Table,
    run_chirp_sweep,
    run_phase_budget,
    run_rabi,
    run_resonance_scan,
    sweep_values,
    worker_count,
)
from spdiff.resonance import resonant_laser_frequency

FALLING = {"units": {"grav_accel_m_per_s2": 0.1}, "laser": {"chirp_rate_m_per_s2": -0.1}}


def _config(sweep, engine="analytic", channels=None, **sections):
    data = {k: dict(v) for k, v in FALLING.items()}
    for key, value in sections.items():
        data.setdefault(key, {}).update(value)
    data["channels"] = {"chirp": True, **(channels or {})}
    data["sweep"] = sweep
    data["engine"] = engine
    return ScenarioConfig.from_dict(data)


def test_rabi_peak_at_mirror_pulse():
    config = _config({"parameter": "pulse.duration_s", "start": 0.0, "stop": 2 * math.pi, "count": 9}, engine="both")
    table = run_rabi(config)
    assert len(table.rows) == 9
    transfer = table.column("transfer_oracle")
    i = int(np.argmax(transfer))
    assert table.column("pulse_area")[i] == pytest.approx(math.pi)
    assert transfer[i] == pytest.approx(1.0, abs=1e-9)
    assert table.column("transfer_analytic")[i] == pytest.approx(1.0, abs=1e-12)
    assert table.guards_passed


def _fwhm(x, y):
    half = 0.5 * y.max()
    above = np.nonzero(y >= half)[0]
    lo, hi = above[0], above[-1]
    left = np.interp(half, [y[lo - 1], y[lo]], [x[lo - 1], x[lo]])
    right = np.interp(half, [y[hi + 1], y[hi]], [x[hi + 1], x[hi]])
    return right - left


def test_line_width_scales_inversely_with_duration():
    widths = []
    for rabi in (0.5, 1.0):
        sweep = {"parameter": "laser.detuning_rad_per_s", "start": -2.0 * rabi, "stop": 2.0 * rabi, "count": 81}
        table = run_rabi(_config(sweep, engine="oracle", laser={"electric_rabi_rad_per_s": rabi}))
        width = _fwhm(table.column("laser.detuning_rad_per_s"), table.column("transfer_oracle"))
        widths.append(width * table.column("duration")[0])
    # pi-pulse line shape: half maximum at a detuning of 0.799 Rabi frequencies.
    assert widths[0] == pytest.approx(widths[1], rel=1e-2)
    assert widths[0] == pytest.approx(2 * 0.7989 * math.pi, rel=1e-2)


def _scan(stark, transition):
    laser = {"transition": transition, "electric_rabi_rad_per_s": 2.0, "magnetic_rabi_rad_per_s": 1.0, "ancilla_detuning_rad_per_s": 20.0}
    base = resolve(_config({"parameter": "laser.detuning_rad_per_s", "count": 1}, laser=laser, channels={"stark": stark}))
    w0 = base.scenario.laser.frequency
    laser["frequency_rad_per_s"] = w0
    sweep = {"parameter": "laser.frequency_rad_per_s", "start": w0 - 0.1, "stop": w0 + 0.1, "count": 5}
    return run_resonance_scan(_config(sweep, engine="oracle", laser=laser, channels={"stark": stark}, guards={"elimination_limit": 1.0}))


def test_scan_reports_the_resonance_module_line():
    table = _scan(True, "magnetic")
    s = resolve(_config({"parameter": "laser.detuning_rad_per_s", "count": 1})).scenario
    predicted = table.metadata["predicted_frequency"]
    np.testing.assert_array_equal(table.column("predicted_frequency"), predicted)
    sp = resolve(ScenarioConfig.from_dict(table.metadata["config"])).scenario
    assert predicted == resonant_laser_frequency(sp.species, sp.laser, sp.resonant_momentum, sp.c, stark=True)
    assert table.metadata["resonance"]["within_tolerance"]
    # The Stark shift feeds back through the photon momentum k = omega_L / c.
    stark = 3.0 / 80.0 / (1 - sp.resonant_momentum / (sp.mass * sp.c))
    no_stark = resonant_laser_frequency(sp.species, sp.laser, sp.resonant_momentum, sp.c, stark=False)
    assert predicted - no_stark == pytest.approx(stark, rel=1e-9)
    assert s.c == sp.c


def test_scan_without_stark_shift_finds_bare_line():
    table = _scan(False, "direct")
    sp = resolve(ScenarioConfig.from_dict(table.metadata["config"])).scenario
    bare = sp.species.transition_frequency + sp.k * sp.resonant_momentum / sp.mass
    assert table.metadata["predicted_frequency"] == pytest.approx(bare, rel=1e-12)
    res = table.metadata["resonance"]
    assert res["within_tolerance"]
    assert abs(res["oracle_frequency"] - bare) <= abs(sp.rabi) / 20


BUDGET = dict(
    channels={"mass_defect": True, "wave_vector": True, "eep": True, "dark_matter": True},
    species={"beta_e": 0.01, "beta_g": -0.005},
    dilaton={"amplitude": 2e-3, "wavenumber_per_m": 0.02, "phase_rad": 0.7, "eep_coefficient": 1.0},
    packet={"z_g_m": 0.5, "z_e_m": 0.8},
    guards={"mass_defect_limit": 1.0},
)


def test_phase_budget_bookkeeping():
    sweep = {"parameter": "laser.chirp_rate_m_per_s2", "start": -0.12, "stop": -0.08, "count": 3}
    table = run_phase_budget(_config(sweep, **BUDGET))
    lines = sum(table.column(n) for n in ("phi0", "phi_dm", "phi_ep", "phi_md", "phi_wv"))
    np.testing.assert_allclose(table.column("total"), lines, rtol=0, atol=1e-14 * np.max(np.abs(lines)))
    assert list(table.column("chirp_perfect")) == [False, True, False]
    for line in ("dm", "ep", "md"):
        np.testing.assert_allclose(table.column(f"phi_{line}_2x"), 2 * table.column(f"phi_{line}"), rtol=1e-12)
    assert np.all(np.isfinite(table.column("wv_md_ratio")))


def test_phase_budget_requires_mirror_pulse():
    sweep = {"parameter": "laser.chirp_rate_m_per_s2", "start": -0.1, "stop": -0.1, "count": 1}
    with pytest.raises(ConfigError):
        run_phase_budget(_config(sweep, pulse={"area_rad": 1.0}))


def test_phase_budget_oracle_columns(tmp_path):
    sweep = {"parameter": "laser.chirp_rate_m_per_s2", "start": -0.1, "stop": -0.1, "count": 1}
    config = _config(sweep, engine="both", channels={"mass_defect": True}, guards={"mass_defect_limit": 1.0}, grid={"steps": 200}, packet={"z_g_m": 0.66, "z_e_m": 0.66})
    table = run_phase_budget(config, snapshot_dir=tmp_path)
    assert table.column("oracle_md")[0] == pytest.approx(table.column("phi_md")[0], rel=2e-2)
    assert table.column("oracle_dm")[0] == 0.0
    diff = table.column("oracle_total")[0] - table.column("total")[0]
    assert abs(math.remainder(diff, 2 * math.pi)) < 1e-3
    assert (tmp_path / "phase-budget_0000.spdf").exists()


def test_chirp_sweep():
    sweep = {"parameter": "laser.chirp_rate_m_per_s2", "start": -0.1, "stop": -0.08, "count": 5}
    table = run_chirp_sweep(_config(sweep, channels={"wave_vector": True}, packet={"z_g_m": 0.66, "z_e_m": 0.66}))
    mismatch = table.column("mismatch")
    assert mismatch[0] == 0.0
    assert table.column("nu3")[0] == 0.0
    assert table.column("width_terms")[0] == 0.0
    fit = table.metadata["doppler_fit"]
    assert fit["relative_residual"] < 1e-3
    assert fit["relative_intercept"] < 1e-3
    gap = np.abs(table.column("wv_difference"))
    assert gap[0] <= 1e-13
    assert np.all(np.diff(gap) > 0)


def test_chirp_sweep_needs_chirp_channel():
    config = ScenarioConfig.from_dict({"sweep": {"parameter": "laser.chirp_rate_m_per_s2"}})
    with pytest.raises(ConfigError):
        run_chirp_sweep(config)


def test_strict_guards_turn_into_failed_rows():
    sweep = {"parameter": "laser.detuning_rad_per_s", "start": 0.0, "stop": 0.0, "count": 1}
    config = _config(sweep, channels={"mass_defect": True})
    soft = run_rabi(config)
    assert not soft.guards_passed
    assert soft.column("transfer_analytic")[0] == pytest.approx(1.0, abs=1e-3)
    strict = run_rabi(config, strict=True)
    assert not strict.guards_passed
    assert math.isnan(strict.column("transfer_analytic")[0])
    assert "mass-defect" in strict.rows[0][-1]


def test_random_sweep_is_seeded():
    config = _config({"parameter": "laser.detuning_rad_per_s", "start": -1, "stop": 1, "count": 6, "random": True})
    a, b, c = sweep_values(config, 3), sweep_values(config, 3), sweep_values(config, 4)
    assert a == b != c
    assert a == sorted(a) and all(-1 <= v <= 1 for v in a)


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("SPDIFF_THREADS", "2")
    assert worker_count(10) <= 2
    assert worker_count(1) == 1
    monkeypatch.setenv("SPDIFF_THREADS", "many")
    with pytest.raises(ConfigError):
        worker_count(4)


def test_pool_size_does_not_change_results(monkeypatch):
    config = _config({"parameter": "laser.detuning_rad_per_s", "start": -0.5, "stop": 0.5, "count": 4}, engine="both")
    serial = run_rabi(config)
    monkeypatch.setenv("SPDIFF_THREADS", "2")
    pooled = run_rabi(config)
    assert serial.to_csv() == pooled.to_csv()


def test_csv_and_sidecar(tmp_path):
    table = Table("demo", ("x", "flag", "note"), [(0.1, True, 'a "quoted", text'), (1e-20, False, "")], {"guards": {"passed": True}, "v": np.float64(2.0)})
    csv_path, json_path = table.write(tmp_path)
    raw = csv_path.read_bytes()
    assert raw.startswith(b"x,flag,note\r\n")
    rows = list(csv.reader(io.StringIO(raw.decode(), newline="")))
    assert rows[1] == ["0.1", "true", 'a "quoted", text']
    assert float(rows[2][0]) == 1e-20
    assert json.loads(json_path.read_text())["v"] == 2.0
