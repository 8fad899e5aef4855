import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spdiff import DispersionError, InvalidInputError, LaserField, RegimeWarning, UndefinedRatioError
from spdiff.threelevel import (
    build_rotating_hamiltonian,
    laser_phase,
    laser_phase_rate,
    momentum_displacement,
    rwa_validity,
    state_energy,
)

from conftest import C, toy_scenario


def test_phase_at_origin_is_minus_offset():
    laser = LaserField.from_frequency(10.0, 10.0, phase_offset=0.4, chirp_rate=-1.0)
    assert laser_phase(laser, 0.0, 0.0, g=1.0, c=10.0) == -0.4


def test_plane_wave_limit():
    laser = LaserField.from_frequency(10.0, 10.0)
    z, t = np.array([0.3, -1.2]), np.array([0.5, 2.0])
    np.testing.assert_allclose(laser_phase(laser, z, t, g=0.0, c=10.0), laser.wavenumber * z - 10.0 * t, rtol=1e-15)


def test_chirped_phase_arithmetic():
    laser = LaserField(wavenumber=1.0, frequency=10.0, chirp_rate=-1.0)
    assert laser_phase(laser, 1.0, 1.0, g=1.0, c=10.0) == pytest.approx(-8.6, rel=1e-14)


def test_phase_rate_is_time_derivative():
    laser = LaserField(wavenumber=1.0, frequency=10.0, chirp_rate=-0.3)
    z, t, h = 0.7, 1.3, 1e-5
    numeric = (laser_phase(laser, z, t + h, 0.2, 10.0) - laser_phase(laser, z, t - h, 0.2, 10.0)) / (2 * h)
    assert laser_phase_rate(laser, z, t, 10.0) == pytest.approx(numeric, rel=1e-9)


def test_rwa_ratio_examples():
    laser = LaserField.from_frequency(10.0, 10.0, electric_rabi=0.5)
    assert rwa_validity(laser, 0.0, 0.0, 10.0) == pytest.approx(20.0)
    optical = LaserField.from_frequency(1e15, 3e8, electric_rabi=1e5)
    assert rwa_validity(optical, 0.0, 0.0, 3e8) == pytest.approx(1e10)
    ratios = [rwa_validity(LaserField.from_frequency(w, 1.0, electric_rabi=2.0), 0.0, 0.0, 1.0) for w in (1, 5, 50)]
    assert ratios == sorted(ratios)
    with pytest.raises(UndefinedRatioError):
        rwa_validity(LaserField.from_frequency(10.0, 10.0, electric_rabi=0.0), 0.0, 0.0, 10.0)


def test_dispersion_enforced():
    toy_scenario()
    with pytest.raises(DispersionError):
        toy_scenario().with_(speed_of_light=C * (1 + 1e-9))


def test_elimination_guard():
    laser = LaserField.from_frequency(10.0, 10.0, electric_rabi=1.0, magnetic_rabi=1.0, ancilla_detuning=5.0)
    with pytest.warns(RegimeWarning):
        assert not laser.check_elimination()
    assert LaserField.from_frequency(10.0, 10.0, ancilla_detuning=100.0).check_elimination()
    with pytest.raises(InvalidInputError):
        LaserField.from_frequency(10.0, 10.0, ancilla_detuning=0.0).check_elimination()


class _Uncoupled:
    # Scenario rejects a vanishing Rabi frequency, so swap the laser on a proxy.
    def __init__(self, scenario):
        self._s = scenario
        self.laser = LaserField.from_frequency(scenario.laser.frequency, C, electric_rabi=0.0, magnetic_rabi=0.0)

    def __getattr__(self, name):
        return getattr(self._s, name)


def test_uncoupled_hamiltonian_is_diagonal():
    s = _Uncoupled(toy_scenario(transition="magnetic", mass_defect=True, wave_vector=True))
    h = build_rotating_hamiltonian(s, 0.3, 5.0, 0.7)
    assert np.count_nonzero(h - np.diag(np.diag(h))) == 0


@settings(max_examples=30)
@given(z=st.floats(-2, 2), p=st.floats(3, 8), t=st.floats(0, 4))
def test_hamiltonian_is_hermitian(z, p, t):
    s = toy_scenario(
        transition="magnetic",
        mass_defect=True,
        wave_vector=True,
        dark_matter=True,
        eep=True,
        dilaton={"amplitude": 1e-3, "frequency": 0.5, "wavenumber": 0.1, "eep_coefficient": 0.5},
        species={"beta_e": 0.1, "beta_g": -0.1},
    )
    h = build_rotating_hamiltonian(s, z, p, t)
    assert np.max(np.abs(h - h.conj().T)) <= 1e-14


def test_unperturbed_momentum_transfer_is_half_k():
    s = toy_scenario(gravity=0.0)
    assert momentum_displacement(s, 1.3, 2.0) == 0.5 * s.k


def test_displacement_broadcasts():
    s = toy_scenario(wave_vector=True)
    kappa = momentum_displacement(s, np.zeros((3, 1)), np.zeros(4))
    assert kappa.shape == (3, 4)
    np.testing.assert_allclose(kappa, 0.5 * s.k)


@pytest.mark.parametrize("z", [-1.0, 0.0, 0.66, 2.0])
def test_unperturbed_resonance_closes_the_detuning(z):
    s = toy_scenario()
    p = s.resonant_momentum
    h = build_rotating_hamiltonian(s, z, p, 0.0)
    assert abs(h[1, 1] - h[2, 2]) <= 1e-12
    s0 = toy_scenario(gravity=0.0)
    for t in (0.5, 1.0, math.pi):
        h = build_rotating_hamiltonian(s0, z, p, t)
        assert abs(h[1, 1] - h[2, 2]) <= 1e-12


def test_state_energy_rejects_nothing_but_broadcasts():
    s = toy_scenario()
    e = state_energy(s, "e", np.linspace(0, 1, 5), 5.0, 0.0)
    assert e.shape == (5,)
