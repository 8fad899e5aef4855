import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spdiff import AtomSpecies, LaserField
from spdiff.resonance import (
    HeisenbergTrajectory,
    detuning_polynomial,
    doppler_slope,
    heisenberg_detuning,
    ordering_cross_terms,
    resonant_laser_frequency,
    tuned,
    tuned_to_packet,
)

from conftest import C, MASS, toy_scenario

ALL_ON = dict(mass_defect=True, dark_matter=True, eep=True, wave_vector=True)
DILATON = {"amplitude": 2e-3, "frequency": 0.4, "wavenumber": 0.05, "phase": 0.3, "eep_coefficient": 0.8}
SPECIES = {"beta_e": 0.02, "beta_g": -0.01}


def test_trajectory_starts_at_initial_point():
    traj = HeisenbergTrajectory(0.4, 3.0, 2.0, 9.8)
    assert traj.position(0.0) == 0.4
    assert traj.momentum(0.0) == 3.0


def test_trajectory_falls_freely():
    traj = HeisenbergTrajectory(0.4, 3.0, 2.0, 9.8)
    h = 1e-3
    for t in (0.0, 0.7, 2.5):
        accel = (traj.position(t + h) - 2 * traj.position(t) + traj.position(t - h)) / h**2
        assert accel == pytest.approx(-9.8, abs=1e-10 / h**2 * 10)
        velocity = (traj.position(t + h) - traj.position(t - h)) / (2 * h)
        assert velocity == pytest.approx(traj.momentum(t) / 2.0, rel=1e-9)


def test_resonant_unperturbed_detuning_vanishes():
    s = toy_scenario(gravity=0.0)
    assert abs(heisenberg_detuning(s, 0.3, s.resonant_momentum, 0.0)) <= 1e-12


@pytest.mark.parametrize("dp", [-0.2, 0.05, 0.4])
def test_velocity_selectivity(dp):
    s = toy_scenario(gravity=0.0)
    nu = heisenberg_detuning(s, 0.0, s.resonant_momentum + dp, 1.3)
    assert nu == pytest.approx(s.k * dp / MASS, rel=1e-9)


def test_uncompensated_doppler_shift():
    s = toy_scenario(gravity=0.1, chirp=0.0)
    t = np.linspace(0, 3, 7)
    np.testing.assert_allclose(heisenberg_detuning(s, 0.0, s.resonant_momentum, t), -s.k * 0.1 * t, atol=1e-12)


@settings(max_examples=25)
@given(
    g=st.floats(0.0, 0.3),
    chirp=st.floats(-0.4, 0.1),
    z=st.floats(-1.0, 1.0),
    p=st.floats(4.0, 7.0),
)
def test_polynomial_matches_direct_detuning(g, chirp, z, p):
    s = toy_scenario(gravity=g, chirp=chirp, dilaton=DILATON, species=SPECIES, **ALL_ON)
    poly = detuning_polynomial(s, z, p)
    t = np.linspace(0.0, s.pi_time, 13)
    direct = heisenberg_detuning(s, z, p, t, frozen_dm=True)
    scale = np.max(np.abs(direct))
    assert np.max(np.abs(poly.detuning_at(t) - direct)) <= 1e-9 * scale
    assert poly.mean[3] == 0.0


@given(g=st.floats(0.0, 0.3), z=st.floats(-1.0, 1.0), p=st.floats(4.0, 7.0))
def test_perfect_chirp_removes_cubic_term(g, z, p):
    s = toy_scenario(gravity=g, dilaton=DILATON, species=SPECIES, **ALL_ON)
    assert detuning_polynomial(s, z, p).detuning[3] == 0.0


def test_uncorrected_variant_differs_only_at_higher_orders():
    s = toy_scenario(gravity=0.1, chirp=-0.05, wave_vector=True)
    a = detuning_polynomial(s, 0.2, 5.5)
    b = detuning_polynomial(s, 0.2, 5.5, uncorrected=True)
    assert a.detuning[:2] == b.detuning[:2]
    assert a.detuning[2] != b.detuning[2] and a.detuning[3] != b.detuning[3]
    assert a.mean[2] != b.mean[2]


def test_polynomial_broadcasts_over_points():
    s = toy_scenario(**ALL_ON, dilaton=DILATON)
    z = np.linspace(-1, 1, 5)
    poly = detuning_polynomial(s, z, 5.5)
    assert np.shape(poly.detuning_at(0.5)) == (5,)


def test_bare_resonance():
    sp = AtomSpecies(mass=MASS, transition_frequency=C)
    laser = LaserField.from_frequency(C, C)
    assert resonant_laser_frequency(sp, laser, 0.0, C, stark=False) == C


def test_resonance_with_recoil_and_stark_shift():
    sp = AtomSpecies(mass=MASS, transition_frequency=C)
    laser = LaserField.from_frequency(C, C, electric_rabi=2.0, magnetic_rabi=1.0, ancilla_detuning=20.0)
    omega = resonant_laser_frequency(sp, laser, 0.0, C)
    assert omega == pytest.approx(C + 3.0 / 80.0, rel=1e-15)
    omega = resonant_laser_frequency(sp, laser, 1.0, C)
    assert omega == pytest.approx(C + (omega / C) / MASS + 3.0 / 80.0, rel=1e-15)
    # Resonant momentum equal to one photon momentum: two recoil frequencies on top.
    p_r = 1.0
    for _ in range(20):
        omega = resonant_laser_frequency(sp, laser, p_r, C)
        p_r = omega / C
    k = omega / C
    assert omega == pytest.approx(C + 2 * k**2 / (2 * MASS) + 3.0 / 80.0, rel=1e-14)


def test_tuned_scenario_is_resonant():
    s = tuned(toy_scenario(), offset=0.0)
    assert s.laser.wavenumber * C == pytest.approx(s.laser.frequency, rel=1e-15)
    assert s.two_level_detuning + s.k * s.resonant_momentum / MASS == pytest.approx(0.0, abs=1e-12)
    shifted = tuned(s, offset=0.01)
    assert shifted.laser.frequency - s.laser.frequency == pytest.approx(0.01, rel=1e-9)


def test_tuned_to_packet_is_self_consistent():
    s = tuned_to_packet(toy_scenario(), 5.0)
    assert s.resonant_momentum == pytest.approx(5.0 + 0.5 * s.k, rel=1e-15)


def test_doppler_slope_is_linear_in_mismatch():
    slopes = []
    for delta in (-0.02, 0.0, 0.02, 0.04):
        s = toy_scenario(gravity=0.1, chirp=-0.1 + delta, wave_vector=True)
        slopes.append(doppler_slope(s, 0.3, 5.5))
    assert slopes[1] == 0.0
    assert slopes[2] == pytest.approx(-slopes[0], rel=1e-12)
    assert slopes[3] == pytest.approx(2 * slopes[2], rel=1e-12)


def test_ordering_cross_terms_vanish_for_perfect_chirp():
    assert ordering_cross_terms(toy_scenario(wave_vector=True))[0][0] == 0.0
    assert ordering_cross_terms(toy_scenario(chirp=0.0, wave_vector=True))[0][0] != 0.0
