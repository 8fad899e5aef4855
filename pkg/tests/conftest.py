import pytest

from spdiff import AtomSpecies, Channels, DilatonField, GaussianWavePacket, LaserField, Scenario
from spdiff.resonance import tuned

# Toy regime: c = 10 makes 1/c and 1/c^2 corrections resolvable on a grid.
C = 10.0
MASS = 100.0
GRAVITY = 0.1
SIGMA = 0.5
GROUND_MOMENTUM = 5.0


def toy_scenario(
    gravity=GRAVITY,
    chirp=None,
    rabi=1.0,
    dilaton=None,
    species=None,
    transition="direct",
    resonant_momentum=GROUND_MOMENTUM + 0.5,
    **channels,
):
    """Resonant direct-transition scenario; ``chirp`` defaults to ``-gravity``."""
    chirp = -gravity if chirp is None else chirp
    sp = AtomSpecies(mass=MASS, transition_frequency=C, **(species or {}))
    laser = LaserField.from_frequency(C, C, electric_rabi=rabi, chirp_rate=chirp)
    s = Scenario(
        sp,
        laser,
        dilaton=DilatonField(**(dilaton or {})),
        gravity=gravity,
        speed_of_light=C,
        resonant_momentum=resonant_momentum,
        transition=transition,
        channels=Channels.none(chirp=True, **channels),
        mass_defect_limit=1.0,
        amplitude_limit=1.0,
    )
    return tuned(s)


def toy_packet(scenario, z_bar=0.66, delta_z=0.0, sigma=SIGMA):
    return GaussianWavePacket(
        sigma, sigma, GROUND_MOMENTUM + scenario.k, GROUND_MOMENTUM, z_bar + delta_z / 2, z_bar - delta_z / 2
    )


@pytest.fixture(autouse=True)
def _single_worker(monkeypatch):
    monkeypatch.setenv("SPDIFF_THREADS", "1")
