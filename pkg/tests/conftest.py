import pytest

from nullgeo.spacetime import (
    ConeState,
    LinearWave,
    Minkowski,
    Schwarzschild,
    extract_cone_state,
)


@pytest.fixture(scope="session")
def flat_cone() -> ConeState:
    """Return the flat sphere S(-2, 2) of radius 2 with transverse data."""
    return extract_cone_state(Minkowski(), -2.0, 2.0, band_limit=8)


@pytest.fixture(scope="session")
def schwarzschild_cone() -> ConeState:
    """Return the Schwarzschild sphere of area radius 10, M = 1."""
    return extract_cone_state(Schwarzschild(mass=1.0), 0.0, 20.0, band_limit=8)


@pytest.fixture(scope="session")
def wave_geodesic_cone() -> ConeState:
    """Return S(-2, 2) on the light cones of the time axis of a weak plane wave."""
    return extract_cone_state(
        LinearWave(epsilon=1e-3), -2.0, 2.0, band_limit=6, foliation="geodesic"
    )
