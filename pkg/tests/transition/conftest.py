import pytest

from nullgeo.spacetime import ConeState, Minkowski, Schwarzschild, extract_cone_state


@pytest.fixture(scope="module")
def flat_cone() -> ConeState:
    """Return the flat sphere S(-2, 2) of radius 2 without transverse data."""
    return extract_cone_state(Minkowski(), -2.0, 2.0, band_limit=6, transverse=False)


@pytest.fixture(scope="module")
def schwarzschild_cone() -> ConeState:
    """Return the Schwarzschild sphere of area radius 10 without transverse data."""
    return extract_cone_state(
        Schwarzschild(mass=1.0), 0.0, 20.0, band_limit=6, transverse=False
    )
