import pytest

from nullgeo.spacetime import LinearWave, Minkowski, Schwarzschild, SyntheticBump


@pytest.fixture
def minkowski() -> Minkowski:
    """Return flat spacetime."""
    return Minkowski()


@pytest.fixture
def schwarzschild() -> Schwarzschild:
    """Return Schwarzschild with M = 1."""
    return Schwarzschild(mass=1.0)


@pytest.fixture
def wave() -> LinearWave:
    """Return a weak plane wave."""
    return LinearWave(epsilon=1e-3)


@pytest.fixture
def bump() -> SyntheticBump:
    """Return the default non-vacuum bump."""
    return SyntheticBump()

