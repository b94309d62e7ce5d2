import pytest

from nullgeo.canonical import (
    CanonicalFoliation,
    CanonicalSettings,
    MinkowskiBackground,
    SyntheticBackground,
    solve_canonical,
)

EPSILON = 1e-3
DELTA = 0.1
GAMMA = 0.45
TOLERANCE = 1e-10


@pytest.fixture(scope="module")
def settings() -> CanonicalSettings:
    """Return a coarse discretisation for the vertex neighbourhood."""
    return CanonicalSettings(band_limit=6, nodes=24)


@pytest.fixture(scope="module")
def flat_foliation(settings: CanonicalSettings) -> CanonicalFoliation:
    """Return the canonical foliation of the Minkowski cone."""
    return solve_canonical(MinkowskiBackground(), DELTA, GAMMA, TOLERANCE, settings)


@pytest.fixture(scope="module")
def synthetic_foliation(settings: CanonicalSettings) -> CanonicalFoliation:
    """Return the canonical foliation of the synthetic background F1 = eps Y20."""
    background = SyntheticBackground(epsilon=EPSILON)
    return solve_canonical(background, DELTA, GAMMA, TOLERANCE, settings)
