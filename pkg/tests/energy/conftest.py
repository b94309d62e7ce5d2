import numpy as np
import pytest

from nullgeo.spacetime import (
    ConeState,
    FrameCalculus,
    Minkowski,
    NullPair,
    Schwarzschild,
    extract_cone_state,
)
from nullgeo.spacetime.frames import project


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


@pytest.fixture(scope="module")
def schwarzschild_points() -> np.ndarray:
    """Return three points near radius 10."""
    return np.array([[0.5, 6.0, 5.0, 5.5], [1.0, -7.0, 2.0, 7.0], [0.0, 0.0, 9.0, 4.0]])


@pytest.fixture(scope="module")
def schwarzschild_pair(schwarzschild_points: np.ndarray) -> NullPair:
    """Return the Schwarzschild null pair at the three points."""
    return FrameCalculus(Schwarzschild(mass=1.0)).null_pair(schwarzschild_points)


@pytest.fixture
def random_components(schwarzschild_pair: NullPair) -> dict[str, np.ndarray]:
    """Return horizontal Weyl components with random entries."""
    pair = schwarzschild_pair
    rng = np.random.default_rng(7)
    batch = pair.metric.shape[:-2]
    proj = pair.projector

    def traceless(values: np.ndarray) -> np.ndarray:
        tensor = project(proj, 0.5 * (values + np.swapaxes(values, -1, -2)), 2)
        trace = np.einsum("...mn,...mn->...", pair.horizontal_inverse, tensor)
        return tensor - 0.5 * trace[..., None, None] * pair.horizontal_metric

    return {
        "alpha": traceless(rng.normal(size=batch + (4, 4))),
        "alphab": traceless(rng.normal(size=batch + (4, 4))),
        "beta": project(proj, rng.normal(size=batch + (4,)), 1),
        "betab": project(proj, rng.normal(size=batch + (4,)), 1),
        "rho": rng.normal(size=batch),
        "sigma": rng.normal(size=batch),
    }
