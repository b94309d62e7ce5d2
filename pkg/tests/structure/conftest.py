import pytest

from nullgeo.spacetime import ConeState, LinearWave, extract_cone_state

WAVE_AMPLITUDES = (0.0, 1e-4, 1e-3)


@pytest.fixture(scope="session")
def wave_cones() -> dict[tuple[float, int], ConeState]:
    """Return S(-1, 1) of weak plane waves keyed by (epsilon, band limit).

    The unit sphere keeps the angular truncation of the wave far below eps^2 at
    L = 10.
    """
    cones = {
        (epsilon, 10): extract_cone_state(
            LinearWave(epsilon=epsilon), -1.0, 1.0, band_limit=10
        )
        for epsilon in WAVE_AMPLITUDES
    }
    cones[(1e-3, 4)] = extract_cone_state(
        LinearWave(epsilon=1e-3), -1.0, 1.0, band_limit=4
    )
    return cones
