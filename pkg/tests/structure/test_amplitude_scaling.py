import numpy as np
import pytest

from nullgeo.spacetime import ConeState
from nullgeo.spacetime.differences import fit_slope
from nullgeo.structure import catalog, eval_bianchi_residuals, eval_structure_residuals

IDENTITIES = [entry.id for entry in catalog("structure")] + [
    entry.id for entry in catalog("bianchi")
]
AMPLITUDES = (1e-4, 1e-3)
# changes below this are the eps-linear discretisation error of identities that
# hold for every metric
SIGNAL = 1e-8


@pytest.fixture(scope="module")
def wave_residuals(
    wave_cones: dict[tuple[float, int], ConeState],
) -> dict[float, dict[str, np.ndarray]]:
    """Return the pointwise residual of every identity per wave amplitude."""
    residuals = {}
    for epsilon in (0.0, *AMPLITUDES):
        state = wave_cones[(epsilon, 10)]
        reports = eval_structure_residuals(state) + eval_bianchi_residuals(state)
        residuals[epsilon] = {report.id: report.residual.values for report in reports}
    return residuals


class TestAmplitudeScaling:
    """Test plane waves break the identities only through their O(eps^2) Ricci."""

    def test_covers_families(
        self, wave_residuals: dict[float, dict[str, np.ndarray]]
    ) -> None:
        """Test every structure and Bianchi identity is evaluated."""
        assert set(wave_residuals[1e-3]) == set(IDENTITIES)

    @pytest.mark.parametrize("identity", IDENTITIES)
    def test_quadratic(
        self, wave_residuals: dict[float, dict[str, np.ndarray]], identity: str
    ) -> None:
        """Test the residual beyond the flat floor scales as eps^2."""
        floor = wave_residuals[0.0][identity]
        changes = [
            float(np.max(np.abs(wave_residuals[epsilon][identity] - floor)))
            for epsilon in AMPLITUDES
        ]
        assert changes[1] < 100.0 * AMPLITUDES[1] ** 2
        if changes[1] > SIGNAL:
            assert fit_slope(AMPLITUDES, changes) == pytest.approx(2.0, abs=0.2)
