import numpy as np
import pytest

from nullgeo.sphere import SphereField, SphereGrid, SphereMetric


@pytest.fixture
def unit_grid() -> SphereGrid:
    """Return a band limit 8 grid on the unit sphere."""
    return SphereGrid(8)


@pytest.fixture
def unit_metric(unit_grid: SphereGrid) -> SphereMetric:
    """Return the unit round metric."""
    return SphereMetric.round(unit_grid)


@pytest.fixture
def perturbed_metric() -> SphereMetric:
    """Return the metric (1 + 0.01 Y_20) gamma on a band limit 16 unit grid."""
    grid = SphereGrid(16)
    bump = 0.01 * SphereField.harmonic(grid, 2, 0).values
    return SphereMetric.from_scalar_perturbation(grid, bump)


@pytest.fixture
def anisotropic_metric() -> SphereMetric:
    """Return a traceless perturbation of the unit sphere."""
    grid = SphereGrid(16)
    tangent = grid.projector[..., 0]
    ambient = np.einsum("...a,...b->...ab", tangent, tangent)
    length = np.einsum("...a,...a->...", tangent, tangent)
    ambient -= 0.5 * length[..., None, None] * grid.projector
    return SphereMetric(grid, 0.01 * ambient)
