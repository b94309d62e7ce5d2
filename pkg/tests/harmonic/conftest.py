import pytest

from nullgeo.harmonic import (
    ConformalBump,
    DiskMesh,
    FlatDisk,
    HarmonicSolution,
    MobiusDisk,
    solve_dirichlet,
)

EPSILON = 1e-2
OFFSET = [0.004, -0.003, 0.002]


@pytest.fixture(scope="module")
def flat_mesh() -> DiskMesh:
    """Return a coarse mesh of the Euclidean ball."""
    return DiskMesh(FlatDisk(), radial=12, band_limit=8)


@pytest.fixture(scope="module")
def bump_mesh() -> DiskMesh:
    """Return a mesh of the ball with a centred conformal bump."""
    return DiskMesh(ConformalBump(epsilon=EPSILON), radial=16, band_limit=8)


@pytest.fixture(scope="module")
def mobius_mesh() -> DiskMesh:
    """Return a mesh of the ball with a Mobius pulled-back flat metric."""
    return DiskMesh(MobiusDisk(offset=OFFSET), radial=12, band_limit=8)


@pytest.fixture(scope="module")
def flat_solution(flat_mesh: DiskMesh) -> HarmonicSolution:
    """Return the harmonic coordinates of the Euclidean ball."""
    return solve_dirichlet(flat_mesh)


@pytest.fixture(scope="module")
def bump_solution(bump_mesh: DiskMesh) -> HarmonicSolution:
    """Return the harmonic coordinates of the conformal bump."""
    return solve_dirichlet(bump_mesh)
