from typing import Any

import numpy as np
import pytest

from nullgeo.errors import ConfigurationError
from nullgeo.harmonic import (
    ConformalBump,
    DirichletSettings,
    DiskMesh,
    HarmonicSolution,
    TracelessBump,
    radial_reference,
    reference_solution,
    ricci_norm,
    solve_dirichlet,
)

EPSILON = 1e-2


class TestDirichletSettings:
    """Test the solver settings."""

    @pytest.mark.parametrize(
        "params",
        [
            {"tolerance": 0.0},
            {"restart": 0},
            {"max_cycles": 0},
            {"ricci_step": -1e-3},
            {"curvature_limit": 0.0},
            {"workers": 0},
        ],
    )
    def test_invalid(self, params: dict[str, Any]) -> None:
        """Test out-of-range settings are rejected."""
        with pytest.raises(ConfigurationError):
            DirichletSettings(**params)


class TestSolveDirichlet:
    """Test the harmonic coordinates."""

    def test_flat(self, flat_solution: HarmonicSolution) -> None:
        """Test the Euclidean ball has x^i = y^i."""
        points = flat_solution.mesh.points
        for index, coordinate in enumerate(flat_solution.coordinates):
            assert np.allclose(coordinate.values, points[..., index], atol=1e-10)
        assert flat_solution.gram_deviation < 1e-8
        assert np.allclose(flat_solution.bochner_tensor, 0.0, atol=1e-8)
        assert np.allclose(flat_solution.neumann_defect, 0.0, atol=1e-8)
        assert flat_solution.satisfies_maximum_principle

    def test_flat_boundary_laplace(self, flat_solution: HarmonicSolution) -> None:
        """Test the boundary splitting of the Laplacian on the Euclidean ball."""
        reports = flat_solution.boundary_laplace_reports()
        assert len(reports) == 3
        assert all(report.passes(1e-8) for report in reports)

    def test_reference(self, bump_solution: HarmonicSolution) -> None:
        """Test the spectral solution against the radial finite-difference one."""
        reference = reference_solution(bump_solution.mesh)
        for coordinate, expected in zip(bump_solution.coordinates, reference):
            assert np.allclose(coordinate.values, expected, atol=1e-5)

    def test_gram(self, bump_solution: HarmonicSolution) -> None:
        """Test the Gram matrix deviates from the identity at order epsilon."""
        assert 0.0 < bump_solution.gram_deviation <= 10.0 * EPSILON
        assert bump_solution.satisfies_maximum_principle

    def test_bump_boundary_laplace(self, bump_solution: HarmonicSolution) -> None:
        """Test the boundary splitting of the Laplacian on the bump."""
        assert all(
            report.passes(1e-5) for report in bump_solution.boundary_laplace_reports()
        )

    def test_traceless(self) -> None:
        """Test a curved interior with a round boundary."""
        mesh = DiskMesh(TracelessBump(epsilon=EPSILON), radial=12, band_limit=8)
        solution = solve_dirichlet(mesh, settings=DirichletSettings(workers=3))
        assert np.allclose(solution.boundary.centre, 0.0, atol=1e-10)
        assert 0.0 < solution.gram_deviation <= 10.0 * EPSILON
        assert solution.satisfies_maximum_principle
        assert len(solution.iterations) == 3

    def test_curvature_limit(self, bump_mesh: DiskMesh) -> None:
        """Test curvature beyond the accepted limit is rejected."""
        with pytest.raises(ConfigurationError, match="curvature assumption"):
            solve_dirichlet(bump_mesh, settings=DirichletSettings(curvature_limit=1e-6))

    def test_ricci_norm(self, flat_mesh: DiskMesh, bump_mesh: DiskMesh) -> None:
        """Test the Ricci norm vanishes on the flat ball only."""
        assert ricci_norm(flat_mesh, 1e-3) == pytest.approx(0.0, abs=1e-12)
        assert ricci_norm(bump_mesh, 1e-3) > 0.0


class TestRadialReference:
    """Test the finite-difference oracle."""

    def test_flat_profile(self) -> None:
        """Test a vanishing bump gives R(r) = r."""
        radii, profile = radial_reference(ConformalBump(epsilon=0.0), points=100)
        assert np.allclose(profile, radii, atol=1e-12)

    def test_second_order(self) -> None:
        """Test halving the step quarters the error."""
        metric = ConformalBump(epsilon=0.1)
        fine_radii, fine = radial_reference(metric, points=3200)
        errors = []
        for points in (100, 200):
            radii, profile = radial_reference(metric, points)
            errors.append(np.max(np.abs(profile - np.interp(radii, fine_radii, fine))))
        assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.1)

    def test_too_few_points(self) -> None:
        """Test the grid needs interior points."""
        with pytest.raises(ConfigurationError, match="reference points"):
            radial_reference(ConformalBump(), points=2)

    def test_other_metric(self, flat_mesh: DiskMesh) -> None:
        """Test only conformal bumps have a reference."""
        with pytest.raises(ConfigurationError, match="no finite-difference reference"):
            reference_solution(flat_mesh)

    def test_mesh_shape(self) -> None:
        """Test the reference carries three coordinates on the mesh nodes."""
        mesh = DiskMesh(ConformalBump(), radial=4, band_limit=4)
        assert reference_solution(mesh, points=50).shape == (3,) + mesh.shape

    def test_flat_reference(self) -> None:
        """Test the reference of a flat metric in bump form is y."""
        mesh = DiskMesh(ConformalBump(epsilon=0.0), radial=4, band_limit=4)
        reference = reference_solution(mesh, points=50)
        assert np.allclose(np.moveaxis(reference, 0, -1), mesh.points)
