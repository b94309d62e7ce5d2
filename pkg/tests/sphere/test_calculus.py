import numpy as np
import pytest

from nullgeo.errors import ConfigurationError
from nullgeo.sphere import (
    SphereField,
    SphereGrid,
    SphereMetric,
    covariant_derivative,
    curl,
    divergence,
    dot,
    evaluate,
    finite_difference_gradient,
    hodge_dual,
    laplacian,
    trace,
    traceless_part,
    wedge,
)
from nullgeo.sphere.catalog import random_coefficients, random_one_form


class TestCovariantDerivative:
    """Test derivatives of sphere fields."""

    def test_constant(
        self, unit_grid: SphereGrid, unit_metric: SphereMetric
    ) -> None:
        """Test the derivative of a constant vanishes."""
        constant = SphereField.constant(unit_grid, 4.0)
        gradient = covariant_derivative(constant, unit_metric)

        assert gradient.rank == 1
        assert np.max(np.abs(gradient.values)) < 1e-12

    def test_eigenvalue(
        self, unit_grid: SphereGrid, unit_metric: SphereMetric
    ) -> None:
        """Test div grad Y_10 = -2 Y_10 on the unit sphere."""
        harmonic = SphereField.harmonic(unit_grid, 1, 0)
        result = divergence(covariant_derivative(harmonic, unit_metric), unit_metric)

        assert np.allclose(result.values, -2.0 * harmonic.values, atol=1e-12)

    def test_finite_difference_oracle(self) -> None:
        """Test the spectral gradient against a fourth-order stencil at L = 32."""
        grid = SphereGrid(32)
        metric = SphereMetric.round(grid)
        coefficients = random_coefficients(grid, np.random.default_rng(7), 32)
        field = SphereField.from_coefficients(grid, coefficients)

        def sample(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
            return evaluate(coefficients, theta, phi).real

        spectral = covariant_derivative(field, metric).values
        stencil = finite_difference_gradient(sample, grid, step=5e-4)
        error = np.max(np.abs(spectral - stencil)) / np.max(np.abs(spectral))

        assert error < 1e-6

    def test_radius_scaling(self) -> None:
        """Test the Laplacian eigenvalue scales as 1 / r^2."""
        grid = SphereGrid(6, radius=2.0)
        metric = SphereMetric.round(grid)
        harmonic = SphereField.harmonic(grid, 2, 1)

        result = laplacian(harmonic, metric)

        assert np.allclose(result.values, -1.5 * harmonic.values, atol=1e-12)

    def test_perturbed_laplacian_of_constant(
        self, perturbed_metric: SphereMetric
    ) -> None:
        """Test the perturbed Laplacian annihilates constants."""
        field = SphereField.constant(perturbed_metric.grid, 1.0)

        assert np.max(np.abs(laplacian(field, perturbed_metric).values)) < 1e-10

    def test_metric_compatibility(self, perturbed_metric: SphereMetric) -> None:
        """Test the perturbed connection is metric compatible."""
        grid = perturbed_metric.grid
        metric_tensor = SphereField(grid, perturbed_metric.matrix, 2)

        derivative = covariant_derivative(metric_tensor, perturbed_metric)

        assert np.max(np.abs(derivative.values)) < 1e-9

    def test_conformal_laplacian(self, unit_grid: SphereGrid) -> None:
        """Test the Laplacian of a constant conformal factor metric."""
        metric = SphereMetric.conformal(unit_grid, 2.0)
        harmonic = SphereField.harmonic(unit_grid, 3, -2)

        result = laplacian(harmonic, metric)

        assert np.allclose(result.values, -3.0 * harmonic.values, atol=1e-10)

    def test_curl_of_gradient(self, perturbed_metric: SphereMetric) -> None:
        """Test curl grad f vanishes on a perturbed metric."""
        grid = perturbed_metric.grid
        field = SphereField.harmonic(grid, 3, 1)

        gradient = covariant_derivative(field, perturbed_metric)
        result = curl(gradient, perturbed_metric)

        assert np.max(np.abs(result.values)) < 1e-10

    def test_curl_of_dual(
        self, unit_grid: SphereGrid, unit_metric: SphereMetric
    ) -> None:
        """Test curl *grad f = -Laplacian f."""
        field = SphereField.harmonic(unit_grid, 2, 2)
        dual = hodge_dual(covariant_derivative(field, unit_metric), unit_metric)

        assert np.allclose(curl(dual, unit_metric).values, 6.0 * field.values)
        assert np.max(np.abs(divergence(dual, unit_metric).values)) < 1e-12

    def test_rank_mismatch(
        self, unit_grid: SphereGrid, unit_metric: SphereMetric
    ) -> None:
        """Test the divergence of a scalar is rejected."""
        with pytest.raises(ConfigurationError):
            divergence(SphereField.constant(unit_grid, 1.0), unit_metric)


class TestAlgebra:
    """Test pointwise tensor algebra."""

    def test_dual_orientation(
        self, unit_grid: SphereGrid, unit_metric: SphereMetric
    ) -> None:
        """Test the dual of the colatitude direction."""
        form = SphereField(unit_grid, unit_grid.theta_hat, 1)

        dual = hodge_dual(form, unit_metric)

        assert np.allclose(dual.values, -unit_grid.phi_hat)
        assert np.allclose(hodge_dual(dual, unit_metric).values, -form.values)

    def test_wedge(self, unit_grid: SphereGrid, unit_metric: SphereMetric) -> None:
        """Test the wedge product of the coordinate directions."""
        theta_hat = SphereField(unit_grid, unit_grid.theta_hat, 1)
        phi_hat = SphereField(unit_grid, unit_grid.phi_hat, 1)

        assert np.allclose(wedge(theta_hat, phi_hat, unit_metric).values, 1.0)
        assert np.allclose(wedge(phi_hat, theta_hat, unit_metric).values, -1.0)

    def test_dual_wedge_identity(self, anisotropic_metric: SphereMetric) -> None:
        """Test a ^ b = -(*a) . b on a perturbed metric."""
        rng = np.random.default_rng(2)
        first = random_one_form(anisotropic_metric, rng)
        second = random_one_form(anisotropic_metric, rng)

        lhs = wedge(first, second, anisotropic_metric).values
        rhs = -dot(hodge_dual(first, anisotropic_metric), second, anisotropic_metric)

        assert np.allclose(lhs, rhs.values, atol=1e-12)

    def test_traceless_part(self, anisotropic_metric: SphereMetric) -> None:
        """Test the trace-free part has vanishing trace."""
        grid = anisotropic_metric.grid
        values = np.einsum("...a,...b->...ab", grid.theta_hat, grid.phi_hat)
        tensor = SphereField(grid, values, 2)

        result = traceless_part(tensor, anisotropic_metric)
        residual = trace(result, anisotropic_metric).values

        assert np.max(np.abs(residual)) < 1e-12 * np.max(np.abs(result.values))
        assert result.traceless
