from dataclasses import replace

import numpy as np
import pytest

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.sphere import (
    SphereField,
    SphereGrid,
    SphereMetric,
    average,
    integrate,
    transform,
)
from nullgeo.sphere.catalog import random_scalar


class TestSphereGrid:
    """Test the quadrature grid."""

    def test_node_count(self, unit_grid: SphereGrid) -> None:
        """Test the grid holds at least (L + 1)(2L + 1) nodes."""
        lmax = unit_grid.band_limit
        assert unit_grid.node_count >= (lmax + 1) * (2 * lmax + 1)

    def test_quadrature_orthonormality(self, unit_grid: SphereGrid) -> None:
        """Test products of harmonics up to degree 2L integrate exactly."""
        first = unit_grid.harmonic(8, 3)
        second = unit_grid.harmonic(8, 3)
        other = unit_grid.harmonic(5, 3)

        assert unit_grid.integrate(first * np.conj(second)) == pytest.approx(1.0)
        assert abs(unit_grid.integrate(first * np.conj(other))) < 1e-13

    def test_invalid_parameters(self) -> None:
        """Test non-positive band limits and radii are rejected."""
        with pytest.raises(ConfigurationError):
            SphereGrid(0)
        with pytest.raises(ConfigurationError):
            SphereGrid(4, radius=-1.0)


class TestTransform:
    """Test the spectral transform."""

    def test_constant(self, unit_grid: SphereGrid) -> None:
        """Test the constant field has a single coefficient sqrt(4 pi)."""
        field = transform(SphereField.constant(unit_grid, 1.0), "to_spectral")
        coefficients = np.asarray(field.coefficients)
        lmax = unit_grid.band_limit

        assert coefficients[0, lmax] == pytest.approx(np.sqrt(4 * np.pi))
        coefficients[0, lmax] = 0.0
        assert np.max(np.abs(coefficients)) < 1e-12

    def test_basis_element(self, unit_grid: SphereGrid) -> None:
        """Test Y_21 samples give the coefficient 1 at (2, 1) only."""
        field = SphereField(unit_grid, unit_grid.harmonic(2, 1))
        coefficients = np.asarray(transform(field, "to_spectral").coefficients)
        lmax = unit_grid.band_limit

        assert coefficients[2, lmax + 1] == pytest.approx(1.0)
        coefficients[2, lmax + 1] = 0.0
        assert np.max(np.abs(coefficients)) < 1e-12

    def test_round_trip(self, unit_grid: SphereGrid) -> None:
        """Test a random band-limited field survives a round trip."""
        field = random_scalar(unit_grid, np.random.default_rng(3), max_degree=8)
        spectral = transform(field, "to_spectral")
        restored = transform(spectral.with_values(field.values * 0.0), "to_spectral")
        restored = transform(
            replace(restored, coefficients=spectral.coefficients), "to_grid"
        )

        error = np.max(np.abs(restored.values - field.values))
        assert error < 1e-12 * np.max(np.abs(field.values))

    def test_spin_exceeds_band_limit(self) -> None:
        """Test a rank above the band limit is rejected."""
        grid = SphereGrid(1)
        field = SphereField.zeros(grid, rank=2)

        with pytest.raises(ConfigurationError):
            transform(field, "to_spectral")

    def test_missing_coefficients(self, unit_grid: SphereGrid) -> None:
        """Test synthesis without coefficients is rejected."""
        with pytest.raises(ConfigurationError):
            transform(SphereField.constant(unit_grid, 1.0), "to_grid")

    def test_wrong_shape(self, unit_grid: SphereGrid) -> None:
        """Test values of the wrong shape are rejected."""
        with pytest.raises(ConfigurationError):
            SphereField(unit_grid, np.zeros((3, 3)))


class TestIntegrate:
    """Test integrals and averages."""

    def test_area(self) -> None:
        """Test the integral of 1 is 4 pi r^2."""
        grid = SphereGrid(6, radius=3.0)
        metric = SphereMetric.round(grid)

        assert integrate(SphereField.constant(grid, 1.0), metric) == pytest.approx(
            4 * np.pi * 9.0
        )
        assert metric.area_radius == pytest.approx(3.0)

    def test_average_of_harmonic(
        self, unit_grid: SphereGrid, unit_metric: SphereMetric
    ) -> None:
        """Test the average of Y_32 vanishes."""
        field = SphereField.harmonic(unit_grid, 3, 2)

        assert abs(average(field, unit_metric)) < 1e-12

    def test_shifted_harmonic(
        self, unit_grid: SphereGrid, unit_metric: SphereMetric
    ) -> None:
        """Test the integral of 1 + 0.1 Y_10 is 4 pi."""
        field = SphereField.constant(unit_grid, 1.0) + 0.1 * SphereField.harmonic(
            unit_grid, 1, 0
        )

        assert integrate(field, unit_metric) == pytest.approx(4 * np.pi)

    def test_average_of_constant(self, perturbed_metric: SphereMetric) -> None:
        """Test the average of a constant is the constant."""
        field = SphereField.constant(perturbed_metric.grid, 2.5)

        assert average(field, perturbed_metric) == pytest.approx(2.5, abs=1e-14)

    def test_rank_mismatch(
        self, unit_grid: SphereGrid, unit_metric: SphereMetric
    ) -> None:
        """Test integrating a 1-form is rejected."""
        with pytest.raises(ConfigurationError):
            integrate(SphereField.zeros(unit_grid, rank=1), unit_metric)


class TestSphereMetric:
    """Test metric invariants."""

    def test_gauss_bonnet(
        self, perturbed_metric: SphereMetric, anisotropic_metric: SphereMetric
    ) -> None:
        """Test the integrated Gauss curvature is 4 pi on perturbed metrics."""
        assert abs(perturbed_metric.gauss_bonnet_defect()) < 1e-8
        assert abs(anisotropic_metric.gauss_bonnet_defect()) < 1e-8

    def test_constant_conformal_factor(self, unit_grid: SphereGrid) -> None:
        """Test a constant conformal factor rescales the curvature."""
        metric = SphereMetric.conformal(unit_grid, 2.0)

        assert metric.area_radius == pytest.approx(2.0)
        assert np.allclose(metric.gauss_curvature, 0.25)

    def test_round_curvature(self) -> None:
        """Test the round sphere of radius 2 has curvature 1/4."""
        metric = SphereMetric.round(SphereGrid(4, radius=2.0))

        assert np.allclose(metric.gauss_curvature, 0.25)

    def test_not_positive_definite(self, unit_grid: SphereGrid) -> None:
        """Test a degenerate metric is rejected."""
        with pytest.raises(NumericalFailure):
            SphereMetric.from_scalar_perturbation(
                unit_grid, np.full(unit_grid.shape, -1.5)
            )
