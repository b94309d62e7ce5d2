from pathlib import Path

import numpy as np
import pytest

from nullgeo.errors import ConfigurationError
from nullgeo.sphere import (
    SphereField,
    SphereGrid,
    SphereMetric,
    load_coefficients,
    load_grid_csv,
    norm,
    save_coefficients,
    save_grid_csv,
    two_patch_sample,
)
from nullgeo.sphere.catalog import field_catalog, random_one_form


class TestNorm:
    """Test the norm family."""

    def test_fractional_norm_of_constant(
        self, unit_grid: SphereGrid, unit_metric: SphereMetric
    ) -> None:
        """Test the fractional norm of 1 on the unit sphere."""
        field = SphereField.constant(unit_grid, 1.0)

        assert norm(field, unit_metric, "Hhalf") == pytest.approx(np.sqrt(4 * np.pi))

    @pytest.mark.parametrize("degree, order", [(1, 0), (2, -1), (5, 3)])
    def test_fractional_norm_of_harmonic(
        self, unit_grid: SphereGrid, unit_metric: SphereMetric, degree: int, order: int
    ) -> None:
        """Test the fractional multiplier on a single harmonic."""
        field = SphereField.harmonic(unit_grid, degree, order)

        expected = np.sqrt(1.0 + degree * (degree + 1))
        assert norm(field, unit_metric, "Hhalf") ** 2 == pytest.approx(expected)

    def test_fractional_norm_scaling(self) -> None:
        """Test the fractional norm of constants scales as r^(1/2)."""
        radii = np.array([1.0, 2.0, 4.0])
        values = []
        for radius in radii:
            grid = SphereGrid(4, radius=radius)
            field = SphereField.constant(grid, 1.0)
            values.append(norm(field, SphereMetric.round(grid), "Hhalf"))

        slope = np.polyfit(np.log(radii), np.log(values), 1)[0]

        assert slope == pytest.approx(0.5)

    def test_lebesgue_norms_of_constant(
        self, unit_grid: SphereGrid, unit_metric: SphereMetric
    ) -> None:
        """Test L2, L4 and Linf norms of a constant."""
        field = SphereField.constant(unit_grid, 2.0)

        assert norm(field, unit_metric, "L2") == pytest.approx(2.0 * np.sqrt(4 * np.pi))
        assert norm(field, unit_metric, "L4") == pytest.approx(
            2.0 * (4 * np.pi) ** 0.25
        )
        assert norm(field, unit_metric, "Linf") == pytest.approx(2.0)

    def test_sobolev_ratio(self, perturbed_metric: SphereMetric) -> None:
        """Test the L4 norm is controlled by the fractional norm on a catalog."""
        catalog = field_catalog(perturbed_metric, count=20, seed=11)
        ratios = [
            norm(field, perturbed_metric, "L4") / norm(field, perturbed_metric, "Hhalf")
            for field in catalog
        ]

        assert max(ratios) <= 2.0

    def test_unknown_norm(
        self, unit_grid: SphereGrid, unit_metric: SphereMetric
    ) -> None:
        """Test an unknown norm is rejected."""
        field = SphereField.constant(unit_grid, 1.0)

        with pytest.raises(ConfigurationError):
            norm(field, unit_metric, "H1")  # pyright: ignore[reportArgumentType]


class TestSerialisation:
    """Test coefficient files, grid dumps and chart sampling."""

    def test_coefficient_file(
        self, tmp_path: Path, unit_metric: SphereMetric
    ) -> None:
        """Test a 1-form survives a JSON coefficient file."""
        form = random_one_form(unit_metric, np.random.default_rng(5), max_degree=3)
        path = tmp_path / "form.json"

        save_coefficients(form, path)
        restored = load_coefficients(path)

        assert restored.rank == 1
        assert np.allclose(restored.values, form.values, atol=1e-12)

    def test_malformed_coefficient_file(self, tmp_path: Path) -> None:
        """Test a malformed coefficient file is rejected."""
        path = tmp_path / "broken.json"
        path.write_text('{"band_limit": 2}')

        with pytest.raises(ConfigurationError):
            load_coefficients(path)

    def test_grid_dump(self, tmp_path: Path, unit_grid: SphereGrid) -> None:
        """Test a scalar field survives a CSV grid dump."""
        field = SphereField.harmonic(unit_grid, 2, 1)
        path = tmp_path / "field.csv"

        save_grid_csv(field, path)
        restored = load_grid_csv(path, unit_grid)

        assert np.allclose(restored.values, field.values)

    def test_two_patch_sample(self, unit_grid: SphereGrid) -> None:
        """Test both charts sample x_3 consistently."""
        field = SphereField(unit_grid, unit_grid.normal[..., 2])

        samples = two_patch_sample(field, resolution=8)
        theta, _, values = samples["north"]
        east_theta, east_phi, east_values = samples["east"]

        assert np.allclose(values, np.cos(theta))
        assert np.allclose(east_values, np.sin(east_theta) * np.sin(east_phi))
