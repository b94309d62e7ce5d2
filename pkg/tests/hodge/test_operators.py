import json

import numpy as np
import pytest

from nullgeo.errors import ConfigurationError
from nullgeo.hodge import (
    HodgeSystem,
    apply,
    inner_product,
    solve,
    solve_with_report,
    verify_elliptic_estimate,
)
from nullgeo.sphere import (
    SphereField,
    SphereGrid,
    SphereMetric,
    covariant_derivative,
    norm,
)
from nullgeo.sphere.catalog import random_one_form, random_scalar, random_traceless


@pytest.fixture
def round_metric() -> SphereMetric:
    """Return the unit round metric at band limit 12."""
    return SphereMetric.round(SphereGrid(12))


@pytest.fixture
def bumped_metric() -> SphereMetric:
    """Return the metric (1 + 0.01 Y_20) gamma at band limit 16."""
    grid = SphereGrid(16)
    bump = 0.01 * SphereField.harmonic(grid, 2, 0).values
    return SphereMetric.from_scalar_perturbation(grid, bump)


class TestApply:
    """Test forward application of the Hodge operators."""

    def test_d1_of_d1star(self, round_metric: SphereMetric) -> None:
        """Test D1 D1* (Y_10, 0) = (2 Y_10, 0)."""
        grid = round_metric.grid
        harmonic = SphereField.harmonic(grid, 1, 0)
        pair = (harmonic, SphereField.zeros(grid))

        form = apply(HodgeSystem(round_metric, "D1star"), pair)
        image = apply(HodgeSystem(round_metric, "D1"), form)

        assert isinstance(image, tuple)
        divergence, curl = image

        assert np.allclose(divergence.values, 2.0 * harmonic.values, atol=1e-12)
        assert np.max(np.abs(curl.values)) < 1e-12

    def test_d1star_of_zero(self, round_metric: SphereMetric) -> None:
        """Test D1* (0, 0) = 0."""
        grid = round_metric.grid
        pair = (SphereField.zeros(grid), SphereField.zeros(grid))

        result = apply(HodgeSystem(round_metric, "D1star"), pair)

        assert isinstance(result, SphereField)
        assert np.max(np.abs(result.values)) == 0.0

    def test_d2_d2star_eigenvalue(self, round_metric: SphereMetric) -> None:
        """Test D2 D2* grad Y_lm = (l(l + 1) - 2) / 2 grad Y_lm."""
        grid = round_metric.grid
        form = covariant_derivative(SphereField.harmonic(grid, 3, 2), round_metric)

        tensor = apply(HodgeSystem(round_metric, "D2star"), form)
        result = apply(HodgeSystem(round_metric, "D2"), tensor)

        assert isinstance(result, SphereField)
        assert np.allclose(result.values, 5.0 * form.values, atol=1e-11)

    def test_adjointness(self, bumped_metric: SphereMetric) -> None:
        """Test <D1 U, (f, g)> = <U, D1* (f, g)> on a perturbed metric."""
        rng = np.random.default_rng(4)
        grid = bumped_metric.grid
        form = random_one_form(bumped_metric, rng)
        pair = (random_scalar(grid, rng), random_scalar(grid, rng))

        image = apply(HodgeSystem(bumped_metric, "D1"), form)
        lhs = inner_product(image, pair, bumped_metric)
        rhs = inner_product(
            form, apply(HodgeSystem(bumped_metric, "D1star"), pair), bumped_metric
        )

        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_rank_mismatch(self, round_metric: SphereMetric) -> None:
        """Test a scalar is rejected by D1."""
        with pytest.raises(ConfigurationError):
            apply(HodgeSystem(round_metric, "D1"), SphereField.zeros(round_metric.grid))

    def test_unknown_operator(self, round_metric: SphereMetric) -> None:
        """Test an unknown operator tag is rejected."""
        with pytest.raises(ConfigurationError):
            HodgeSystem(round_metric, "D3")  # pyright: ignore[reportArgumentType]


class TestSolve:
    """Test inversion of the Hodge operators."""

    def test_laplacian(self, round_metric: SphereMetric) -> None:
        """Test the Laplacian solve of -2 Y_10 returns Y_10."""
        harmonic = SphereField.harmonic(round_metric.grid, 1, 0)

        result = solve(HodgeSystem(round_metric, "Laplacian"), -2.0 * harmonic)

        assert isinstance(result, SphereField)
        assert np.allclose(result.values, harmonic.values, atol=1e-12)

    def test_d2_round_trip(self, round_metric: SphereMetric) -> None:
        """Test solving D2 F = D2 (random F) recovers F."""
        tensor = random_traceless(round_metric, np.random.default_rng(8))
        system = HodgeSystem(round_metric, "D2")

        result = solve(system, apply(system, tensor))

        assert isinstance(result, SphereField)
        error = norm(result - tensor, round_metric) / norm(tensor, round_metric)
        assert error < 1e-8

    def test_d1star_round_trip(self, round_metric: SphereMetric) -> None:
        """Test solving D1* recovers mean-zero potentials."""
        rng = np.random.default_rng(9)
        grid = round_metric.grid
        pair = (
            random_scalar(grid, rng, min_degree=1),
            random_scalar(grid, rng, min_degree=1),
        )
        system = HodgeSystem(round_metric, "D1star")

        result = solve(system, apply(system, pair))

        assert isinstance(result, tuple)
        assert np.allclose(result[0].values, pair[0].values, atol=1e-10)
        assert np.allclose(result[1].values, pair[1].values, atol=1e-10)

    def test_d2star_round_trip(self, round_metric: SphereMetric) -> None:
        """Test solving D2* recovers a form without conformal Killing part."""
        form = random_one_form(round_metric, np.random.default_rng(10), min_degree=2)
        system = HodgeSystem(round_metric, "D2star")

        result = solve(system, apply(system, form))

        assert isinstance(result, SphereField)
        assert norm(result - form, round_metric) < 1e-9 * norm(form, round_metric)

    def test_perturbed_convergence(self, bumped_metric: SphereMetric) -> None:
        """Test the preconditioned iteration converges quickly."""
        rng = np.random.default_rng(1)
        source = random_scalar(bumped_metric.grid, rng, min_degree=1)
        system = HodgeSystem(bumped_metric, "Laplacian")
        image = apply(system, source)

        result, report = solve_with_report(system, image)

        assert isinstance(result, SphereField)
        assert report.iterations <= 20
        assert report.residual < 1e-10
        assert json.loads(report.to_json())["operator"] == "Laplacian"

    def test_perturbed_d1(self, bumped_metric: SphereMetric) -> None:
        """Test D1 inversion on a perturbed metric."""
        form = random_one_form(bumped_metric, np.random.default_rng(12))
        system = HodgeSystem(bumped_metric, "D1")

        result = solve(system, apply(system, form))

        assert isinstance(result, SphereField)
        assert norm(result - form, bumped_metric) < 1e-8 * norm(form, bumped_metric)

    def test_non_solvable_source(self, round_metric: SphereMetric) -> None:
        """Test a Laplacian source with nonzero mean is rejected."""
        source = SphereField.constant(round_metric.grid, 1.0)

        with pytest.raises(ConfigurationError):
            solve(HodgeSystem(round_metric, "Laplacian"), source)

    def test_conformal_killing_source(self, round_metric: SphereMetric) -> None:
        """Test a D2 source along the conformal Killing fields is rejected."""
        form = covariant_derivative(
            SphereField.harmonic(round_metric.grid, 1, 1), round_metric
        )

        with pytest.raises(ConfigurationError):
            solve(HodgeSystem(round_metric, "D2"), form)


class TestEllipticEstimate:
    """Test the measured elliptic estimate ratios."""

    def test_d1_ratio(self, round_metric: SphereMetric) -> None:
        """Test the D1 estimate ratio of D1* (Y_10, 0) at order 0."""
        grid = round_metric.grid
        pair = (SphereField.harmonic(grid, 1, 0), SphereField.zeros(grid))
        form = apply(HodgeSystem(round_metric, "D1star"), pair)

        report = verify_elliptic_estimate(HodgeSystem(round_metric, "D1"), [form])

        assert report.max_ratio == pytest.approx(1.0, rel=1e-8)
        assert report.max_ratio <= 1.5

    def test_constant_pair(self, round_metric: SphereMetric) -> None:
        """Test a constant pair has ratio 0 after removing the mean."""
        grid = round_metric.grid
        pair = (SphereField.constant(grid, 1.0), SphereField.constant(grid, -2.0))

        report = verify_elliptic_estimate(HodgeSystem(round_metric, "D1star"), [pair])

        assert report.ratios == [0.0]

    def test_perturbed_catalog(self, bumped_metric: SphereMetric) -> None:
        """Test the D1 and D2 ratios over 20 fields on a perturbed metric."""
        rng = np.random.default_rng(13)
        forms = [random_one_form(bumped_metric, rng) for _ in range(20)]
        tensors = [random_traceless(bumped_metric, rng) for _ in range(20)]

        d1 = verify_elliptic_estimate(HodgeSystem(bumped_metric, "D1"), forms)
        d2 = verify_elliptic_estimate(HodgeSystem(bumped_metric, "D2"), tensors)

        assert d1.max_ratio <= 2.0
        assert d2.max_ratio <= 2.0

    def test_empty_catalog(self, round_metric: SphereMetric) -> None:
        """Test an empty catalog is rejected."""
        with pytest.raises(ConfigurationError):
            verify_elliptic_estimate(HodgeSystem(round_metric, "D1"), [])
