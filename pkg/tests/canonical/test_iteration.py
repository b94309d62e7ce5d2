from typing import Any

import numpy as np
import pytest

from nullgeo.canonical import (
    CanonicalFoliation,
    CanonicalSettings,
    ConeGrid,
    FoliationIterate,
    MinkowskiBackground,
    Sources,
    SyntheticBackground,
    picard_step,
    solve_canonical,
    verify_canonical_conditions,
)
from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.sphere import SphereField, SphereMetric


class Unstable(SyntheticBackground):
    """Synthetic background with a source feeding back on s - u."""

    def sources(self, metric: SphereMetric, s: np.ndarray) -> Sources:
        """Return the synthetic sources with F1 += -200 (s - u) / u^3."""
        fields = super().sources(metric, s)
        u = 2.0 * metric.grid.radius
        feedback = SphereField(metric.grid, -200.0 * (s - u) / u**3)
        return Sources(fields.f1 + feedback, fields.f2, fields.f3, fields.f4)


class Doubled(SyntheticBackground):
    """Synthetic background whose solver source keeps only a doubled F1."""

    def source(
        self,
        metric: SphereMetric,
        s: np.ndarray,
        gradient: SphereField,
        hessian: SphereField,
    ) -> SphereField:
        """Return 2 F1 in place of the full source."""
        fields = self.sources(metric, s)
        return fields.f1 * 2.0


class TestConeGrid:
    """Test the geometric u nodes."""

    def test_nodes(self) -> None:
        """Test the nodes run geometrically from 1e-3 delta to delta."""
        grid = ConeGrid(0.1, CanonicalSettings(nodes=8))
        assert grid.labels[0] == pytest.approx(1e-4)
        assert grid.labels[-1] == pytest.approx(0.1)
        assert np.allclose(grid.labels[1:] / grid.labels[:-1], 10.0 ** (3.0 / 7.0))
        assert grid.spheres[-1].radius == pytest.approx(0.05)

    def test_vertex_quadrature(self) -> None:
        """Test integrals of quadratic vertex data from u = 0 are exact."""
        grid = ConeGrid(0.1, CanonicalSettings(nodes=8))
        integral = grid.from_vertex(grid.labels**2)
        assert np.allclose(integral, grid.labels**3 / 3.0, rtol=1e-10)

    def test_non_positive_delta(self) -> None:
        """Test delta must be positive."""
        with pytest.raises(ConfigurationError, match="delta"):
            ConeGrid(0.0, CanonicalSettings())

    @pytest.mark.parametrize(
        "params",
        [
            {"band_limit": 1},
            {"nodes": 2},
            {"vertex_ratio": 1.0},
            {"workers": 0},
            {"solver_tolerance": 0.0},
        ],
    )
    def test_invalid_settings(self, params: dict[str, Any]) -> None:
        """Test out-of-range settings are rejected."""
        with pytest.raises(ConfigurationError):
            CanonicalSettings(**params)


class TestPicardStep:
    """Test single steps of the iteration."""

    def test_first_step(self, settings: CanonicalSettings) -> None:
        """Test the first step solves lap log Omega = eps Y on the round spheres."""
        grid = ConeGrid(0.1, settings)
        iterate = picard_step(
            SyntheticBackground(epsilon=1e-3), FoliationIterate.initial(grid), settings
        )
        assert iterate.index == 1
        assert np.max(np.abs(iterate.deviation)) == 0.0
        harmonic = SphereField.harmonic(grid.spheres[0], 2, 0).values
        expected = -1e-3 / 24.0 * grid.labels[:, None, None] ** 2 * harmonic
        assert np.allclose(iterate.log_lapse, expected, rtol=0.0, atol=1e-15)

    def test_threads_agree(self, settings: CanonicalSettings) -> None:
        """Test slices shared between threads give the sequential result."""
        grid = ConeGrid(0.1, settings)
        background = SyntheticBackground(epsilon=1e-3)
        threaded = CanonicalSettings(band_limit=6, nodes=24, workers=3)
        first = picard_step(background, FoliationIterate.initial(grid), settings)
        sequential = picard_step(background, first, settings)
        parallel = picard_step(background, first, threaded)
        assert np.allclose(sequential.log_lapse, parallel.log_lapse, rtol=1e-14, atol=0)

    def test_invalid_iterate(self, settings: CanonicalSettings) -> None:
        """Test iterates with non-positive s are rejected."""
        grid = ConeGrid(0.1, settings)
        deviation = -2.0 * np.broadcast_to(grid.labels[:, None, None], grid.shape)
        iterate = FoliationIterate(3, grid, deviation, np.zeros(grid.shape))
        with pytest.raises(NumericalFailure, match="non-positive"):
            iterate.check()


class TestMinkowski:
    """Test the flat fixed point s = u, Omega = 1."""

    def test_one_step(self, flat_foliation: CanonicalFoliation) -> None:
        """Test the iteration stops after one step at the flat fixed point."""
        assert flat_foliation.iterations == 1
        assert flat_foliation.contractions == [0.0]
        assert np.max(np.abs(flat_foliation.iterate.deviation)) == 0.0
        assert np.max(np.abs(flat_foliation.iterate.log_lapse)) == 0.0
        assert np.all(flat_foliation.iterate.lapse == 1.0)

    def test_rates_undefined(self, flat_foliation: CanonicalFoliation) -> None:
        """Test no rates are fitted to vanishing deviations."""
        assert flat_foliation.rates == {"deviation": None, "lapse": None}
        assert flat_foliation.bounded

    def test_conditions(self, flat_foliation: CanonicalFoliation) -> None:
        """Test both canonical conditions hold exactly."""
        reports = verify_canonical_conditions(flat_foliation)
        for family in ("canonical_condition", "canonical_mean_lapse"):
            assert len(reports[family]) == 24
            assert all(report.passes(1e-12) for report in reports[family])

    def test_summary(self, flat_foliation: CanonicalFoliation) -> None:
        """Test the summary carries the iteration record."""
        summary = flat_foliation.to_dict()
        assert summary["n_iters"] == 1
        assert summary["N_history"] == [0.0]
        assert summary["rate_fits"] == {"deviation": None, "lapse": None}


class TestSynthetic:
    """Test the synthetic background F1 = eps Y20, eps = 1e-3, delta = 0.1."""

    def test_converges(self, synthetic_foliation: CanonicalFoliation) -> None:
        """Test the iteration reaches the tolerance."""
        assert synthetic_foliation.contractions[-1] < 1e-10
        assert 5 < synthetic_foliation.iterations < 60

    def test_contraction(self, synthetic_foliation: CanonicalFoliation) -> None:
        """Test N_{n+1} <= 2 gamma N_n, with the measured ratio near 1/3."""
        ratios = synthetic_foliation.ratios
        assert ratios
        assert max(ratios) <= 0.9
        assert ratios[0] == pytest.approx(1.0 / 3.0, abs=0.1)

    def test_fixed_point(self, synthetic_foliation: CanonicalFoliation) -> None:
        """Test log Omega = -eps u^2 Y / 16 to first order in eps."""
        iterate = synthetic_foliation.iterate
        grid = iterate.grid
        harmonic = SphereField.harmonic(grid.spheres[0], 2, 0).values
        expected = -1e-3 / 16.0 * grid.labels[:, None, None] ** 2 * harmonic
        scale = np.max(np.abs(expected), axis=(1, 2))
        error = np.max(np.abs(iterate.log_lapse - expected), axis=(1, 2))
        assert np.all(error <= 0.02 * scale)

    def test_norm_bounds(self, synthetic_foliation: CanonicalFoliation) -> None:
        """Test the M norms stay bounded with M^s <= gamma C."""
        assert synthetic_foliation.bounded
        last = synthetic_foliation.history[-1]
        assert 0.0 < last["M_s"] < last["M_Omega"]

    def test_monotone(self, synthetic_foliation: CanonicalFoliation) -> None:
        """Test s stays positive and increasing in u."""
        synthetic_foliation.iterate.check()
        assert np.all(np.diff(synthetic_foliation.iterate.parameter, axis=0) > 0.0)

    def test_vertex_rates(self, synthetic_foliation: CanonicalFoliation) -> None:
        """Test sup |s - u| ~ u^3 and sup |log Omega| ~ u^2."""
        rates = synthetic_foliation.rates
        assert rates["deviation"] == pytest.approx(3.0, abs=0.2)
        assert rates["lapse"] == pytest.approx(2.0, abs=0.2)
        assert all(synthetic_foliation.rates_match().values())

    def test_conditions(self, synthetic_foliation: CanonicalFoliation) -> None:
        """Test both canonical conditions hold to ten times the tolerance."""
        reports = verify_canonical_conditions(synthetic_foliation)
        assert all(r.norms["L2"] < 1e-9 for r in reports["canonical_condition"])
        assert all(r.passes(1e-8) for r in reports["canonical_mean_lapse"])
        assert reports["canonical_condition"][0].id == "canonical_condition"

    def test_deformed_conditions(self, settings: CanonicalSettings) -> None:
        """Test the condition holds with every synthetic deformation switched on."""
        background = SyntheticBackground(
            epsilon=1e-3, drift=0.5, metric=1.0, expansion=0.2
        )
        foliation = solve_canonical(background, 0.1, 0.45, 1e-10, settings)
        reports = verify_canonical_conditions(foliation)
        assert all(r.norms["L2"] < 1e-8 for r in reports["canonical_condition"])

    def test_corrupted_source_fails(self, settings: CanonicalSettings) -> None:
        """Test a solver source that departs from the geometry fails verification."""
        foliation = solve_canonical(Doubled(epsilon=1e-3), 0.1, 0.45, 1e-10, settings)
        reports = verify_canonical_conditions(foliation)
        worst = max(r.norms["L2"] for r in reports["canonical_condition"])
        assert worst > 1e-6


class TestErrors:
    """Test the error contracts of the solver."""

    @pytest.mark.parametrize("gamma", [0.3, 1.0 / 3.0, 0.5, 0.6])
    def test_gamma_window(self, gamma: float) -> None:
        """Test gamma outside (1/3, 1/2) is rejected."""
        with pytest.raises(ConfigurationError, match="gamma"):
            solve_canonical(MinkowskiBackground(), gamma=gamma)

    @pytest.mark.parametrize("tolerance", [0.0, 1.0, -1e-3])
    def test_tolerance(self, tolerance: float) -> None:
        """Test tolerances outside (0, 1) are rejected."""
        with pytest.raises(ConfigurationError, match="tolerance"):
            solve_canonical(MinkowskiBackground(), tolerance=tolerance)

    def test_delta_beyond_extent(self) -> None:
        """Test delta larger than the background extent is rejected."""
        with pytest.raises(ConfigurationError, match="extent"):
            solve_canonical(SyntheticBackground(extent=0.05), delta=0.1)

    def test_vertex_bounds(self, settings: CanonicalSettings) -> None:
        """Test backgrounds violating the vertex bounds are rejected."""
        with pytest.raises(ConfigurationError, match="vertex bounds"):
            solve_canonical(SyntheticBackground(epsilon=1e4), settings=settings)

    def test_iteration_budget(self) -> None:
        """Test running out of steps is a numerical failure."""
        settings = CanonicalSettings(band_limit=6, nodes=12, max_iterations=2)
        with pytest.raises(NumericalFailure, match="did not reach"):
            solve_canonical(SyntheticBackground(), settings=settings)

    def test_contraction_failure(self) -> None:
        """Test a growing N stops the iteration."""
        settings = CanonicalSettings(band_limit=6, nodes=12)
        with pytest.raises(NumericalFailure, match="contraction failed"):
            solve_canonical(Unstable(), settings=settings)
