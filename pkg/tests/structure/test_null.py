import pytest

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime import ConeState, LinearWave, Minkowski, extract_cone_state
from nullgeo.structure import (
    catalog,
    eval_geodesic_relations,
    eval_structure_residuals,
)


class TestStructureResiduals:
    """Test the null structure equations on exact backgrounds."""

    def test_covers_catalog(self, flat_cone: ConeState) -> None:
        """Test one report is produced per structure identity."""
        reports = eval_structure_residuals(flat_cone)
        assert [report.id for report in reports] == [
            entry.id for entry in catalog("structure")
        ]

    def test_flat(self, flat_cone: ConeState) -> None:
        """Test every residual vanishes on a flat sphere."""
        for report in eval_structure_residuals(flat_cone):
            assert report.norms["Linf"] < 1e-7, report.id

    def test_schwarzschild(self, schwarzschild_cone: ConeState) -> None:
        """Test every residual vanishes on a Schwarzschild sphere."""
        for report in eval_structure_residuals(schwarzschild_cone):
            assert report.norms["Linf"] < 1e-6, report.id

    def test_parameters(self, schwarzschild_cone: ConeState) -> None:
        """Test reports record where they were evaluated."""
        report = eval_structure_residuals(schwarzschild_cone)[0]
        assert report.parameters["adapter"] == "Schwarzschild"
        assert report.parameters["band_limit"] == 8
        assert report.parameters["radius"] == pytest.approx(10.0)

    def test_codazzi_wave_convergence(
        self, wave_cones: dict[tuple[float, int], ConeState]
    ) -> None:
        """Test the Codazzi residuals of a plane wave fall with the band limit."""
        coarse = {
            report.id: report.norms["Linf"]
            for report in eval_structure_residuals(wave_cones[(1e-3, 4)])
        }
        fine = {
            report.id: report.norms["Linf"]
            for report in eval_structure_residuals(wave_cones[(1e-3, 10)])
        }
        for name in ("codazzi_chih", "codazzi_chibh"):
            assert fine[name] < 1e-6, name
            assert fine[name] < coarse[name], name

    def test_needs_transverse(self) -> None:
        """Test a state without transverse data is rejected."""
        state = extract_cone_state(
            Minkowski(), 0.0, 4.0, band_limit=4, transverse=False
        )
        with pytest.raises(ConfigurationError):
            eval_structure_residuals(state)


class TestGeodesicRelations:
    """Test the relations of geodesic foliations."""

    def test_flat(self, flat_cone: ConeState) -> None:
        """Test the relations hold on a flat sphere."""
        reports = eval_geodesic_relations(flat_cone)
        assert len(reports) == len(catalog("geodesic"))
        for report in reports:
            assert report.norms["Linf"] < 1e-8, report.id

    def test_schwarzschild(self, schwarzschild_cone: ConeState) -> None:
        """Test nabla_4 y = -4 omegab and the vanishing relations."""
        for report in eval_geodesic_relations(schwarzschild_cone):
            assert report.norms["Linf"] < 1e-6, report.id

    def test_native_wave_labels(self) -> None:
        """Test the flat labels of a plane wave are refused with a hint."""
        state = extract_cone_state(
            LinearWave(epsilon=1e-3), 0.0, 4.0, band_limit=4, transverse=False
        )
        with pytest.raises(ConfigurationError, match='foliation="geodesic"'):
            eval_geodesic_relations(state)

    def test_wave_axis_cones(self, wave_geodesic_cone: ConeState) -> None:
        """Test the relations hold on the light cones of a plane wave's axis."""
        for report in eval_geodesic_relations(wave_geodesic_cone):
            assert report.norms["Linf"] < 1e-6, report.id
