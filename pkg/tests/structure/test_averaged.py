import pytest

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime import (
    ConeState,
    LinearWave,
    Schwarzschild,
    extract_cone_state,
)
from nullgeo.structure import averaged_diagnostics, catalog, eval_averaged_equations


class TestDiagnostics:
    """Test sphere averages and the Hawking mass."""

    def test_flat(self, flat_cone: ConeState) -> None:
        """Test flat averages and a vanishing mass."""
        diagnostics = averaged_diagnostics(flat_cone)
        assert diagnostics.trchi_bar == pytest.approx(1.0, abs=1e-10)
        assert diagnostics.trchib_bar == pytest.approx(-1.0, abs=1e-10)
        assert diagnostics.hawking_mass == pytest.approx(0.0, abs=1e-9)
        assert diagnostics.rho_bar == 0.0

    @pytest.mark.parametrize("radius", [5.0, 10.0, 20.0])
    def test_hawking_mass(self, radius: float) -> None:
        """Test the Hawking mass of Schwarzschild spheres is M."""
        state = extract_cone_state(
            Schwarzschild(mass=1.0), 0.0, 2.0 * radius, band_limit=6, transverse=False
        )
        diagnostics = averaged_diagnostics(state)
        assert diagnostics.hawking_mass == pytest.approx(1.0, abs=1e-6)
        assert diagnostics.hawking_mass_curvature == pytest.approx(1.0, abs=1e-6)
        assert diagnostics.rho_bar == pytest.approx(-2.0 / radius**3, rel=1e-6)

    def test_mass_aspect(self, schwarzschild_cone: ConeState) -> None:
        """Test the average of the mass aspect is the average of rho."""
        diagnostics = averaged_diagnostics(schwarzschild_cone)
        assert diagnostics.mu_bar == pytest.approx(diagnostics.rho_bar, abs=1e-12)
        assert diagnostics.sigma_bar == pytest.approx(
            diagnostics.shear_twist, abs=1e-12
        )

    def test_to_dict(self, schwarzschild_cone: ConeState) -> None:
        """Test the scalar summary omits the mass aspect field."""
        summary = averaged_diagnostics(schwarzschild_cone).to_dict()
        assert "mu" not in summary
        assert summary["radius"] == pytest.approx(10.0)


class TestAveragedEquations:
    """Test the averaged transport equations."""

    def test_flat(self, flat_cone: ConeState) -> None:
        """Test all averaged identities, incoming ones included, on a flat cone."""
        reports = eval_averaged_equations(flat_cone)
        assert {report.id for report in reports} == {
            entry.id for entry in catalog("averaged")
        }
        for report in reports:
            assert report.norms["Linf"] < 1e-7, report.id

    def test_schwarzschild(self, schwarzschild_cone: ConeState) -> None:
        """Test the outgoing identities; y = 4M/r excludes the incoming ones."""
        reports = eval_averaged_equations(schwarzschild_cone)
        ids = {report.id for report in reports}
        assert "average_nabla4_rho" in ids
        assert "average_nabla3_rho" not in ids
        for report in reports:
            assert report.norms["Linf"] < 1e-6, report.id

    def test_native_wave_labels(self) -> None:
        """Test the flat labels of a plane wave are refused with a hint."""
        state = extract_cone_state(
            LinearWave(epsilon=1e-3), 0.0, 4.0, band_limit=4, transverse=False
        )
        with pytest.raises(ConfigurationError, match='foliation="geodesic"'):
            eval_averaged_equations(state)

    def test_wave_axis_cones(self, wave_geodesic_cone: ConeState) -> None:
        """Test the outgoing averages on the light cones of a plane wave's axis."""
        reports = eval_averaged_equations(wave_geodesic_cone)
        assert "average_nabla4_rho" in {report.id for report in reports}
        for report in reports:
            assert report.norms["Linf"] < 1e-5, report.id
