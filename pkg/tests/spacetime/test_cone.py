import numpy as np
import pytest

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime import ConeState, Minkowski, extract_cone_state


class TestFlatCone:
    """Test the null decomposition of a flat sphere."""

    def test_radius(self, flat_cone: ConeState) -> None:
        """Test the area radius is (ubar - u) / 2."""
        assert flat_cone.radius == pytest.approx(2.0, abs=1e-10)

    def test_expansions(self, flat_cone: ConeState) -> None:
        """Test trchi = 1 and trchibar = -1 on the sphere of radius 2."""
        assert np.allclose(flat_cone["trchi"].values, 1.0, atol=1e-10)
        assert np.allclose(flat_cone["trchib"].values, -1.0, atol=1e-10)

    def test_vanishing_components(self, flat_cone: ConeState) -> None:
        """Test every other component vanishes."""
        for name in ("chih", "chibh", "zeta", "eta", "etab", "omegab", "y", "b"):
            assert np.max(np.abs(flat_cone[name].values)) < 1e-10, name
        for name in ("alpha", "alphab", "beta", "betab", "rho", "sigma"):
            assert np.max(np.abs(flat_cone[name].values)) == 0.0, name

    def test_null_lapse(self, flat_cone: ConeState) -> None:
        """Test the flat null lapse is one."""
        assert np.allclose(flat_cone["lapse"].values, 1.0)

    def test_transverse(self, flat_cone: ConeState) -> None:
        """Test nabla_4 trchi = -trchi^2 / 2 and nabla_3 trchi = trchi^2 / 2."""
        assert np.allclose(flat_cone.nabla("4", "trchi").values, -0.5, atol=1e-8)
        assert np.allclose(flat_cone.nabla("3", "trchi").values, 0.5, atol=1e-8)

    def test_unknown_component(self, flat_cone: ConeState) -> None:
        """Test unknown component names are configuration errors."""
        with pytest.raises(ConfigurationError):
            flat_cone["theta"]

    def test_without_transverse(self) -> None:
        """Test transverse derivatives are only available when extracted."""
        state = extract_cone_state(Minkowski(), -1.0, 1.0, 4, transverse=False)

        with pytest.raises(ConfigurationError):
            state.nabla("4", "trchi")

    def test_degenerate_labels(self) -> None:
        """Test ubar <= u is rejected."""
        with pytest.raises(ConfigurationError):
            extract_cone_state(Minkowski(), 1.0, 0.0, 4)


class TestSchwarzschildCone:
    """Test the null decomposition of the Schwarzschild sphere of radius 10."""

    def test_radius(self, schwarzschild_cone: ConeState) -> None:
        """Test the area radius equals the areal coordinate."""
        assert schwarzschild_cone.radius == pytest.approx(10.0, rel=1e-10)

    @pytest.mark.parametrize(
        ("name", "expected"),
        [
            ("trchi", 0.2),
            ("trchib", -0.16),
            ("omegab", 0.01),
            ("y", 0.4),
            ("rho", -2e-3),
            ("omega", 0.0),
            ("sigma", 0.0),
        ],
    )
    def test_scalars(
        self, schwarzschild_cone: ConeState, name: str, expected: float
    ) -> None:
        """Test the closed-form scalars of the Kerr-Schild optical foliation."""
        assert np.allclose(schwarzschild_cone[name].values, expected, atol=1e-8)

    def test_spherical_symmetry(self, schwarzschild_cone: ConeState) -> None:
        """Test the one-forms and traceless parts vanish."""
        for name in ("chih", "chibh", "zeta", "xib", "beta", "betab", "b"):
            assert np.max(np.abs(schwarzschild_cone[name].values)) < 1e-8, name

    def test_first_variation(self, schwarzschild_cone: ConeState) -> None:
        """Test L_l gamma = 2 chi and L_lbar gamma = 2 chibar."""
        lie = schwarzschild_cone.lie
        chi = schwarzschild_cone["chi"].values
        chib = schwarzschild_cone["chib"].values

        assert np.allclose(lie["4"].values, 2.0 * chi, atol=1e-8)
        assert np.allclose(lie["3"].values, 2.0 * chib, atol=1e-8)

    def test_geodesic_defect(self, schwarzschild_cone: ConeState) -> None:
        """Test nabla_4 y = -4 omegabar."""
        derivative = schwarzschild_cone.nabla("4", "y").values
        omegab = schwarzschild_cone["omegab"].values

        assert np.allclose(derivative, -4.0 * omegab, atol=1e-8)
