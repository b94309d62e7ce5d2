import numpy as np
import pytest

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.spacetime import (
    FrameCalculus,
    FrameSettings,
    LinearWave,
    MetricAdapter,
    Minkowski,
    Schwarzschild,
)
from nullgeo.spacetime.frames import null_pair_from_differentials

POINTS = np.array([[0.3, 3.0, 2.0, 1.5], [1.0, -6.0, 0.5, 2.0]])


class TestNullPair:
    """Test the null pair adapted to the double foliation."""

    @pytest.mark.parametrize(
        "adapter", [Minkowski(), Schwarzschild(mass=1.0), LinearWave(epsilon=0.05)]
    )
    def test_normalisation(self, adapter: MetricAdapter) -> None:
        """Test g(l, lbar) = -2 and l(ubar) = 2."""
        _, _, _, dub = adapter.foliation(POINTS)
        pair = FrameCalculus(adapter).null_pair(POINTS)
        pair.check()

        assert np.allclose(np.einsum("...m,...m->...", dub, pair.l), 2.0)

    def test_optical_pair(self, schwarzschild: Schwarzschild) -> None:
        """Test l = -Du and lbar(u) = 2 for an optical u."""
        _, _, du, _ = schwarzschild.foliation(POINTS)
        pair = FrameCalculus(schwarzschild).null_pair(POINTS)
        raised = np.einsum("...mn,...n->...m", pair.inverse, du)

        assert np.allclose(pair.l, -raised, atol=1e-12)
        assert np.allclose(np.einsum("...m,...m->...", du, pair.lb), 2.0)

    def test_optical_defect(self, schwarzschild: Schwarzschild) -> None:
        """Test y = lbar(ubar) = 4M/r for the Schwarzschild optical functions."""
        pair = FrameCalculus(schwarzschild).null_pair(POINTS)
        radius = np.linalg.norm(POINTS[:, 1:], axis=-1)

        assert np.allclose(pair.y, 4.0 / radius, atol=1e-12)

    def test_flat_defect(self, minkowski: Minkowski) -> None:
        """Test flat optical functions have y = 0 and unit null lapse."""
        pair = FrameCalculus(minkowski).null_pair(POINTS)

        assert np.allclose(pair.y, 0.0, atol=1e-14)
        assert np.allclose(pair.lapse, 1.0)

    def test_projector(self, schwarzschild: Schwarzschild) -> None:
        """Test the projector annihilates l and lbar and has rank two."""
        pair = FrameCalculus(schwarzschild).null_pair(POINTS)
        projector = pair.projector

        assert np.allclose(np.einsum("...am,...m->...a", projector, pair.l), 0.0)
        assert np.allclose(np.einsum("...am,...m->...a", projector, pair.lb), 0.0)
        assert np.allclose(np.einsum("...aa->...", projector), 2.0)

    def test_degenerate_differentials(self) -> None:
        """Test parallel differentials are rejected."""
        metric = np.diag([-1.0, 1.0, 1.0, 1.0])[None]
        du = np.array([[1.0, -1.0, 0.0, 0.0]])

        with pytest.raises(NumericalFailure):
            null_pair_from_differentials(metric, du, du)


class TestFrameCalculus:
    """Test pointwise connection coefficients."""

    def test_flat_expansions(self, minkowski: Minkowski) -> None:
        """Test trchi = 2/r, trchibar = -2/r and vanishing torsion in flat space."""
        fields = FrameCalculus(minkowski).components(POINTS)
        radius = np.linalg.norm(POINTS[:, 1:], axis=-1)

        assert np.allclose(fields["trchi"], 2.0 / radius, atol=1e-10)
        assert np.allclose(fields["trchib"], -2.0 / radius, atol=1e-10)
        for name in ("chih", "chibh", "xi", "xib", "eta", "etab", "zeta"):
            assert np.max(np.abs(fields[name])) < 1e-10, name
        for name in ("omega", "omegab", "alpha", "beta", "rho", "sigma"):
            assert np.max(np.abs(fields[name])) < 1e-10, name

    def test_schwarzschild(self, schwarzschild: Schwarzschild) -> None:
        """Test the Schwarzschild expansions, omegabar and rho."""
        fields = FrameCalculus(schwarzschild).components(POINTS)
        radius = np.linalg.norm(POINTS[:, 1:], axis=-1)
        lapse = 1.0 - 2.0 / radius

        assert np.allclose(fields["trchi"], 2.0 / radius, atol=1e-8)
        assert np.allclose(fields["trchib"], -2.0 * lapse / radius, atol=1e-8)
        assert np.allclose(fields["omegab"], 1.0 / radius**2, atol=1e-8)
        assert np.allclose(fields["rho"], -2.0 / radius**3, atol=1e-8)
        assert np.max(np.abs(fields["omega"])) < 1e-8

    def test_raychaudhuri(self, schwarzschild: Schwarzschild) -> None:
        """Test nabla_4 trchi = -1/2 trchi^2 along the shear-free cones."""
        calculus = FrameCalculus(schwarzschild)
        derivative = calculus.transverse(POINTS, "4", ("trchi",))["trchi"]
        trace = calculus.components(POINTS)["trchi"]

        assert np.allclose(derivative, -0.5 * trace**2, atol=1e-7)

    def test_unknown_direction(self, minkowski: Minkowski) -> None:
        """Test transverse directions other than 3 and 4 are rejected."""
        with pytest.raises(ConfigurationError):
            FrameCalculus(minkowski).transverse(
                POINTS, "5"  # pyright: ignore[reportArgumentType]
            )

    def test_unknown_component(self, minkowski: Minkowski) -> None:
        """Test unknown component names are rejected."""
        with pytest.raises(ConfigurationError):
            FrameCalculus(minkowski).transverse(POINTS, "4", ("theta",))

    def test_invalid_settings(self) -> None:
        """Test non-positive steps are rejected."""
        with pytest.raises(ConfigurationError):
            FrameSettings(step=0.0)
