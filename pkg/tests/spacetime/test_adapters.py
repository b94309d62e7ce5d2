from typing import Any

import numpy as np
import pytest

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.spacetime import (
    LinearWave,
    MetricAdapter,
    Minkowski,
    Schwarzschild,
    SyntheticBump,
    builtin_adapter,
)
from nullgeo.spacetime.differences import jacobian

POINTS = np.array([[0.3, 3.0, 2.0, 1.5], [-1.0, 0.5, -4.0, 2.5]])


class TestMetrics:
    """Test the closed-form metrics of the built-in adapters."""

    def test_minkowski(self, minkowski: Minkowski) -> None:
        """Test the flat metric is diag(-1, 1, 1, 1) everywhere."""
        metric = minkowski.metric(POINTS)

        assert metric.shape == (2, 4, 4)
        assert np.allclose(metric, np.diag([-1.0, 1.0, 1.0, 1.0]))

    def test_schwarzschild_static_component(
        self, schwarzschild: Schwarzschild
    ) -> None:
        """Test g_tt = -(1 - 2M/r) at r = 5."""
        metric = schwarzschild.metric(np.array([[0.0, 3.0, 4.0, 0.0]]))

        assert metric[0, 0, 0] == pytest.approx(-(1.0 - 2.0 / 5.0), abs=1e-14)

    @pytest.mark.parametrize(
        "adapter",
        [Schwarzschild(mass=1.0), LinearWave(epsilon=0.05), SyntheticBump()],
    )
    def test_metric_derivative(self, adapter: MetricAdapter) -> None:
        """Test the closed-form metric derivative against a five-point stencil."""
        stencil = jacobian(adapter.metric, POINTS, 1e-3)

        assert np.allclose(adapter.metric_derivative(POINTS), stencil, atol=1e-9)

    @pytest.mark.parametrize(
        "adapter",
        [
            Minkowski(),
            Schwarzschild(mass=1.0),
            LinearWave(epsilon=0.1),
            SyntheticBump(),
        ],
    )
    def test_signature(self, adapter: MetricAdapter) -> None:
        """Test every adapter is Lorentzian away from its singularities."""
        adapter.check_signature(POINTS)


class TestFoliation:
    """Test the optical functions and sphere positions."""

    def test_schwarzschild_differentials(self, schwarzschild: Schwarzschild) -> None:
        """Test du and dubar are the gradients of u and ubar."""
        u, ubar, du, dubar = schwarzschild.foliation(POINTS)

        def labels(points: np.ndarray) -> np.ndarray:
            first, second, _, _ = schwarzschild.foliation(points)
            return np.stack([first, second], axis=-1)

        # (..., a, 2)
        gradients = jacobian(labels, POINTS, 1e-3)

        assert np.allclose(gradients[..., 0], du, atol=1e-9)
        assert np.allclose(gradients[..., 1], dubar, atol=1e-9)
        assert np.allclose(ubar - u, 2.0 * np.linalg.norm(POINTS[:, 1:], axis=-1))

    def test_sphere_position_round_trip(self, schwarzschild: Schwarzschild) -> None:
        """Test the sphere position lies on the requested level sets."""
        time, radius = schwarzschild.sphere_position(-3.0, 17.0)
        point = np.array([[time, radius, 0.0, 0.0]])
        u, ubar, _, _ = schwarzschild.foliation(point)

        assert radius == pytest.approx(10.0)
        assert u[0] == pytest.approx(-3.0, abs=1e-10)
        assert ubar[0] == pytest.approx(17.0, abs=1e-10)

    def test_inside_horizon(self, schwarzschild: Schwarzschild) -> None:
        """Test spheres inside r = 2M are rejected."""
        with pytest.raises(NumericalFailure):
            schwarzschild.sphere_position(0.0, 3.0)

    def test_degenerate_flat_sphere(self, minkowski: Minkowski) -> None:
        """Test ubar <= u is rejected."""
        with pytest.raises(ConfigurationError):
            minkowski.sphere_position(1.0, 1.0)

    def test_origin(self, minkowski: Minkowski) -> None:
        """Test the flat foliation is singular at the spatial origin."""
        with pytest.raises(NumericalFailure):
            minkowski.foliation(np.zeros((1, 4)))


class TestParameters:
    """Test adapter parameters and the registry."""

    def test_defaults(self) -> None:
        """Test parameters default and override."""
        assert Schwarzschild().mass == 1.0
        assert Schwarzschild(mass=2.5).mass == 2.5

    @pytest.mark.parametrize(
        ("factory", "params"),
        [
            (Schwarzschild, {"mass": -1.0}),
            (Schwarzschild, {"charge": 1.0}),
            (LinearWave, {"epsilon": 0.5}),
            (LinearWave, {"wavenumber": 0.0}),
            (SyntheticBump, {"width": -2.0}),
            (SyntheticBump, {"centre": (0.0, 1.0)}),
        ],
    )
    def test_invalid(
        self, factory: type[MetricAdapter], params: dict[str, Any]
    ) -> None:
        """Test invalid or unknown parameters are configuration errors."""
        with pytest.raises(ConfigurationError):
            factory(**params)

    def test_builtin_adapter(self) -> None:
        """Test adapters are looked up by case-insensitive name."""
        adapter = builtin_adapter("schwarzschild", {"mass": 0.5})

        assert isinstance(adapter, Schwarzschild)
        assert adapter.mass == 0.5

    def test_unknown_adapter(self) -> None:
        """Test an unknown adapter name is a configuration error."""
        with pytest.raises(ConfigurationError):
            builtin_adapter("Kerr", {})

    def test_non_vacuum_flag(self) -> None:
        """Test only the bump is flagged as non-vacuum."""
        assert not builtin_adapter("SyntheticBump", {}).vacuum
        assert builtin_adapter("Minkowski", {}).vacuum
