import numpy as np
import pytest

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime import LinearWave, Minkowski, Schwarzschild, fd_oracle

POINT = np.array([[0.3, 3.0, 2.0, 1.5]])


class TestOracle:
    """Test the finite-difference curvature oracle."""

    def test_flat(self, minkowski: Minkowski) -> None:
        """Test flat Christoffel symbols and Riemann tensor vanish."""
        assert np.max(np.abs(fd_oracle(minkowski, POINT, "Christoffel"))) < 1e-12
        assert np.max(np.abs(fd_oracle(minkowski, POINT, "Riemann"))) < 1e-12

    def test_kretschmann_at_horizon(self, schwarzschild: Schwarzschild) -> None:
        """Test R_abcd R^abcd = 48 M^2 / r^6 = 0.75 at r = 2, M = 1."""
        horizon = np.array([[0.0, 1.2, 1.6, 0.0]])
        value = fd_oracle(schwarzschild, horizon, "Kretschmann")

        assert value[0] == pytest.approx(0.75, abs=1e-6)

    def test_schwarzschild_vacuum(self, schwarzschild: Schwarzschild) -> None:
        """Test the Schwarzschild Ricci tensor vanishes."""
        assert np.max(np.abs(fd_oracle(schwarzschild, POINT, "Ricci"))) < 1e-8

    def test_linear_wave_vacuum(self, wave: LinearWave) -> None:
        """Test the plane wave is Ricci flat to second order in its amplitude."""
        assert np.max(np.abs(fd_oracle(wave, POINT, "Ricci"))) <= 1e-5

    def test_closed_form_curvature(self, schwarzschild: Schwarzschild) -> None:
        """Test the adapter's Riemann tensor agrees with the oracle."""
        oracle = fd_oracle(schwarzschild, POINT, "Riemann")
        closed = schwarzschild.riemann(POINT, 1e-3)

        assert np.allclose(closed, oracle, atol=1e-8)

    def test_fourth_order(self, schwarzschild: Schwarzschild) -> None:
        """Test the extrapolated error falls sixteen-fold when the step halves."""
        exact = schwarzschild.christoffel(POINT)
        coarse = fd_oracle(schwarzschild, POINT, "Christoffel", step=0.1)
        fine = fd_oracle(schwarzschild, POINT, "Christoffel", step=0.05)
        ratio = np.max(np.abs(coarse - exact)) / np.max(np.abs(fine - exact))

        assert 14.0 <= ratio <= 18.0

    def test_callable_metric(self) -> None:
        """Test the oracle accepts a metric function in any dimension."""

        def sphere(points: np.ndarray) -> np.ndarray:
            metric = np.zeros(points.shape[:-1] + (2, 2))
            metric[..., 0, 0] = 1.0
            metric[..., 1, 1] = np.sin(points[..., 0]) ** 2
            return metric

        ricci = fd_oracle(sphere, np.array([[1.0, 0.3]]), "Ricci")

        assert np.allclose(ricci[0], sphere(np.array([[1.0, 0.3]]))[0], atol=1e-8)

    @pytest.mark.parametrize("step", [0.0, -1e-3])
    def test_invalid_step(self, minkowski: Minkowski, step: float) -> None:
        """Test non-positive steps are rejected."""
        with pytest.raises(ConfigurationError):
            fd_oracle(minkowski, POINT, "Ricci", step=step)

    def test_unknown_quantity(self, minkowski: Minkowski) -> None:
        """Test unknown quantities are rejected."""
        with pytest.raises(ConfigurationError):
            fd_oracle(minkowski, POINT, "Weyl")  # pyright: ignore[reportArgumentType]
