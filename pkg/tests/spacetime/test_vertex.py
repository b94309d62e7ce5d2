import numpy as np
import pytest

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime import LinearWave, Minkowski, VertexCone


class TestVertexCone:
    """Test light cones emanating from the time axis."""

    def test_flat_generators(self) -> None:
        """Test flat generators are straight null lines."""
        cone = VertexCone(Minkowski(), band_limit=4, steps=4)
        position, velocity = cone.generators(0.5, cone.grid.normal, 2.0)

        assert np.allclose(position[..., 0], 2.5)
        assert np.allclose(position[..., 1:], 2.0 * cone.grid.normal)
        assert np.allclose(velocity[..., 0], 1.0)

    def test_flat_profile(self) -> None:
        """Test flat cones are round with vanishing defect and curvature."""
        profile = VertexCone(Minkowski(), band_limit=6, steps=4).profile()

        assert np.allclose(profile.radii, (0.01, 0.02, 0.04, 0.08), rtol=1e-8)
        assert np.max(profile.deviations["chi"]) < 1e-6
        assert np.max(profile.deviations["y"]) < 1e-8
        assert profile.rates["curvature"] is None

    def test_wave_rates(self) -> None:
        """Test chi - g/r = O(r), y = O(r^2) and curvature = O(1) at the vertex."""
        profile = VertexCone(LinearWave(epsilon=0.05)).profile()
        matches = profile.matches()

        assert matches["chi"]
        assert matches["curvature"]
        assert matches["y"]

    def test_invalid_parameters(self) -> None:
        """Test profiles need at least two positive parameters."""
        cone = VertexCone(Minkowski(), band_limit=4, steps=4)

        with pytest.raises(ConfigurationError):
            cone.profile(parameters=(0.01,))
        with pytest.raises(ConfigurationError):
            cone.profile(parameters=(0.0, 0.01))

    def test_invalid_steps(self) -> None:
        """Test RK4 needs at least one step."""
        with pytest.raises(ConfigurationError):
            VertexCone(Minkowski(), steps=0)
