import numpy as np
import pytest

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime import (
    Minkowski,
    Schwarzschild,
    SliceState,
    SyntheticBump,
    extract_slice_state,
)


@pytest.fixture(scope="module")
def static_slice() -> SliceState:
    """Return the static Schwarzschild slice through the sphere of radius 5."""
    return extract_slice_state(Schwarzschild(mass=1.0), 0.0, 10.0, band_limit=6)


class TestFlatSlice:
    """Test the t = 0 slice of Minkowski space."""

    def test_fundamental_forms(self) -> None:
        """Test k = 0, E = H = 0, unit lapse and unit slope."""
        state = extract_slice_state(Minkowski(), -2.0, 2.0, band_limit=6)

        assert state.level == 0.0
        assert np.allclose(state.metric, np.eye(3))
        assert np.allclose(state.lapse.values, 1.0)
        assert np.max(np.abs(state.second_form)) < 1e-12
        assert np.max(np.abs(state.electric)) == 0.0
        assert np.max(np.abs(state.magnetic)) == 0.0
        assert np.allclose(state.boundary.nu.values, 1.0)
        for name in state.residuals:
            assert state.residual_norm(name) < 1e-10, name

    def test_unknown_residual(self) -> None:
        """Test unknown residual names are rejected."""
        state = extract_slice_state(Minkowski(), -1.0, 1.0, band_limit=4)

        with pytest.raises(ConfigurationError):
            state.residual_norm("hamiltonian")


class TestStaticSlice:
    """Test the static slice of Schwarzschild in Kerr-Schild coordinates."""

    def test_lapse(self, static_slice: SliceState) -> None:
        """Test n = sqrt(1 - 2M/r) on r = 5."""
        assert np.allclose(static_slice.lapse.values, np.sqrt(0.6), atol=1e-10)

    def test_time_symmetric(self, static_slice: SliceState) -> None:
        """Test the slice is totally geodesic and its magnetic part vanishes."""
        assert np.max(np.abs(static_slice.second_form)) < 1e-8
        assert static_slice.residual_norm("trace") < 1e-8
        assert static_slice.residual_norm("curl") < 1e-8

    def test_constraints(self, static_slice: SliceState) -> None:
        """Test the Gauss, momentum and lapse equations."""
        assert static_slice.residual_norm("gauss") < 1e-6
        assert static_slice.residual_norm("divergence") < 1e-6
        assert static_slice.residual_norm("lapse") < 1e-6

    def test_boundary(self, static_slice: SliceState) -> None:
        """Test nu = sqrt(1 - 2M/r) and the vanishing decomposition of k."""
        boundary = static_slice.boundary

        assert np.allclose(boundary.nu.values, np.sqrt(0.6), atol=1e-10)
        assert np.max(np.abs(boundary.delta.values)) < 1e-8
        assert np.max(np.abs(boundary.epsilon.values)) < 1e-8
        assert np.max(np.abs(boundary.kappa.values)) < 1e-8


class TestBumpSlice:
    """Test slices of the non-vacuum bump."""

    def test_not_maximal(self, bump: SyntheticBump) -> None:
        """Test requesting a maximal slice fails when tr k does not vanish."""
        with pytest.raises(ConfigurationError):
            extract_slice_state(bump, -2.0, 2.0, band_limit=4, maximal=True)

    def test_matter_current(self, bump: SyntheticBump) -> None:
        """Test the momentum residual detects the matter current."""
        state = extract_slice_state(bump, -2.0, 2.0, band_limit=4)

        assert state.residual_norm("trace") > 1e-6
        assert state.residual_norm("divergence") > 1e-7
