import numpy as np
import pytest

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime import ConeState
from nullgeo.transition import MAX_SIZE, TransitionCoefficients


class TestTransitionCoefficients:
    """Test the smooth transition coefficients."""

    def test_identity(self, schwarzschild_cone: ConeState) -> None:
        """Test the default coefficients are the identity transition."""
        coefficients = TransitionCoefficients()
        pair = schwarzschild_cone.calculus.null_pair(schwarzschild_cone.points)
        f, fb = coefficients.forms(pair, schwarzschild_cone.points)

        assert coefficients.is_identity
        assert np.all(coefficients.log_lambda(schwarzschild_cone.points) == 0.0)
        assert np.all(f == 0.0)
        assert np.all(fb == 0.0)

    def test_forms_are_horizontal(self, schwarzschild_cone: ConeState) -> None:
        """Test f and fbar annihilate l and lbar."""
        coefficients = TransitionCoefficients.generic(0.1)
        pair = schwarzschild_cone.calculus.null_pair(schwarzschild_cone.points)
        for form in coefficients.forms(pair, schwarzschild_cone.points):
            assert np.max(np.abs(np.einsum("...m,...m->...", form, pair.l))) < 1e-12
            assert np.max(np.abs(np.einsum("...m,...m->...", form, pair.lb))) < 1e-12

    def test_uniform_lapse(self, flat_cone: ConeState) -> None:
        """Test a uniform lapse gives a constant log lambda."""
        coefficients = TransitionCoefficients(lapse=0.2, uniform_lapse=True)

        assert np.allclose(coefficients.log_lambda(flat_cone.points), 0.2)
        assert not coefficients.is_identity

    def test_small_coefficients_pass(self, schwarzschild_cone: ConeState) -> None:
        """Test small coefficients are accepted."""
        pair = schwarzschild_cone.calculus.null_pair(schwarzschild_cone.points)
        TransitionCoefficients.generic(0.05).check(pair, schwarzschild_cone.points)

    def test_large_coefficients_fail(self, schwarzschild_cone: ConeState) -> None:
        """Test frame changes beyond the small-deformation regime are rejected."""
        pair = schwarzschild_cone.calculus.null_pair(schwarzschild_cone.points)

        with pytest.raises(ConfigurationError):
            TransitionCoefficients(lapse=2 * MAX_SIZE, uniform_lapse=True).check(
                pair, schwarzschild_cone.points
            )

    def test_non_finite(self) -> None:
        """Test non-finite amplitudes are rejected."""
        with pytest.raises(ConfigurationError):
            TransitionCoefficients(outgoing=float("nan"))
