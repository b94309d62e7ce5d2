import numpy as np
import pytest

from nullgeo.energy import (
    modified_lie_derivative,
    vector_field,
    weyl_current,
    weyl_field,
)
from nullgeo.energy.weyl import symmetry_defects
from nullgeo.spacetime import FrameCalculus, Minkowski, Schwarzschild


@pytest.fixture(scope="module")
def schwarzschild_calculus() -> FrameCalculus:
    """Return a frame calculus on Schwarzschild with unit mass."""
    return FrameCalculus(Schwarzschild(mass=1.0))


class TestModifiedLieDerivative:
    """Test the modified Lie derivative of the Weyl tensor."""

    def test_killing_rotation(
        self, schwarzschild_calculus: FrameCalculus, schwarzschild_points: np.ndarray
    ) -> None:
        """Test the derivative along a rotation vanishes in Schwarzschild."""
        vector = vector_field(schwarzschild_calculus, "O3")
        values = modified_lie_derivative(
            schwarzschild_calculus, vector, schwarzschild_points
        )
        weyl = weyl_field(schwarzschild_calculus, schwarzschild_points)
        assert np.max(np.abs(values)) < 1e-4 * np.max(np.abs(weyl.tensor))

    def test_weyl_symmetries(
        self, schwarzschild_calculus: FrameCalculus, schwarzschild_points: np.ndarray
    ) -> None:
        """Test the derivative along K keeps the Weyl symmetries."""
        vector = vector_field(schwarzschild_calculus, "K")
        values = modified_lie_derivative(
            schwarzschild_calculus, vector, schwarzschild_points
        )
        metric = schwarzschild_calculus.adapter.metric(schwarzschild_points)
        defects = symmetry_defects(metric, values)
        assert max(defects.values()) < 1e-4


class TestWeylCurrent:
    """Test the divergence of the commuted Weyl tensor against its decomposition."""

    def test_flat_current_vanishes(self) -> None:
        """Test every current vanishes in Minkowski."""
        calculus = FrameCalculus(Minkowski())
        points = np.array([[0.5, 1.0, 2.0, 2.0]])
        current = weyl_current(calculus, vector_field(calculus, "T"), points)
        assert np.all(current.direct == 0.0)
        assert current.mismatch == 0.0

    def test_rotation_current_vanishes(
        self, schwarzschild_calculus: FrameCalculus, schwarzschild_points: np.ndarray
    ) -> None:
        """Test a Killing rotation gives no current."""
        points = schwarzschild_points[:1]
        vector = vector_field(schwarzschild_calculus, "O3")
        current = weyl_current(schwarzschild_calculus, vector, points)
        weyl = weyl_field(schwarzschild_calculus, points)
        bound = 1e-3 * np.max(np.abs(weyl.tensor)) / np.linalg.norm(points[0, 1:])
        assert np.max(np.abs(current.direct)) < bound
        assert np.max(np.abs(current.decomposed)) < bound

    def test_morawetz_current(
        self, schwarzschild_calculus: FrameCalculus, schwarzschild_points: np.ndarray
    ) -> None:
        """Test the direct divergence matches the deformation decomposition."""
        points = schwarzschild_points[:1]
        vector = vector_field(schwarzschild_calculus, "K")
        current = weyl_current(schwarzschild_calculus, vector, points)
        assert np.max(np.abs(current.direct)) > 0.0
        assert current.mismatch < 1e-3
