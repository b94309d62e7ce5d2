import numpy as np
import pytest

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.spacetime import (
    GeodesicCones,
    LinearWave,
    Minkowski,
    Schwarzschild,
    extract_cone_state,
    extract_slice_state,
    with_foliation,
)
from nullgeo.spacetime.adapters import MINKOWSKI
from nullgeo.spacetime.optical import direction_frame


@pytest.fixture(scope="module")
def wave_cones() -> GeodesicCones:
    """Return the axis light cones of a plane wave of amplitude 1e-2."""
    return GeodesicCones(LinearWave(epsilon=1e-2))


@pytest.fixture(scope="module")
def off_axis_points() -> np.ndarray:
    """Return points at radii between 1 and 3."""
    return np.array(
        [[0.0, 1.0, 0.5, -0.3], [0.7, -1.5, 2.0, 0.4], [-0.4, 0.2, -0.6, 1.1]]
    )


class Kinked(Minkowski):
    """Flat metric scaled by a factor that ignores imaginary parts."""

    def metric(self, points: np.ndarray) -> np.ndarray:
        """Return (1 + 0.01 Re t) eta."""
        factor = 1.0 + 0.01 * np.real(points[..., 0])
        return factor[..., None, None] * MINKOWSKI

    def metric_derivative(self, points: np.ndarray) -> np.ndarray:
        """Return 0.01 eta along t."""
        derivative = np.zeros(points.shape[:-1] + (4, 4, 4))
        derivative[..., 0, :, :] = 0.01 * MINKOWSKI
        return derivative


class TestGeodesicCones:
    """Test the foliation by light cones of the time axis."""

    def test_flat_labels(self, off_axis_points: np.ndarray) -> None:
        """Test flat cones reproduce u = t - r and ubar = t + r."""
        u, ubar, du, dubar = GeodesicCones(Minkowski()).foliation(off_axis_points)
        expected = Minkowski().foliation(off_axis_points)
        for measured, exact in zip((u, ubar, du, dubar), expected):
            np.testing.assert_allclose(measured, exact, atol=1e-10)

    def test_wave_labels_invert(
        self, wave_cones: GeodesicCones, off_axis_points: np.ndarray
    ) -> None:
        """Test the generator map sends the labels of a point back to it."""
        labels, _ = wave_cones.labels(off_axis_points)
        radius = np.linalg.norm(off_axis_points[..., 1:], axis=-1)
        direction = off_axis_points[..., 1:] / radius[..., None]
        points, _ = wave_cones.generator_map(
            labels, (direction, *direction_frame(direction))
        )
        np.testing.assert_allclose(points, off_axis_points, atol=1e-12)

    def test_wave_optical(
        self, wave_cones: GeodesicCones, off_axis_points: np.ndarray
    ) -> None:
        """Test u solves the eikonal equation and l(ubar) = 2."""
        _, _, du, dubar = wave_cones.foliation(off_axis_points)
        inverse = wave_cones.inverse_metric(off_axis_points)
        eikonal = np.einsum("...mn,...m,...n->...", inverse, du, du)
        assert float(np.max(np.abs(eikonal))) < 1e-5
        l = -np.einsum("...mn,...n->...m", inverse, du)
        np.testing.assert_allclose(
            np.einsum("...m,...m->...", l, dubar), 2.0, atol=1e-5
        )

    def test_wave_labels_differ(
        self, wave_cones: GeodesicCones, off_axis_points: np.ndarray
    ) -> None:
        """Test the wave bends the cones away from the flat labels."""
        u, _, _, _ = wave_cones.foliation(off_axis_points)
        flat, _, _, _ = Minkowski().foliation(off_axis_points)
        assert 1e-6 < float(np.max(np.abs(u - flat))) < 1e-1

    def test_cached(
        self, wave_cones: GeodesicCones, off_axis_points: np.ndarray
    ) -> None:
        """Test repeated lookups return equal, independent arrays."""
        first = wave_cones.foliation(off_axis_points)
        first[0][...] = 0.0
        second = wave_cones.foliation(off_axis_points)
        assert float(np.max(np.abs(second[0]))) > 0.0

    def test_flat_cone_state(self) -> None:
        """Test flat cones reproduce the native flat sphere S(-2, 2)."""
        native = extract_cone_state(
            Minkowski(), -2.0, 2.0, band_limit=4, transverse=False
        )
        relabelled = extract_cone_state(
            GeodesicCones(Minkowski()), -2.0, 2.0, band_limit=4, transverse=False
        )
        assert relabelled.tangents is not None
        assert relabelled.radius == pytest.approx(native.radius, rel=1e-9)
        for name in ("trchi", "trchib", "chih", "zeta", "y"):
            difference = relabelled[name].values - native[name].values
            assert float(np.max(np.abs(difference))) < 1e-8, name

    def test_embedding_on_cone(self, wave_cones: GeodesicCones) -> None:
        """Test the nodes of S(-2, 2) carry the labels they were built from."""
        embedding = wave_cones.sphere_embedding(-2.0, 2.0, 4)
        assert not embedding.coordinate
        u, ubar, _, _ = wave_cones.foliation(embedding.points.copy())
        np.testing.assert_allclose(u, -2.0, atol=1e-10)
        np.testing.assert_allclose(ubar, 2.0, atol=1e-10)
        metric = wave_cones.metric(embedding.points)
        induced = np.einsum(
            "...am,...bn,...mn->...ab", embedding.tangents, embedding.tangents, metric
        )
        np.testing.assert_allclose(induced, embedding.grid.projector, atol=5e-2)


class TestWithFoliation:
    """Test the selection of sphere labels."""

    def test_native(self) -> None:
        """Test the native foliation keeps the adapter."""
        wave = LinearWave()
        assert with_foliation(wave, "native") is wave

    def test_geodesic_adapters_kept(self) -> None:
        """Test adapters with geodesic labels are not relabelled."""
        schwarzschild = Schwarzschild(mass=1.0)
        assert with_foliation(schwarzschild, "geodesic") is schwarzschild

    def test_wraps(self) -> None:
        """Test flat labels of a wave are replaced by axis cones."""
        wrapped = with_foliation(LinearWave(), "geodesic")
        assert isinstance(wrapped, GeodesicCones)
        assert wrapped.geodesic_foliation
        assert wrapped.name == "LinearWave"

    def test_unknown(self) -> None:
        """Test unknown foliations are configuration errors."""
        with pytest.raises(ConfigurationError, match="unknown foliation"):
            extract_cone_state(
                Minkowski(), -2.0, 2.0, 4, foliation="bondi"  # type: ignore[arg-type]
            )


class TestGeodesicConesErrors:
    """Test the inputs of the axis cones are validated."""

    def test_nested(self, wave_cones: GeodesicCones) -> None:
        """Test relabelled spacetimes are not relabelled twice."""
        with pytest.raises(ConfigurationError, match="already"):
            GeodesicCones(wave_cones)  # type: ignore[arg-type]

    def test_steps(self) -> None:
        """Test the generator step count must be positive."""
        with pytest.raises(ConfigurationError, match="steps"):
            GeodesicCones(Minkowski(), steps=0)

    def test_not_analytic(self) -> None:
        """Test metrics that drop imaginary parts are refused."""
        with pytest.raises(ConfigurationError, match="complex"):
            GeodesicCones(Kinked())

    def test_axis(self, wave_cones: GeodesicCones) -> None:
        """Test points on the time axis carry no direction label."""
        with pytest.raises(NumericalFailure, match="axis"):
            wave_cones.foliation(np.array([[1.0, 0.0, 0.0, 0.0]]))

    def test_no_slices(self, wave_cones: GeodesicCones) -> None:
        """Test slices are only sampled on coordinate spheres."""
        with pytest.raises(ConfigurationError, match="coordinate spheres"):
            extract_slice_state(wave_cones, -2.0, 2.0, band_limit=4)

