"""Geodesic double null foliations built from null generators.

The outgoing cone C_u is the future light cone of the axis point p(u) = (u, 0, 0, 0).
Its generators leave p(u) with the null velocity k normalised by g(k, d_t) = -1
and are integrated by RK4 in their affine parameter s with a fixed number of
steps, so the generator map is a smooth function of its labels. Spheres are
S(u, ubar) = {s = (ubar - u) / 2} on C_u. Then u is optical, l = -Du = dx/ds and
l(ubar) = 2, up to the RK4 truncation error.

The labels (u, a, b, s) of a point, a and b tilting the initial direction, are
found by Newton iteration on the generator map. Its Jacobian is taken by
complex-step differentiation, so the base metric must accept complex points.
"""

import logging
from collections import OrderedDict
from typing import Final, Literal

import numpy as np

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.spacetime.adapters import MetricAdapter, SphereEmbedding
from nullgeo.sphere import SphereGrid

logger = logging.getLogger(__name__)

Foliation = Literal["native", "geodesic"]
FOLIATIONS: Final = ("native", "geodesic")

COMPLEX_STEP: Final = 1e-20
NEWTON_TOLERANCE: Final = 1e-9
NEWTON_ITERATIONS: Final = 12
CACHE_SIZE: Final = 64
ANALYTIC_TOLERANCE: Final = 1e-7

Frame = tuple[np.ndarray, np.ndarray, np.ndarray]
Foliated = tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


def direction_frame(direction: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return unit vectors completing unit directions to orthonormal frames."""
    helper = np.zeros(direction.shape)
    away = np.abs(direction[..., 0]) < 0.9
    helper[..., 0] = np.where(away, 1.0, 0.0)
    helper[..., 1] = np.where(away, 0.0, 1.0)
    first = np.cross(direction, helper)
    first /= np.linalg.norm(first, axis=-1, keepdims=True)
    return first, np.cross(direction, first)


def _unit_steps(shape: tuple[int, ...]) -> np.ndarray:
    """Return the four label perturbations with a leading perturbation axis."""
    return np.eye(4).reshape((4,) + (1,) * len(shape) + (4,))


class GeodesicCones(MetricAdapter):
    """A spacetime relabelled by the light cones of its time axis.

    The metric and its curvature are those of the base adapter; only the
    foliation functions and the spheres change.
    """

    geodesic_foliation = True

    def __init__(self, base: MetricAdapter, steps: int = 16) -> None:
        """Initialise the relabelled spacetime.

        Args:
            base (MetricAdapter): Spacetime providing the metric; must be regular
                on the time axis and accept complex points.
            steps (int): RK4 steps per generator, independent of its length.

        Raises:
            ConfigurationError: If the base is already relabelled, the step
                count is not positive or the metric is not complex-analytic.
        """
        if isinstance(base, GeodesicCones):
            raise ConfigurationError(f"{base!r} already carries geodesic cones")
        if steps < 1:
            raise ConfigurationError(f"steps must be positive, got {steps}")
        super().__init__()
        self.base = base
        self.steps = int(steps)
        self.name = base.name
        self.vacuum = base.vacuum
        self.params = dict(base.params)
        self._cache: OrderedDict[bytes, Foliated] = OrderedDict()
        self._check_analytic()

    def __repr__(self) -> str:
        """Return the base adapter and the step count."""
        return f"GeodesicCones({self.base!r}, steps={self.steps})"

    def _check_analytic(self) -> None:
        point = np.array([0.3, 0.7, -0.4, 0.5])
        expected = self.base.metric_derivative(point)
        try:
            measured = np.stack(
                [
                    self.base.metric(point + 1j * COMPLEX_STEP * axis).imag
                    / COMPLEX_STEP
                    for axis in np.eye(4)
                ]
            )
        except (TypeError, ValueError) as error:
            raise ConfigurationError(
                f"{self.base.name} metric does not accept complex points"
            ) from error
        scale = 1.0 + float(np.max(np.abs(expected)))
        if not float(np.max(np.abs(measured - expected))) <= ANALYTIC_TOLERANCE * scale:
            raise ConfigurationError(
                f"{self.base.name} metric is not complex-analytic; geodesic cones "
                f"need its complex-step derivative"
            )

    def metric(self, points: np.ndarray) -> np.ndarray:
        """Return the base metric."""
        return self.base.metric(points)

    def metric_derivative(self, points: np.ndarray) -> np.ndarray:
        """Return the base metric derivative."""
        return self.base.metric_derivative(points)

    def christoffel(self, points: np.ndarray) -> np.ndarray:
        """Return the base connection."""
        return self.base.christoffel(points)

    def riemann(self, points: np.ndarray, step: np.ndarray | float) -> np.ndarray:
        """Return the base Riemann tensor."""
        return self.base.riemann(points, step)

    def ricci(self, points: np.ndarray, step: np.ndarray | float) -> np.ndarray:
        """Return the base Ricci tensor."""
        return self.base.ricci(points, step)

    def time_function(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return the base slicing function."""
        return self.base.time_function(points)

    def slice_time(
        self, level: float, spatial: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Return the base slices."""
        return self.base.slice_time(level, spatial)

    def _velocity(self, vertex: np.ndarray, direction: np.ndarray) -> np.ndarray:
        """Return the future null velocity with g(k, d_t) = -1 along directions."""
        metric = self.base.metric(vertex)
        g_tt = metric[..., 0, 0]
        g_tn = np.einsum("...i,...i->...", metric[..., 0, 1:], direction)
        g_nn = np.einsum(
            "...ij,...i,...j->...", metric[..., 1:, 1:], direction, direction
        )
        discriminant = g_tn**2 - g_tt * g_nn
        if np.any(discriminant.real <= 0.0) or np.any(g_tt.real >= 0.0):
            raise NumericalFailure(f"{self.name} axis is not in a Lorentzian region")
        slope = (-g_tn + np.sqrt(discriminant)) / g_nn
        normalisation = -1.0 / (g_tt + slope * g_tn)
        return normalisation[..., None] * np.concatenate(
            [np.ones(slope.shape + (1,)), slope[..., None] * direction], axis=-1
        )

    def _acceleration(self, position: np.ndarray, velocity: np.ndarray) -> np.ndarray:
        gamma = self.base.christoffel(position)
        return -np.einsum("...rmn,...m,...n->...r", gamma, velocity, velocity)

    def _flow(self, labels: np.ndarray, frame: Frame) -> np.ndarray:
        """Return the points reached from labels (u, a, b, s) of shape (..., 4)."""
        normal, first, second = frame
        tilted = (
            normal
            + labels[..., 1, None] * first
            + labels[..., 2, None] * second
        )
        direction = tilted / np.sqrt(np.sum(tilted**2, axis=-1))[..., None]
        position = np.zeros(labels.shape, dtype=labels.dtype)
        position[..., 0] = labels[..., 0]
        velocity = self._velocity(position, direction)
        step = (labels[..., 3] / self.steps)[..., None]
        for _ in range(self.steps):
            k1x, k1v = velocity, self._acceleration(position, velocity)
            k2x = velocity + 0.5 * step * k1v
            k2v = self._acceleration(position + 0.5 * step * k1x, k2x)
            k3x = velocity + 0.5 * step * k2v
            k3v = self._acceleration(position + 0.5 * step * k2x, k3x)
            k4x = velocity + step * k3v
            k4v = self._acceleration(position + step * k3x, k4x)
            position = position + step * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
            velocity = velocity + step * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        return position

    def generator_map(
        self, labels: np.ndarray, frame: Frame
    ) -> tuple[np.ndarray, np.ndarray]:
        """Return the generator map and its Jacobian d x^m / d(u, a, b, s)_k.

        Args:
            labels (np.ndarray): Real labels (u, a, b, s) of shape (..., 4).
            frame (Frame): Unit direction and its two tilts, each (..., 3).

        Returns:
            tuple[np.ndarray, np.ndarray]: Points (..., 4) and the Jacobian
            (..., 4, 4) with the point index first.
        """
        shape = labels.shape[:-1]
        perturbed = labels[None] + 1j * COMPLEX_STEP * _unit_steps(shape)
        stacked = tuple(
            np.broadcast_to(vector, (4,) + vector.shape) for vector in frame
        )
        image = self._flow(perturbed, (stacked[0], stacked[1], stacked[2]))
        return image[0].real, np.moveaxis(image.imag / COMPLEX_STEP, 0, -1)

    def _store(self, points: np.ndarray, foliated: Foliated) -> None:
        key = points.tobytes() + repr(points.shape).encode()
        self._cache[key] = foliated
        self._cache.move_to_end(key)
        while len(self._cache) > CACHE_SIZE:
            self._cache.popitem(last=False)

    def _lookup(self, points: np.ndarray) -> Foliated | None:
        key = points.tobytes() + repr(points.shape).encode()
        if key not in self._cache:
            return None
        self._cache.move_to_end(key)
        copies = tuple(value.copy() for value in self._cache[key])
        return copies  # type: ignore[return-value]

    @staticmethod
    def _differentials(labels: np.ndarray, jacobian: np.ndarray) -> Foliated:
        inverse = np.linalg.inv(jacobian)
        u = labels[..., 0]
        du = inverse[..., 0, :]
        return u, u + 2.0 * labels[..., 3], du, du + 2.0 * inverse[..., 3, :]

    def labels(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return the labels (u, a, b, s) of points and the generator Jacobian.

        The tilt labels are relative to the spatial direction of each point.

        Raises:
            NumericalFailure: If a point lies on the axis or Newton stalls.
        """
        spatial = points[..., 1:]
        radius = np.linalg.norm(spatial, axis=-1)
        if np.any(radius == 0.0):
            raise NumericalFailure("generator labels are undefined on the time axis")
        direction = spatial / radius[..., None]
        frame = (direction, *direction_frame(direction))
        labels = np.zeros(points.shape)
        labels[..., 0] = points[..., 0] - radius
        labels[..., 3] = radius
        scale = np.maximum(np.max(np.abs(points), axis=-1), 1.0)
        for iteration in range(NEWTON_ITERATIONS):
            image, jacobian = self.generator_map(labels, frame)
            update = np.linalg.solve(jacobian, (points - image)[..., None])[..., 0]
            labels = labels + update
            if np.max(np.abs(update) / scale[..., None]) < NEWTON_TOLERANCE:
                # the last quadratic step lands on round-off
                _, jacobian = self.generator_map(labels, frame)
                logger.debug("generator labels after %d Newton steps", iteration + 1)
                return labels, jacobian
        raise NumericalFailure(
            f"generator labels of {self.name} did not converge in "
            f"{NEWTON_ITERATIONS} Newton steps"
        )

    def foliation(self, points: np.ndarray) -> Foliated:
        """Return the axis cone labels u, ubar = u + 2s and their differentials."""
        cached = self._lookup(points)
        if cached is not None:
            return cached
        labels, jacobian = self.labels(points)
        foliated = self._differentials(labels, jacobian)
        self._store(points, foliated)
        return tuple(value.copy() for value in foliated)  # type: ignore[return-value]

    def sphere_position(self, u: float, ubar: float) -> tuple[float, float]:
        """Return the flat reference time u + s and radius s = (ubar - u) / 2.

        Raises:
            ConfigurationError: If ubar <= u.
        """
        if not ubar > u:
            raise ConfigurationError(f"sphere S(u={u}, ubar={ubar}) needs ubar > u")
        parameter = 0.5 * (ubar - u)
        return u + parameter, parameter

    def sphere_embedding(
        self, u: float, ubar: float, band_limit: int
    ) -> SphereEmbedding:
        """Return the endpoints of the generators of C_u at s = (ubar - u) / 2.

        Tangents are the tilt derivatives divided by s, so the flat cone maps the
        reference sphere of radius s isometrically. The velocity moves the vertex
        at fixed ubar, which shortens the generators by half as much.
        """
        _, parameter = self.sphere_position(u, ubar)
        grid = SphereGrid(band_limit, parameter)
        labels = np.zeros(grid.shape + (4,))
        labels[..., 0] = u
        labels[..., 3] = parameter
        frame = (grid.normal, grid.theta_hat, grid.phi_hat)
        points, jacobian = self.generator_map(labels, frame)
        tangents = (
            np.einsum("...i,...m->...im", grid.theta_hat, jacobian[..., 1])
            + np.einsum("...i,...m->...im", grid.phi_hat, jacobian[..., 2])
        ) / parameter
        velocity = jacobian[..., 0] - 0.5 * jacobian[..., 3]
        self._store(points, self._differentials(labels, jacobian))
        return SphereEmbedding(grid, points, tangents, velocity, coordinate=False)


def with_foliation(
    adapter: MetricAdapter, foliation: Foliation = "native", steps: int = 16
) -> MetricAdapter:
    """Return the adapter carrying the requested foliation.

    Args:
        adapter (MetricAdapter): Source spacetime.
        foliation (Foliation): "native" keeps the adapter's own foliation
            functions; "geodesic" relabels by axis light cones unless the
            native foliation is already geodesic.
        steps (int): RK4 steps per generator of the geodesic cones.

    Raises:
        ConfigurationError: If the foliation is unknown.
    """
    if foliation not in FOLIATIONS:
        raise ConfigurationError(
            f"unknown foliation {foliation!r}; choose one of {list(FOLIATIONS)}"
        )
    if foliation == "native" or adapter.geodesic_foliation:
        return adapter
    logger.info("relabelling %s by the light cones of its time axis", adapter.name)
    return GeodesicCones(adapter, steps)
