"""Light cones from a point of the time axis and their vertex limits.

Generators leave the vertex p(tau) = (tau, 0, 0, 0) with initial velocity
(1, lambda omega), omega a unit direction and lambda fixed by the null condition,
and are integrated by RK4 in their affine parameter s. The cone is labelled by u = tau
and ubar = tau + 2 s, so that l = dx/ds satisfies l(ubar) = 2.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.spacetime.adapters import MetricAdapter
from nullgeo.spacetime.differences import directional, fit_slope
from nullgeo.spacetime.frames import norm_squared, null_pair_from_differentials
from nullgeo.sphere import SphereGrid

logger = logging.getLogger(__name__)

DEFAULT_PARAMETERS = (0.01, 0.02, 0.04, 0.08)
EXPECTED_RATES = {"chi": 1.0, "y": 2.0, "curvature": 0.0}
RATE_TOLERANCE = 0.2
FLAT_FLOOR = 1e-12
ANGULAR_STEP = 1e-3


@dataclass(frozen=True)
class VertexProfile:
    """Deviations of a vertex cone from its flat limits at several radii.

    Attributes:
        adapter_name (str): Name of the spacetime.
        vertex (float): Time of the vertex on the axis.
        radii (np.ndarray): Area radii of the sampled spheres.
        deviations (dict[str, np.ndarray]): Largest pointwise norms of
            chi - g/r, y and the curvature components on every sphere.
        rates (dict[str, float | None]): Fitted log-log slopes; None where the
            deviation vanishes to round-off.
    """

    adapter_name: str
    vertex: float
    radii: np.ndarray
    deviations: dict[str, np.ndarray]
    rates: dict[str, float | None] = field(default_factory=dict)

    def matches(self, tolerance: float = RATE_TOLERANCE) -> dict[str, bool]:
        """Return whether every fitted rate is within tolerance of its limit."""
        return {
            name: rate is not None and abs(rate - EXPECTED_RATES[name]) <= tolerance
            for name, rate in self.rates.items()
        }


def _null_velocity(metric: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Return the future null vector (1, lambda omega) along a spatial direction."""
    g_tt = metric[..., 0, 0]
    g_ti = np.einsum("...i,...i->...", metric[..., 0, 1:], direction)
    g_ij = np.einsum("...ij,...i,...j->...", metric[..., 1:, 1:], direction, direction)
    discriminant = g_ti**2 - g_tt * g_ij
    if np.any(discriminant <= 0.0) or np.any(g_tt >= 0.0):
        raise NumericalFailure("vertex is not in a Lorentzian region")
    scale = (-g_ti + np.sqrt(discriminant)) / g_ij
    return np.concatenate(
        [np.ones(scale.shape + (1,)), scale[..., None] * direction], axis=-1
    )


class VertexCone:
    """Future light cone family from the time axis of an adapter."""

    def __init__(
        self, adapter: MetricAdapter, band_limit: int = 8, steps: int = 32
    ) -> None:
        """Initialise the cone family.

        Args:
            adapter (MetricAdapter): Source spacetime; must be regular on the axis.
            band_limit (int): Band limit of the direction grid.
            steps (int): RK4 steps per generator.
        """
        if steps < 1:
            raise ConfigurationError(f"RK4 needs at least one step, got {steps}")
        self.adapter = adapter
        self.grid = SphereGrid(band_limit)
        self.steps = steps

    def _acceleration(self, position: np.ndarray, velocity: np.ndarray) -> np.ndarray:
        gamma = self.adapter.christoffel(position)
        return -np.einsum("...rmn,...m,...n->...r", gamma, velocity, velocity)

    def generators(
        self, vertex: float, directions: np.ndarray, parameter: float
    ) -> tuple[np.ndarray, np.ndarray]:
        """Return positions and velocities of the generators at affine parameter s."""
        norm = np.linalg.norm(directions, axis=-1, keepdims=True)
        directions = directions / norm
        origin = np.zeros(directions.shape[:-1] + (4,))
        origin[..., 0] = vertex
        position = origin
        velocity = _null_velocity(self.adapter.metric(origin), directions)
        step = parameter / self.steps
        for _ in range(self.steps):
            k1x, k1v = velocity, self._acceleration(position, velocity)
            k2x = velocity + 0.5 * step * k1v
            k2v = self._acceleration(position + 0.5 * step * k1x, k2x)
            k3x = velocity + 0.5 * step * k2v
            k3v = self._acceleration(position + 0.5 * step * k2x, k3x)
            k4x = velocity + step * k3v
            k4v = self._acceleration(position + step * k3x, k4x)
            position = position + step / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
            velocity = velocity + step / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        return position, velocity

    def _embedding(self, labels: np.ndarray) -> np.ndarray:
        """Map (tau, s, a, b) to spacetime, a and b along theta_hat and phi_hat."""
        grid = self.grid
        directions = (
            grid.normal
            + labels[..., 2, None] * grid.theta_hat
            + labels[..., 3, None] * grid.phi_hat
        )
        position, _ = self.generators(
            float(labels[0, 0, 0]), directions, float(labels[0, 0, 1])
        )
        return position

    def sphere(self, vertex: float, parameter: float) -> dict[str, np.ndarray]:
        """Return the geometry of the sphere at affine parameter s.

        The keys are points, velocity, tangents (..., 4, 4) = d x / d(tau, s, a, b)
        and the induced metric on the unit-sphere frame.
        """
        grid = self.grid
        labels = np.zeros(grid.shape + (4,))
        labels[..., 0] = vertex
        labels[..., 1] = parameter
        steps = (ANGULAR_STEP, 0.05 * parameter, ANGULAR_STEP, ANGULAR_STEP)
        columns = []
        for axis, step in enumerate(steps):
            offset = np.zeros(4)
            offset[axis] = 1.0
            columns.append(directional(self._embedding, labels, offset, step))
        tangents = np.stack(columns, axis=-2)
        points, velocity = self.generators(vertex, grid.normal, parameter)
        metric = self.adapter.metric(points)
        angular = tangents[..., 2:, :]
        induced = np.einsum("...am,...bn,...mn->...ab", angular, angular, metric)
        return {
            "points": points,
            "velocity": velocity,
            "tangents": tangents,
            "induced": induced,
        }

    def profile(
        self,
        vertex: float = 0.0,
        parameters: tuple[float, ...] = DEFAULT_PARAMETERS,
        curvature_step: float = 1e-3,
    ) -> VertexProfile:
        """Sample the cone at several affine parameters and fit the vertex rates.

        Raises:
            ConfigurationError: If fewer than two parameters are given.
        """
        if len(parameters) < 2 or min(parameters) <= 0.0:
            raise ConfigurationError(
                f"vertex profile needs at least two positive parameters, got "
                f"{parameters}"
            )
        grid = self.grid
        radii = []
        deviations: dict[str, list[float]] = {"chi": [], "y": [], "curvature": []}
        for parameter in parameters:
            current = self.sphere(vertex, parameter)
            induced = current["induced"]
            area = float(grid.integrate(np.sqrt(np.linalg.det(induced))))
            radius = np.sqrt(area / (4.0 * np.pi))
            radii.append(radius)

            def induced_at(shifted: float) -> np.ndarray:
                return self.sphere(vertex, shifted)["induced"]

            rate = sum(
                weight * induced_at(parameter + shift * 0.05 * parameter)
                for shift, weight in ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))
            ) / (12.0 * 0.05 * parameter)
            chi = 0.5 * rate - induced / radius
            inverse = np.linalg.inv(induced)
            chi_norm = np.einsum(
                "...ac,...bd,...ab,...cd->...", inverse, inverse, chi, chi
            )
            deviations["chi"].append(float(np.sqrt(np.max(chi_norm))))

            cotangents = np.linalg.inv(current["tangents"])
            du = cotangents[..., :, 0]
            dub = du + 2.0 * cotangents[..., :, 1]
            pair = null_pair_from_differentials(
                self.adapter.metric(current["points"]), du, dub
            )
            deviations["y"].append(float(np.max(np.abs(pair.y))))

            riemann = self.adapter.riemann(current["points"], curvature_step)
            l, lb, proj = pair.l, pair.lb, pair.projector
            alpha = np.einsum(
                "...am,...cn,...rasc,...r,...s->...mn", proj, proj, riemann, l, l
            )
            rho = 0.25 * np.einsum(
                "...abcd,...a,...b,...c,...d->...", riemann, lb, l, lb, l
            )
            curvature = np.sqrt(norm_squared(pair, alpha, 2) + rho**2)
            deviations["curvature"].append(float(np.max(curvature)))

        arrays = {name: np.asarray(values) for name, values in deviations.items()}
        rates: dict[str, float | None] = {}
        for name, values in arrays.items():
            if np.max(values) < FLAT_FLOOR:
                rates[name] = None
                continue
            rates[name] = fit_slope(radii, values)
        logger.info("vertex rates of %s: %s", self.adapter.name, rates)
        return VertexProfile(
            self.adapter.name, vertex, np.asarray(radii), arrays, rates
        )
