"""Analytic spacetime metrics in Cartesian coordinates (t, x, y, z).

Every adapter supplies the metric and its first derivatives in closed form,
a pair of foliation functions (u, ubar) whose level sets intersect in the
coordinate spheres {t = const, |x| = const}, and a time function for slices.
Geodesic cones for any adapter are built in nullgeo.spacetime.optical.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any

import numpy as np

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.spacetime.curvature import (
    christoffel,
    lower_riemann,
    ricci,
    riemann,
)
from nullgeo.spacetime.differences import directional, jacobian
from nullgeo.sphere import SphereGrid

logger = logging.getLogger(__name__)

MINKOWSKI = np.diag([-1.0, 1.0, 1.0, 1.0])
MAX_AMPLITUDE = 0.1


def _radial(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    spatial = points[..., 1:]
    # analytic in the coordinates so that complex points pass through
    radius = np.sqrt(np.sum(spatial**2, axis=-1))
    if np.any(radius == 0.0):
        raise NumericalFailure("radial direction is undefined at the spatial origin")
    return radius, spatial / radius[..., None]


@dataclass(frozen=True, eq=False)
class SphereEmbedding:
    """Nodes of a sphere S(u, ubar) placed in spacetime.

    Attributes:
        grid (SphereGrid): Reference grid whose directions label the nodes.
        points (np.ndarray): Spacetime points (..., 4).
        tangents (np.ndarray): Images (..., 3, 4) of the ambient tangent vectors
            of the reference sphere; row i pushes forward the i-th ambient axis.
        velocity (np.ndarray): d/du of the nodes at fixed ubar and direction.
        coordinate (bool): Whether the sphere is {t = const, |x| = r}.
    """

    grid: SphereGrid
    points: np.ndarray
    tangents: np.ndarray
    velocity: np.ndarray
    coordinate: bool = True


class MetricAdapter(ABC):
    """Base class for analytic test spacetimes.

    Subclasses implement the metric, its derivative and the foliation functions.
    Curvature is assembled from the closed-form connection whose derivative is
    taken by the five-point stencil.
    """

    name: str = "adapter"
    defaults: dict[str, Any] = {}
    vacuum: bool = True
    geodesic_foliation: bool = False

    def __init__(self, **params: Any) -> None:
        """Initialise the adapter.

        Args:
            **params: Parameters overriding the class defaults.

        Raises:
            ConfigurationError: If a parameter is unknown or out of range.
        """
        unknown = sorted(set(params) - set(self.defaults))
        if unknown:
            raise ConfigurationError(
                f"{self.name} does not accept parameters {unknown}; "
                f"known parameters are {sorted(self.defaults)}"
            )
        self.params = {**self.defaults, **params}
        self._validate()

    def __repr__(self) -> str:
        """Return the adapter name and parameters."""
        settings = ", ".join(f"{key}={value!r}" for key, value in self.params.items())
        return f"{type(self).__name__}({settings})"

    def _validate(self) -> None:
        """Check parameter ranges."""

    @abstractmethod
    def metric(self, points: np.ndarray) -> np.ndarray:
        """Return g_mn at points of shape (..., 4)."""

    @abstractmethod
    def metric_derivative(self, points: np.ndarray) -> np.ndarray:
        """Return d_a g_mn with the derivative index first."""

    @abstractmethod
    def foliation(
        self, points: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Return (u, ubar, du, dubar) at points."""

    @abstractmethod
    def sphere_position(self, u: float, ubar: float) -> tuple[float, float]:
        """Return the coordinate time and radius of the sphere S(u, ubar)."""

    def sphere_embedding(
        self, u: float, ubar: float, band_limit: int
    ) -> SphereEmbedding:
        """Return the nodes of S(u, ubar) as the coordinate sphere of sphere_position.

        Args:
            u (float): Outgoing foliation label.
            ubar (float): Incoming foliation label.
            band_limit (int): Band limit of the reference grid.
        """
        time, radius = self.sphere_position(u, ubar)
        grid = SphereGrid(band_limit, radius)
        points = np.concatenate(
            [np.full(grid.shape + (1,), time), radius * grid.normal], axis=-1
        )
        tangents = np.zeros(grid.shape + (3, 4))
        tangents[..., 1:] = grid.projector

        def position(labels: np.ndarray) -> np.ndarray:
            return np.array(self.sphere_position(float(labels[0]), float(labels[1])))

        labels = np.array([u, ubar], dtype=float)
        step = 1e-3 * max(1.0, float(np.max(np.abs(labels))))
        rates = directional(position, labels, np.array([1.0, 0.0]), step)
        velocity = np.concatenate(
            [np.full(grid.shape + (1,), rates[0]), rates[1] * grid.normal], axis=-1
        )
        return SphereEmbedding(grid, points, tangents, velocity)

    def time_function(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return the slicing function and its differential; t by default."""
        differential = np.zeros(points.shape)
        differential[..., 0] = 1.0
        return points[..., 0].copy(), differential

    def slice_time(
        self, level: float, spatial: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Return the coordinate time of the slice and its spatial gradient."""
        return np.full(spatial.shape[:-1], float(level)), np.zeros(spatial.shape)

    def inverse_metric(self, points: np.ndarray) -> np.ndarray:
        """Return g^mn."""
        return np.linalg.inv(self.metric(points))

    def christoffel(self, points: np.ndarray) -> np.ndarray:
        """Return Gamma^r_mn from the closed-form metric derivative."""
        return christoffel(self.inverse_metric(points), self.metric_derivative(points))

    def riemann(self, points: np.ndarray, step: np.ndarray | float) -> np.ndarray:
        """Return the lowered Riemann tensor R_rsmn.

        Args:
            points (np.ndarray): Points of shape (..., 4).
            step (np.ndarray | float): Per-point step for the connection derivative.
        """
        gamma = self.christoffel(points)
        dgamma = jacobian(self.christoffel, points, step)
        return lower_riemann(self.metric(points), riemann(gamma, dgamma))

    def ricci(self, points: np.ndarray, step: np.ndarray | float) -> np.ndarray:
        """Return the Ricci tensor."""
        gamma = self.christoffel(points)
        return ricci(riemann(gamma, jacobian(self.christoffel, points, step)))

    def check_signature(self, points: np.ndarray) -> None:
        """Verify the metric is symmetric with signature (-, +, +, +).

        Raises:
            NumericalFailure: If the metric is not Lorentzian at some point.
        """
        metric = self.metric(points)
        if not np.allclose(metric, np.swapaxes(metric, -1, -2)):
            raise NumericalFailure(f"{self.name} metric is not symmetric")
        eigenvalues = np.linalg.eigvalsh(metric)
        negative = np.count_nonzero(eigenvalues < 0.0, axis=-1)
        if np.any(negative != 1) or np.any(eigenvalues == 0.0):
            raise NumericalFailure(f"{self.name} metric is not Lorentzian")


class Minkowski(MetricAdapter):
    """Flat spacetime with u = t - r and ubar = t + r."""

    name = "Minkowski"
    geodesic_foliation = True

    def metric(self, points: np.ndarray) -> np.ndarray:
        """Return diag(-1, 1, 1, 1)."""
        return np.broadcast_to(MINKOWSKI, points.shape[:-1] + (4, 4)).copy()

    def metric_derivative(self, points: np.ndarray) -> np.ndarray:
        """Return zero."""
        return np.zeros(points.shape[:-1] + (4, 4, 4))

    def foliation(
        self, points: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Return the flat outgoing and incoming optical functions."""
        return _flat_foliation(points)

    def sphere_position(self, u: float, ubar: float) -> tuple[float, float]:
        """Return t = (u + ubar) / 2 and r = (ubar - u) / 2."""
        return _flat_sphere(u, ubar)


def _flat_foliation(
    points: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    radius, direction = _radial(points)
    time = points[..., 0]
    du = np.concatenate([np.ones(radius.shape + (1,)), -direction], axis=-1)
    dubar = np.concatenate([np.ones(radius.shape + (1,)), direction], axis=-1)
    return time - radius, time + radius, du, dubar


def _flat_sphere(u: float, ubar: float) -> tuple[float, float]:
    if not ubar > u:
        raise ConfigurationError(f"sphere S(u={u}, ubar={ubar}) needs ubar > u")
    return 0.5 * (u + ubar), 0.5 * (ubar - u)


class Schwarzschild(MetricAdapter):
    """Schwarzschild spacetime in ingoing Kerr-Schild form.

    g = eta + (2M / r) k k with k = dt + x/r . dx. The outgoing optical function
    is u = t - r - 4M log(r / 2M - 1) and ubar = u + 2r, so that l = -Du has
    l(ubar) = 2, trchi = 2/r, trchibar = -2(1 - 2M/r)/r and y = 4M/r.
    """

    name = "Schwarzschild"
    defaults = {"mass": 1.0}
    geodesic_foliation = True

    def _validate(self) -> None:
        """Check M >= 0."""
        if not self.params["mass"] >= 0.0:
            raise ConfigurationError(
                f"Schwarzschild mass must be non-negative, got {self.params['mass']}"
            )

    @property
    def mass(self) -> float:
        """Return M."""
        return float(self.params["mass"])

    def _null_form(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        radius, direction = _radial(points)
        form = np.concatenate([np.ones(radius.shape + (1,)), direction], axis=-1)
        return radius, form

    def metric(self, points: np.ndarray) -> np.ndarray:
        """Return eta + (2M / r) k k."""
        radius, form = self._null_form(points)
        potential = 2.0 * self.mass / radius
        return MINKOWSKI + potential[..., None, None] * np.einsum(
            "...m,...n->...mn", form, form
        )

    def metric_derivative(self, points: np.ndarray) -> np.ndarray:
        """Return d_a g_mn in closed form."""
        radius, form = self._null_form(points)
        direction = form[..., 1:]
        potential = 2.0 * self.mass / radius

        d_potential = np.zeros(points.shape)
        d_potential[..., 1:] = -potential[..., None] * direction / radius[..., None]

        d_form = np.zeros(points.shape[:-1] + (4, 4))
        projector = np.eye(3) - np.einsum("...i,...j->...ij", direction, direction)
        d_form[..., 1:, 1:] = projector / radius[..., None, None]

        outer = np.einsum("...m,...n->...mn", form, form)
        return np.einsum("...a,...mn->...amn", d_potential, outer) + potential[
            ..., None, None, None
        ] * (
            np.einsum("...am,...n->...amn", d_form, form)
            + np.einsum("...m,...an->...amn", form, d_form)
        )

    def _tortoise(self, radius: np.ndarray) -> np.ndarray:
        if self.mass == 0.0:
            return np.zeros_like(radius)
        ratio = radius / (2.0 * self.mass) - 1.0
        if np.any(ratio <= 0.0):
            raise NumericalFailure(
                f"optical functions are undefined inside r = 2M = {2 * self.mass}"
            )
        return 2.0 * self.mass * np.log(ratio)

    def foliation(
        self, points: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Return the outgoing optical function and ubar = u + 2r."""
        radius, direction = _radial(points)
        time = points[..., 0]
        u = time - radius - 2.0 * self._tortoise(radius)
        slope = (radius + 2.0 * self.mass) / (radius - 2.0 * self.mass)
        du = np.concatenate(
            [np.ones(radius.shape + (1,)), -slope[..., None] * direction], axis=-1
        )
        dubar = du.copy()
        dubar[..., 1:] += 2.0 * direction
        return u, u + 2.0 * radius, du, dubar

    def sphere_position(self, u: float, ubar: float) -> tuple[float, float]:
        """Return t = u + r + 4M log(r / 2M - 1) and r = (ubar - u) / 2."""
        radius = 0.5 * (ubar - u)
        if not radius > 2.0 * self.mass:
            raise NumericalFailure(
                f"sphere S(u={u}, ubar={ubar}) has r = {radius} inside 2M"
            )
        time = u + radius + 2.0 * float(self._tortoise(np.asarray(radius)))
        return time, radius

    def time_function(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return the static time t - 2M log(r / 2M - 1)."""
        radius, direction = _radial(points)
        time = points[..., 0] - self._tortoise(radius)
        differential = np.zeros(points.shape)
        differential[..., 0] = 1.0
        differential[..., 1:] = (
            -(2.0 * self.mass / (radius - 2.0 * self.mass))[..., None] * direction
        )
        return time, differential

    def slice_time(
        self, level: float, spatial: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Return the Kerr-Schild time of the static slice and its gradient."""
        radius = np.linalg.norm(spatial, axis=-1)
        direction = spatial / radius[..., None]
        time = level + self._tortoise(radius)
        gradient = (2.0 * self.mass / (radius - 2.0 * self.mass))[
            ..., None
        ] * direction
        return time, gradient


class LinearWave(MetricAdapter):
    """Plane gravitational wave g = eta + eps h travelling along +z.

    h_xx = -h_yy = A cos(k(t - z) + phase) and h_xy = B cos(k(t - z) + phase).
    The perturbation is transverse traceless, so Ricci is O(eps^2). Spheres are
    labelled by the flat functions u = t - r and ubar = t + r, which are not
    optical: the null pair is built from them and carries y != 0.
    """

    name = "LinearWave"
    defaults = {
        "epsilon": 1e-3,
        "plus": 1.0,
        "cross": 0.0,
        "wavenumber": 1.0,
        "phase": 0.0,
    }

    def _validate(self) -> None:
        """Check |eps| <= 0.1 and k > 0."""
        if not abs(self.params["epsilon"]) <= MAX_AMPLITUDE:
            raise ConfigurationError(
                f"LinearWave epsilon must satisfy |eps| <= {MAX_AMPLITUDE}, "
                f"got {self.params['epsilon']}"
            )
        if not self.params["wavenumber"] > 0.0:
            raise ConfigurationError(
                f"LinearWave wavenumber must be positive, got "
                f"{self.params['wavenumber']}"
            )

    def _polarisation(self) -> np.ndarray:
        plus = self.params["plus"]
        cross = self.params["cross"]
        tensor = np.zeros((4, 4))
        tensor[1, 1] = plus
        tensor[2, 2] = -plus
        tensor[1, 2] = tensor[2, 1] = cross
        return self.params["epsilon"] * tensor

    def _phase(self, points: np.ndarray) -> np.ndarray:
        return self.params["wavenumber"] * (points[..., 0] - points[..., 3]) + (
            self.params["phase"]
        )

    def metric(self, points: np.ndarray) -> np.ndarray:
        """Return eta + eps h."""
        profile = np.cos(self._phase(points))
        return MINKOWSKI + profile[..., None, None] * self._polarisation()

    def metric_derivative(self, points: np.ndarray) -> np.ndarray:
        """Return d_a g_mn; only the t and z derivatives are non-zero."""
        slope = -self.params["wavenumber"] * np.sin(self._phase(points))
        gradient = np.zeros(points.shape)
        gradient[..., 0] = slope
        gradient[..., 3] = -slope
        return np.einsum("...a,mn->...amn", gradient, self._polarisation())

    def foliation(
        self, points: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Return u = t - r and ubar = t + r."""
        return _flat_foliation(points)

    def sphere_position(self, u: float, ubar: float) -> tuple[float, float]:
        """Return t = (u + ubar) / 2 and r = (ubar - u) / 2."""
        return _flat_sphere(u, ubar)


class SyntheticBump(MetricAdapter):
    """Conformally flat non-vacuum metric g = (1 + eps psi) eta.

    psi = exp(-((t - t0)^2 + |x - c|^2) / w^2) is a Gaussian bump centred at
    (t0, c). The metric is flagged as non-vacuum.
    """

    name = "SyntheticBump"
    defaults = {"epsilon": 1e-2, "width": 2.0, "centre": (0.5, 1.0, 0.0, 0.0)}
    vacuum = False

    def _validate(self) -> None:
        """Check |eps| <= 0.1, w > 0 and a four-component centre."""
        if not abs(self.params["epsilon"]) <= MAX_AMPLITUDE:
            raise ConfigurationError(
                f"SyntheticBump epsilon must satisfy |eps| <= {MAX_AMPLITUDE}, "
                f"got {self.params['epsilon']}"
            )
        if not self.params["width"] > 0.0:
            raise ConfigurationError(
                f"SyntheticBump width must be positive, got {self.params['width']}"
            )
        if np.shape(self.params["centre"]) != (4,):
            raise ConfigurationError(
                f"SyntheticBump centre needs four coordinates, got "
                f"{self.params['centre']}"
            )

    def _bump(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        offset = points - np.asarray(self.params["centre"], dtype=float)
        width = self.params["width"]
        profile = np.exp(-np.sum(offset**2, axis=-1) / width**2)
        return profile, -2.0 * offset * profile[..., None] / width**2

    def metric(self, points: np.ndarray) -> np.ndarray:
        """Return (1 + eps psi) eta."""
        profile, _ = self._bump(points)
        factor = 1.0 + self.params["epsilon"] * profile
        return factor[..., None, None] * MINKOWSKI

    def metric_derivative(self, points: np.ndarray) -> np.ndarray:
        """Return eps d_a psi eta_mn."""
        _, gradient = self._bump(points)
        return self.params["epsilon"] * np.einsum(
            "...a,mn->...amn", gradient, MINKOWSKI
        )

    def foliation(
        self, points: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Return u = t - r and ubar = t + r."""
        return _flat_foliation(points)

    def sphere_position(self, u: float, ubar: float) -> tuple[float, float]:
        """Return t = (u + ubar) / 2 and r = (ubar - u) / 2."""
        return _flat_sphere(u, ubar)


ADAPTERS: dict[str, type[MetricAdapter]] = {
    adapter.name: adapter
    for adapter in (Minkowski, Schwarzschild, LinearWave, SyntheticBump)
}


def builtin_adapter(name: str, params: dict[str, Any] | None = None) -> MetricAdapter:
    """Return a catalog adapter by name.

    Args:
        name (str): One of Minkowski, Schwarzschild, LinearWave, SyntheticBump;
            matching ignores case.
        params (dict[str, Any] | None): Adapter parameters.

    Returns:
        MetricAdapter: The configured adapter.

    Raises:
        ConfigurationError: If the name is unknown or a parameter is invalid.
    """
    lookup = {key.lower(): value for key, value in ADAPTERS.items()}
    if name.lower() not in lookup:
        raise ConfigurationError(
            f"unknown adapter {name!r}; choose one of {sorted(ADAPTERS)}"
        )
    adapter = lookup[name.lower()](**(params or {}))
    if not adapter.vacuum:
        logger.warning("%s is not a vacuum spacetime", adapter)
    return adapter
