"""Riemannian metrics on the closed unit coordinate ball.

Every metric is given in closed form together with its first coordinate
derivative, dg[..., a, m, n] = d_a g_mn. The Ricci tensor is obtained by
differencing the closed-form connection.
"""

import json
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any

import numpy as np

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.spacetime.curvature import christoffel, riemann
from nullgeo.spacetime.curvature import ricci as contract_ricci
from nullgeo.spacetime.differences import jacobian

logger = logging.getLogger(__name__)


class DiskMetric(ABC):
    """Base class for metrics g_ij(y) on the unit ball of R^3.

    Subclasses set ``name`` and ``defaults`` and implement the metric and its
    derivative for points of shape (..., 3).
    """

    name: str = "disk"
    defaults: dict[str, Any] = {}

    def __init__(self, **params: Any) -> None:
        """Initialise the metric.

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
        """Return the metric name and parameters."""
        settings = ", ".join(f"{key}={value!r}" for key, value in self.params.items())
        return f"{type(self).__name__}({settings})"

    def _validate(self) -> None:
        """Check parameter ranges."""

    @property
    def size(self) -> float:
        """Return the perturbation size epsilon of the metric."""
        return abs(float(self.params.get("epsilon", 0.0)))

    @abstractmethod
    def metric(self, points: np.ndarray) -> np.ndarray:
        """Return g_mn of shape (..., 3, 3)."""

    @abstractmethod
    def metric_derivative(self, points: np.ndarray) -> np.ndarray:
        """Return d_a g_mn of shape (..., 3, 3, 3)."""

    def christoffel(self, points: np.ndarray) -> np.ndarray:
        """Return Gamma^r_mn from the closed-form derivative."""
        inverse = np.linalg.inv(self.metric(points))
        return christoffel(inverse, self.metric_derivative(points))

    def ricci(self, points: np.ndarray, step: float) -> np.ndarray:
        """Return the Ricci tensor by differencing the connection.

        Args:
            points (np.ndarray): Points of shape (..., 3).
            step (float): Step of the five-point stencil.
        """
        gamma = self.christoffel(points)
        return contract_ricci(riemann(gamma, jacobian(self.christoffel, points, step)))

    def check_positive(self, points: np.ndarray) -> None:
        """Verify the metric is positive definite at every point.

        Raises:
            NumericalFailure: If an eigenvalue is not positive.
        """
        smallest = float(np.min(np.linalg.eigvalsh(self.metric(points))))
        if not smallest > 0.0:
            raise NumericalFailure(
                f"{self.name} metric is not positive definite: smallest eigenvalue "
                f"{smallest:.3e}"
            )

    @classmethod
    def from_file(cls, path: str | Path) -> "DiskMetric":
        """Load the parameters from a JSON object.

        Raises:
            ConfigurationError: If the file is unreadable or not an object.
        """
        try:
            document = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as error:
            raise ConfigurationError(
                f"cannot read {cls.name} metric {path}: {error}"
            ) from error
        if not isinstance(document, dict):
            raise ConfigurationError(
                f"{cls.name} metric {path} must hold a JSON object"
            )
        logger.info("loaded %s metric from %s", cls.name, path)
        return cls(**document)


def _vector(params: dict[str, Any], key: str) -> np.ndarray:
    value = np.asarray(params[key], dtype=float)
    if value.shape != (3,) or not np.all(np.isfinite(value)):
        raise ConfigurationError(f"{key} must be three finite numbers, got {value}")
    return value


class FlatDisk(DiskMetric):
    """The Euclidean unit ball."""

    name = "flat"

    def metric(self, points: np.ndarray) -> np.ndarray:
        """Return delta_mn."""
        return np.broadcast_to(np.eye(3), points.shape[:-1] + (3, 3)).copy()

    def metric_derivative(self, points: np.ndarray) -> np.ndarray:
        """Return zero."""
        return np.zeros(points.shape[:-1] + (3, 3, 3))


class ConformalBump(DiskMetric):
    """Conformally flat metric (1 + epsilon psi)^4 delta with a Gaussian bump.

    psi(y) = exp(-|y - c|^2 / (2 w^2)) for the centre c and the width w.
    """

    name = "conformal"
    defaults: dict[str, Any] = {
        "epsilon": 1e-2,
        "width": 0.3,
        "centre": [0.0, 0.0, 0.0],
    }

    def _validate(self) -> None:
        """Check the bump stays inside the ball and the factor stays positive."""
        centre = _vector(self.params, "centre")
        if not np.linalg.norm(centre) < 1.0:
            raise ConfigurationError(f"bump centre {centre} is outside the unit ball")
        if not self.params["width"] > 0.0:
            raise ConfigurationError(
                f"width must be positive, got {self.params['width']}"
            )
        if not (np.isfinite(self.params["epsilon"]) and self.params["epsilon"] > -1.0):
            raise ConfigurationError(
                f"epsilon must exceed -1, got {self.params['epsilon']}"
            )

    @property
    def is_radial(self) -> bool:
        """Return whether the bump is centred at the origin."""
        return not np.any(_vector(self.params, "centre"))

    def bump(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return psi and its gradient."""
        offset = points - _vector(self.params, "centre")
        width = float(self.params["width"])
        psi = np.exp(-np.sum(offset**2, axis=-1) / (2.0 * width**2))
        return psi, -offset * (psi / width**2)[..., None]

    def factor(self, points: np.ndarray) -> np.ndarray:
        """Return the conformal factor 1 + epsilon psi."""
        return 1.0 + self.params["epsilon"] * self.bump(points)[0]

    def radial_profile(self, radii: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return the factor and its radial derivative for a centred bump."""
        if not self.is_radial:
            raise ConfigurationError("the radial profile needs a centred bump")
        width = float(self.params["width"])
        psi = np.exp(-(radii**2) / (2.0 * width**2))
        epsilon = self.params["epsilon"]
        return 1.0 + epsilon * psi, -epsilon * radii * psi / width**2

    def metric(self, points: np.ndarray) -> np.ndarray:
        """Return (1 + epsilon psi)^4 delta."""
        return self.factor(points)[..., None, None] ** 4 * np.eye(3)

    def metric_derivative(self, points: np.ndarray) -> np.ndarray:
        """Return 4 (1 + epsilon psi)^3 epsilon d_a psi delta."""
        psi, gradient = self.bump(points)
        epsilon = self.params["epsilon"]
        scale = 4.0 * (1.0 + epsilon * psi) ** 3 * epsilon
        return np.einsum("...a,mn->...amn", scale[..., None] * gradient, np.eye(3))


class TracelessBump(DiskMetric):
    """Metric delta + epsilon (1 - |y|^2)^2 H with H constant, symmetric, traceless.

    The perturbation and its first derivative vanish on the boundary sphere, so
    the boundary is round and totally umbilic while the interior is curved.
    """

    name = "traceless"
    defaults: dict[str, Any] = {
        "epsilon": 1e-2,
        "shear": [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 0.0]],
    }

    def _validate(self) -> None:
        """Check the shear matrix."""
        shear = np.asarray(self.params["shear"], dtype=float)
        if shear.shape != (3, 3) or not np.allclose(shear, shear.T):
            raise ConfigurationError(
                f"shear must be a symmetric 3x3 matrix, got {shear}"
            )
        if abs(np.trace(shear)) > 1e-12:
            raise ConfigurationError(
                f"shear must be traceless, got trace {np.trace(shear)}"
            )
        if not np.isfinite(self.params["epsilon"]):
            raise ConfigurationError(
                f"epsilon must be finite, got {self.params['epsilon']}"
            )

    @property
    def shear(self) -> np.ndarray:
        """Return H."""
        return np.asarray(self.params["shear"], dtype=float)

    def metric(self, points: np.ndarray) -> np.ndarray:
        """Return delta + epsilon (1 - |y|^2)^2 H."""
        weight = self.params["epsilon"] * (1.0 - np.sum(points**2, axis=-1)) ** 2
        return np.eye(3) + weight[..., None, None] * self.shear

    def metric_derivative(self, points: np.ndarray) -> np.ndarray:
        """Return -4 epsilon (1 - |y|^2) y_a H."""
        weight = -4.0 * self.params["epsilon"] * (1.0 - np.sum(points**2, axis=-1))
        return np.einsum("...a,mn->...amn", weight[..., None] * points, self.shear)


class MobiusDisk(DiskMetric):
    """Flat metric pulled back by the ball automorphism moving ``offset`` to 0.

    g = w^4 delta with w^2 = (1 - |b|^2) / (1 - 2 b.y + |b|^2 |y|^2). The boundary
    metric is the pullback of the round metric by a Mobius map of the sphere.
    """

    name = "mobius"
    defaults: dict[str, Any] = {"offset": [0.0, 0.0, 0.0]}

    def _validate(self) -> None:
        """Check the offset lies inside the ball."""
        if not np.linalg.norm(_vector(self.params, "offset")) < 1.0:
            raise ConfigurationError("offset must lie inside the unit ball")

    @property
    def size(self) -> float:
        """Return |b|."""
        return float(np.linalg.norm(_vector(self.params, "offset")))

    def _quadric(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
        offset = _vector(self.params, "offset")
        squared = float(offset @ offset)
        quadric = (
            1.0 - 2.0 * points @ offset + squared * np.sum(points**2, axis=-1)
        )
        gradient = 2.0 * squared * points - 2.0 * offset
        return quadric, gradient, (1.0 - squared) ** 2

    def metric(self, points: np.ndarray) -> np.ndarray:
        """Return (1 - |b|^2)^2 q^-2 delta."""
        quadric, _, scale = self._quadric(points)
        return (scale / quadric**2)[..., None, None] * np.eye(3)

    def metric_derivative(self, points: np.ndarray) -> np.ndarray:
        """Return -2 (1 - |b|^2)^2 q^-3 d_a q delta."""
        quadric, gradient, scale = self._quadric(points)
        derivative = (-2.0 * scale / quadric**3)[..., None] * gradient
        return np.einsum("...a,mn->...amn", derivative, np.eye(3))


DISK_METRICS: dict[str, type[DiskMetric]] = {
    FlatDisk.name: FlatDisk,
    ConformalBump.name: ConformalBump,
    TracelessBump.name: TracelessBump,
    MobiusDisk.name: MobiusDisk,
}


def load_disk_metric(locator: str) -> DiskMetric:
    """Return a metric from ``<name>`` or ``<name>:<file>``.

    Raises:
        ConfigurationError: If the name is not registered.
    """
    kind, _, path = locator.partition(":")
    if kind not in DISK_METRICS:
        raise ConfigurationError(
            f"unknown disk metric {kind!r}; choose one of {sorted(DISK_METRICS)}"
        )
    metric_class = DISK_METRICS[kind]
    return metric_class.from_file(path) if path else metric_class()
