import logging
from functools import cached_property

import numpy as np

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.sphere.grid import SphereGrid

logger = logging.getLogger(__name__)


class SphereMetric:
    """Riemannian metric g = r^2 (gamma + h) on a sphere grid.

    Components are stored in the ambient orthonormal frame of r^2 gamma, so the
    round metric is the tangential projector and h is a small symmetric tangent
    tensor field.
    """

    def __init__(
        self, grid: SphereGrid, perturbation: np.ndarray | None = None
    ) -> None:
        """Initialise the metric.

        Args:
            grid (SphereGrid): Grid carrying the reference round metric.
            perturbation (np.ndarray | None): Symmetric tangent tensor h of shape
                grid.shape + (3, 3). Defaults to zero.

        Raises:
            ConfigurationError: If the perturbation has the wrong shape.
            NumericalFailure: If the metric is not positive definite.
        """
        self.grid = grid
        if perturbation is None:
            self.perturbation = np.zeros(grid.shape + (3, 3))
            self.is_round = True
        else:
            perturbation = np.asarray(perturbation, dtype=float)
            if perturbation.shape != grid.shape + (3, 3):
                raise ConfigurationError(
                    f"perturbation shape {perturbation.shape} does not match grid "
                    f"{grid.shape + (3, 3)}"
                )
            symmetric = 0.5 * (perturbation + np.swapaxes(perturbation, -1, -2))
            perturbation = grid.project(symmetric, 2)
            self.perturbation = perturbation
            self.is_round = bool(np.all(perturbation == 0.0))

        x = grid.normal
        normal_block = np.einsum("...a,...b->...ab", x, x)
        self.matrix = grid.projector + self.perturbation
        full = self.matrix + normal_block

        eigenvalues = np.linalg.eigvalsh(full)
        if np.min(eigenvalues) <= 0.0:
            raise NumericalFailure(
                f"metric is not positive definite: smallest eigenvalue "
                f"{np.min(eigenvalues):.3e}"
            )

        self.inverse = np.linalg.inv(full) - normal_block
        self.jacobian = np.sqrt(np.prod(eigenvalues, axis=-1))
        self.area_form = self.jacobian[..., None, None] * grid.area_form

    @classmethod
    def round(cls, grid: SphereGrid) -> "SphereMetric":
        """Return the round metric of radius grid.radius."""
        return cls(grid)

    @classmethod
    def conformal(
        cls, grid: SphereGrid, factor: np.ndarray | float
    ) -> "SphereMetric":
        """Return the metric factor^2 r^2 gamma."""
        factor = np.broadcast_to(np.asarray(factor, dtype=float), grid.shape)
        perturbation = (factor**2 - 1.0)[..., None, None] * grid.projector
        return cls(grid, perturbation)

    @classmethod
    def from_scalar_perturbation(
        cls, grid: SphereGrid, values: np.ndarray
    ) -> "SphereMetric":
        """Return the metric r^2 (1 + values) gamma."""
        return cls(grid, np.asarray(values)[..., None, None] * grid.projector)

    @property
    def radius(self) -> float:
        """Return the reference radius of the underlying grid."""
        return self.grid.radius

    @cached_property
    def area_element(self) -> np.ndarray:
        """Return the quadrature weight of every node for integrals over (S, g)."""
        return self.grid.quadrature * self.jacobian * self.grid.radius**2

    @cached_property
    def area(self) -> float:
        """Return the total area of the sphere."""
        return float(np.sum(self.area_element))

    @cached_property
    def area_radius(self) -> float:
        """Return r with 4 pi r^2 equal to the area."""
        return float(np.sqrt(self.area / (4.0 * np.pi)))

    @cached_property
    def christoffel(self) -> np.ndarray:
        """Return C^c_ab, the difference to the round connection, as (c, a, b)."""
        if self.is_round:
            return np.zeros(self.grid.shape + (3, 3, 3))
        # dh[..., a, b, d] = round derivative along a of h_bd
        dh = self.grid.round_gradient(self.perturbation, 2)
        lowered = dh + np.swapaxes(dh, -3, -2) - np.moveaxis(dh, -3, -1)
        return 0.5 * np.einsum("...cd,...abd->...cab", self.inverse, lowered)

    @cached_property
    def ricci(self) -> np.ndarray:
        """Return the Ricci tensor of (S, g)."""
        grid = self.grid
        background = grid.projector / grid.radius**2
        if self.is_round:
            return background
        connection = self.christoffel
        derivative = grid.round_gradient(connection, 3)
        return (
            background
            + np.einsum("...aadb->...db", derivative)
            - np.einsum("...daab->...db", derivative)
            + np.einsum("...aae,...edb->...db", connection, connection)
            - np.einsum("...ade,...eab->...db", connection, connection)
        )

    @cached_property
    def gauss_curvature(self) -> np.ndarray:
        """Return the Gauss curvature K at every node."""
        return 0.5 * np.einsum("...bd,...bd->...", self.inverse, self.ricci)

    def gauss_bonnet_defect(self) -> float:
        """Return the deviation of the integrated Gauss curvature from 4 pi."""
        return float(np.sum(self.gauss_curvature * self.area_element) - 4.0 * np.pi)
