"""Spectral mesh of the unit ball: Chebyshev radii by Gauss-Legendre spheres.

Radial derivatives use the Chebyshev differentiation matrix of the full diameter
[-1, 1] restricted to the positive nodes: the value at the negative node -r in
direction x is the value at r in direction -x, which the sphere grid holds
exactly because its colatitudes are symmetric and its longitude count is even.
No node sits at the centre.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from nullgeo.errors import ConfigurationError
from nullgeo.harmonic.metrics import DiskMetric
from nullgeo.sphere import SphereField, SphereGrid, SphereMetric

logger = logging.getLogger(__name__)


def chebyshev(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Return the Chebyshev extreme points cos(k pi / n) and their derivative matrix."""
    nodes = np.cos(np.pi * np.arange(order + 1) / order)
    scale = np.ones(order + 1)
    scale[[0, -1]] = 2.0
    scale *= (-1.0) ** np.arange(order + 1)
    difference = nodes[:, None] - nodes[None, :]
    matrix = np.outer(scale, 1.0 / scale) / (difference + np.eye(order + 1))
    matrix -= np.diag(np.sum(matrix, axis=1))
    return nodes, matrix


def clenshaw_curtis(order: int) -> np.ndarray:
    """Return the Clenshaw-Curtis weights on the Chebyshev extreme points."""
    angles = np.pi * np.arange(order + 1) / order
    weights = np.zeros(order + 1)
    inner = np.ones(order - 1)
    interior = angles[1:-1]
    if order % 2 == 0:
        weights[[0, -1]] = 1.0 / (order**2 - 1)
        for k in range(1, order // 2):
            inner -= 2.0 * np.cos(2 * k * interior) / (4 * k**2 - 1)
        inner -= np.cos(order * interior) / (order**2 - 1)
    else:
        weights[[0, -1]] = 1.0 / order**2
        for k in range(1, (order - 1) // 2 + 1):
            inner -= 2.0 * np.cos(2 * k * interior) / (4 * k**2 - 1)
    weights[1:-1] = 2.0 * inner / order
    return weights


class DiskMesh:
    """A metric on the unit ball sampled on a spectral mesh.

    Node arrays have shape (radial, theta, phi, ...). Radius index 0 is the
    boundary sphere. Vectors and tensors carry Cartesian coordinate components.
    """

    def __init__(
        self, metric: DiskMetric, radial: int = 16, band_limit: int = 8
    ) -> None:
        """Initialise the mesh.

        Args:
            metric (DiskMetric): The metric on the ball.
            radial (int): Number of positive Chebyshev radii, boundary included.
            band_limit (int): Band limit of the angular grid.

        Raises:
            ConfigurationError: If the resolution is too coarse.
            NumericalFailure: If the metric is not positive definite on the nodes.
        """
        if radial < 3:
            raise ConfigurationError(f"need at least 3 radial nodes, got {radial}")
        self.metric = metric
        self.radial = int(radial)
        self.sphere = SphereGrid(band_limit)

        order = 2 * self.radial - 1
        nodes, matrix = chebyshev(order)
        self.radii = nodes[: self.radial]
        self._direct = matrix[: self.radial, : self.radial]
        self._mirror = matrix[: self.radial, self.radial :][:, ::-1]
        second = matrix @ matrix
        self._second_direct = second[: self.radial, : self.radial]
        self._second_mirror = second[: self.radial, self.radial :][:, ::-1]
        self.radial_weights = clenshaw_curtis(order)[: self.radial] * self.radii**2

        n_phi = self.sphere.n_phi
        self._antipodal_phi = (np.arange(n_phi) + n_phi // 2) % n_phi
        self.points = self.radii[:, None, None, None] * self.sphere.normal[None]

        metric.check_positive(self.points)
        self.matrix = metric.metric(self.points)
        self.inverse = np.linalg.inv(self.matrix)
        self.density = np.sqrt(np.linalg.det(self.matrix))
        self.christoffel = metric.christoffel(self.points)
        logger.debug("built %s", self)

    def __repr__(self) -> str:
        """Return the metric and the resolution."""
        return (
            f"DiskMesh({self.metric.name}, radial={self.radial}, "
            f"band_limit={self.sphere.band_limit})"
        )

    @property
    def shape(self) -> tuple[int, int, int]:
        """Return the (radius, colatitude, longitude) node counts."""
        return (self.radial,) + self.sphere.shape

    @property
    def resolution(self) -> str:
        """Return the resolution as radial x band limit."""
        return f"{self.radial}x{self.sphere.band_limit}"

    def antipode(self, values: np.ndarray) -> np.ndarray:
        """Return the values at the antipodal nodes of every sphere."""
        return values[:, ::-1][:, :, self._antipodal_phi]

    def radial_derivative(self, values: np.ndarray) -> np.ndarray:
        """Return d/dr along the rays through the nodes."""
        return np.einsum("ij,j...->i...", self._direct, values) + np.einsum(
            "ij,j...->i...", self._mirror, self.antipode(values)
        )

    def gradient(self, values: np.ndarray) -> np.ndarray:
        """Return the Cartesian partial derivatives, derivative axis after the nodes.

        Input of shape (radial, theta, phi, ...) gives (radial, theta, phi, 3, ...).
        """
        values = np.asarray(values)
        extra = (1,) * (values.ndim - 3)
        normal = self.sphere.normal.reshape((1,) + self.sphere.shape + (3,) + extra)
        radii = self.radii.reshape((-1, 1, 1, 1) + extra)
        radial = np.expand_dims(self.radial_derivative(values), 3)
        angular = np.moveaxis(self.sphere.gradient(np.moveaxis(values, 0, 2)), 3, 0)
        return normal * radial + angular / radii

    def covariant_gradient(self, values: np.ndarray, rank: int) -> np.ndarray:
        """Return the Levi-Civita derivative of a covariant tensor, derivative first."""
        derivative = self.gradient(values)
        for position in range(rank):
            moved = np.moveaxis(values, 3 + position, -1)
            correction = np.einsum("xyzdab,xyz...d->xyzab...", self.christoffel, moved)
            derivative = derivative - np.moveaxis(correction, 4, 4 + position)
        return derivative

    def hessian(self, values: np.ndarray) -> np.ndarray:
        """Return the symmetrised second covariant derivative of a scalar."""
        second = self.covariant_gradient(self.gradient(values), 1)
        return 0.5 * (second + np.swapaxes(second, 3, 4))

    def squared_norm(self, values: np.ndarray, rank: int) -> np.ndarray:
        """Return g^{..} T_.. T_.. for a covariant tensor of the given rank."""
        raised = values
        for position in range(rank):
            moved = np.moveaxis(raised, 3 + position, -1)
            moved = np.einsum("xyzab,xyz...b->xyz...a", self.inverse, moved)
            raised = np.moveaxis(moved, -1, 3 + position)
        return np.sum(raised * values, axis=tuple(range(3, 3 + rank)))

    def laplacian(self, values: np.ndarray) -> np.ndarray:
        """Return the Laplace-Beltrami operator (1/sqrt g) d_i (sqrt g g^ij d_j f)."""
        gradient = self.gradient(values)
        flux = self.density[..., None] * np.einsum(
            "...ab,...b->...a", self.inverse, gradient
        )
        divergence = np.einsum("...aa->...", self.gradient(flux))
        return divergence / self.density

    @cached_property
    def volume_element(self) -> np.ndarray:
        """Return the quadrature weight of every node for integrals over (ball, g)."""
        return (
            self.radial_weights[:, None, None]
            * self.sphere.quadrature[None]
            * self.density
        )

    def integrate(self, values: np.ndarray) -> float:
        """Return the integral of a scalar over the ball."""
        return float(np.sum(self.volume_element * values))

    def project(self, values: np.ndarray) -> np.ndarray:
        """Return the band-limited part of every sphere of node values."""
        coefficients = self.sphere.analyse(np.moveaxis(values, 0, 2))
        return np.moveaxis(self.sphere.synthesise(coefficients).real, 2, 0)

    def harmonic_extension(self, boundary: np.ndarray) -> np.ndarray:
        """Return the flat harmonic extension sum c_lm r^l Y_lm of boundary values."""
        coefficients = self.sphere.analyse(boundary)
        powers = self.radii[None, None, :] ** self.sphere.degrees[..., None]
        samples = self.sphere.synthesise(coefficients[..., None] * powers).real
        return np.moveaxis(samples, 2, 0)

    @cached_property
    def _flat_blocks(self) -> np.ndarray:
        blocks = []
        scale = 2.0 / self.radii
        for degree in range(self.sphere.band_limit + 1):
            sign = (-1.0) ** degree
            first = self._direct + sign * self._mirror
            second = self._second_direct + sign * self._second_mirror
            operator = (
                second
                + scale[:, None] * first
                - np.diag(degree * (degree + 1) / self.radii**2)
            )
            blocks.append(np.linalg.inv(operator[1:, 1:]))
        return np.stack(blocks)

    def solve_flat(self, source: np.ndarray) -> np.ndarray:
        """Invert the flat Laplacian on interior values with zero boundary values."""
        coefficients = self.sphere.analyse(np.moveaxis(source, 0, 2))
        degree = self.sphere.degrees[:, 0]
        solved = np.einsum(
            "lij,lmj->lmi", self._flat_blocks[degree], coefficients
        )
        return np.moveaxis(self.sphere.synthesise(solved).real, 2, 0)

    @cached_property
    def lapse(self) -> np.ndarray:
        """Return |dr|_g at every node."""
        normal = self.sphere.normal
        return np.sqrt(np.einsum("...ab,...a,...b->...", self.inverse, normal, normal))

    @cached_property
    def conormal(self) -> np.ndarray:
        """Return the unit 1-form dr / |dr|_g at every node."""
        return self.sphere.normal[None] / self.lapse[..., None]

    @cached_property
    def normal(self) -> np.ndarray:
        """Return the outward unit normal vector N of the spheres r = const."""
        return np.einsum("...ab,...b->...a", self.inverse, self.conormal)

    def normal_derivative(self, values: np.ndarray) -> np.ndarray:
        """Return N(f) on the boundary sphere."""
        return np.einsum("...a,...a->...", self.normal[0], self.gradient(values)[0])

    @cached_property
    def boundary_metric(self) -> SphereMetric:
        """Return the metric induced on the boundary sphere."""
        projector = self.sphere.projector
        tangential = np.einsum(
            "...ab,...bc,...cd->...ad", projector, self.matrix[0], projector
        )
        return SphereMetric(self.sphere, tangential - projector)

    @cached_property
    def second_fundamental_form(self) -> SphereField:
        """Return theta_ab = g(D_a N, e_b) on the boundary sphere.

        With the conormal nu = n / lapse, d_a nu_b = P_ab / (r lapse) plus a multiple
        of n_b, so only the connection is needed once projected onto the sphere.
        """
        projector = self.sphere.projector
        connection = np.einsum(
            "...cab,...c->...ab", self.christoffel[0], self.conormal[0]
        )
        derivative = projector / self.lapse[0][..., None, None] - connection
        projected = self.sphere.project(derivative, 2)
        symmetric = 0.5 * (projected + np.swapaxes(projected, -1, -2))
        return SphereField(self.sphere, symmetric, 2, symmetric=True)

    @cached_property
    def boundary_deviation(self) -> float:
        """Return max |g_boundary - gamma| over the boundary nodes."""
        perturbation = self.boundary_metric.perturbation
        return float(np.sqrt(np.max(np.sum(perturbation**2, axis=(-2, -1)))))


@dataclass(frozen=True, eq=False)
class DiskField:
    """A scalar or covariant tensor field on a disk mesh.

    Attributes:
        mesh (DiskMesh): The mesh.
        values (np.ndarray): Node values of shape mesh.shape + (3,) * rank.
        rank (int): Tensor rank.
    """

    mesh: DiskMesh
    values: np.ndarray
    rank: int = 0

    def __post_init__(self) -> None:
        """Validate the shape."""
        expected = self.mesh.shape + (3,) * self.rank
        if self.values.shape != expected:
            raise ConfigurationError(
                f"disk field of shape {self.values.shape} does not match {expected}"
            )

    @property
    def boundary(self) -> np.ndarray:
        """Return the values on the boundary sphere."""
        return self.values[0]

    def gradient(self) -> "DiskField":
        """Return the covariant derivative, derivative index first."""
        values = self.mesh.covariant_gradient(self.values, self.rank)
        return DiskField(self.mesh, values, self.rank + 1)

    def squared_norm(self) -> np.ndarray:
        """Return the pointwise squared norm."""
        return self.mesh.squared_norm(self.values, self.rank)

    def integrate(self) -> float:
        """Return the integral of a scalar field over the ball."""
        if self.rank != 0:
            raise ConfigurationError(
                f"can only integrate scalars, got rank {self.rank}"
            )
        return self.mesh.integrate(self.values)
