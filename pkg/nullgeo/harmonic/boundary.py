"""Conformal parametrisation of a near-round boundary sphere by the unit sphere.

The boundary metric must already be conformal to the round metric in the mesh
angles, g_boundary = f^2 gamma. The identity is then a conformal map onto the
unit sphere, and composing it with a Mobius automorphism T_a centres it:
the boundary integrals of the three coordinates vanish. The conformal factor of
the centred map is phi = f |x - a|^2 / (1 - |a|^2).
"""

import logging
from dataclasses import dataclass
from typing import Final

import numpy as np

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.harmonic.mesh import DiskMesh
from nullgeo.spacetime.differences import jacobian
from nullgeo.sphere import SphereField, SphereMetric, laplacian
from nullgeo.structure.reports import ResidualReport, build_report

logger = logging.getLogger(__name__)

ROUNDNESS_LIMIT: Final = 0.05
CONFORMAL_TOLERANCE: Final = 1e-10
CENTRING_TOLERANCE: Final = 1e-12
CENTRING_ITERATIONS: Final = 30
CENTRING_STEP: Final = 1e-5


def mobius(centre: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Return T_a(x) = (1 - |a|^2)(x - a) / |x - a|^2 - a on the unit sphere.

    T_a is a conformal automorphism of the unit sphere for |a| < 1, with conformal
    factor (1 - |a|^2) / |x - a|^2. T_0 is the identity.
    """
    shift = points - centre
    distance = np.sum(shift**2, axis=-1, keepdims=True)
    return (1.0 - centre @ centre) * shift / distance - centre


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Centred conformal parametrisation of the boundary sphere.

    Attributes:
        metric (SphereMetric): Boundary metric.
        factor (SphereField): Conformal factor phi with g_boundary = phi^2 T_a* gamma.
        values (np.ndarray): The centred coordinates x^i, shape (3, theta, phi).
        centre (np.ndarray): The Mobius parameter a.
        iterations (int): Newton steps of the centring.
        centring_defect (float): max_i |integral of x^i| over the boundary.
    """

    metric: SphereMetric
    factor: SphereField
    values: np.ndarray
    centre: np.ndarray
    iterations: int
    centring_defect: float

    def sum_of_squares_report(self) -> ResidualReport:
        """Return the residual of sum_i (x^i)^2 = 1."""
        residual = np.sum(self.values**2, axis=0) - 1.0
        return build_report(
            "boundary_unit_sum", SphereField(self.metric.grid, residual), self.metric
        )

    def conformal_laplace_reports(self) -> list[ResidualReport]:
        """Return the residuals of lap x^i + 2 x^i = 2 x^i (1 - phi^-2)."""
        grid = self.metric.grid
        inverse_square = self.factor.values**-2
        reports = []
        for index, values in enumerate(self.values, start=1):
            coordinate = SphereField(grid, values)
            residual = (
                laplacian(coordinate, self.metric).values
                + 2.0 * values
                - 2.0 * values * (1.0 - inverse_square)
            )
            reports.append(
                build_report(
                    "conformal_laplace",
                    SphereField(grid, residual),
                    self.metric,
                    {"coordinate": index},
                )
            )
        return reports


def conformal_factor(metric: SphereMetric) -> np.ndarray:
    """Return f with g = f^2 gamma, rejecting boundaries that are not conformal.

    Raises:
        ConfigurationError: If the boundary is too far from round or has a
            trace-free part in the mesh angles.
    """
    perturbation = metric.perturbation
    deviation = float(np.sqrt(np.max(np.sum(perturbation**2, axis=(-2, -1)))))
    if deviation > ROUNDNESS_LIMIT:
        raise ConfigurationError(
            f"boundary is too far from round: |h| = {deviation:.3e} exceeds "
            f"{ROUNDNESS_LIMIT}"
        )
    trace = 0.5 * np.einsum("...aa->...", perturbation)
    shear = perturbation - trace[..., None, None] * metric.grid.projector
    if np.max(np.abs(shear)) > CONFORMAL_TOLERANCE:
        raise ConfigurationError(
            "boundary metric is not conformally round in the mesh angles: "
            f"trace-free part {np.max(np.abs(shear)):.3e}"
        )
    return np.sqrt(1.0 + trace)


def uniformise_boundary(mesh: DiskMesh) -> BoundaryData:
    """Return the centred conformal parametrisation of the boundary of a mesh.

    Raises:
        ConfigurationError: If the boundary is not near round.
        NumericalFailure: If the centring Newton iteration does not converge.
    """
    metric = mesh.boundary_metric
    grid = metric.grid
    raw = conformal_factor(metric)
    weights = metric.area_element
    area = float(np.sum(weights))
    normal = grid.normal

    def centring(centre: np.ndarray) -> np.ndarray:
        image = mobius(centre, normal)
        return np.einsum("jk,jka->a", weights, image) / area

    centre = np.zeros(3)
    iterations = 0
    defect = centring(centre)
    while np.max(np.abs(defect)) > CENTRING_TOLERANCE:
        if iterations == CENTRING_ITERATIONS:
            raise NumericalFailure(
                f"centring did not converge in {CENTRING_ITERATIONS} Newton steps: "
                f"defect {np.max(np.abs(defect)):.3e}"
            )
        matrix = jacobian(centring, centre, CENTRING_STEP).T
        centre = centre - np.linalg.solve(matrix, defect)
        if not np.linalg.norm(centre) < 1.0:
            raise NumericalFailure(
                f"centring left the unit ball at a = {centre}"
            )
        defect = centring(centre)
        iterations += 1

    values = np.moveaxis(mobius(centre, normal), -1, 0)
    distance = np.sum((normal - centre) ** 2, axis=-1)
    factor = raw * distance / (1.0 - centre @ centre)
    centring_defect = float(np.max(np.abs(defect)) * area)
    logger.info(
        "centred boundary of %s in %d steps: a = %s, defect %.3e",
        mesh,
        iterations,
        np.array2string(centre, precision=6),
        centring_defect,
    )
    return BoundaryData(
        metric, SphereField(grid, factor), values, centre, iterations, centring_defect
    )
