"""Integral identities of harmonic coordinates and the global diffeomorphism scan.

Every side of every identity is assembled from its own quadrature, so the
mismatch measures discretisation error only. The refined identity is

    sum ||D^2 x^i||^2 + 2 sum oint (N(x^i) - x^i)^2
        = -3 sum int (Ric - R g / 3)(D x^i, D x^i) + G

where G collects the boundary terms of the second fundamental form theta, the
Neumann defect y^i = N(x^i) - x^i and the Einstein tensor E = Ric - R g / 2:

    G = sum oint [(theta - g)_ab x^i (D_a D_b x^i + 2 x^i g_ab)
                  - y^i (2 (lap x^i + 2 x^i) + (trtheta - 2)(N(x^i) + x^i))]
        - oint (trtheta - 2) + 1/2 oint (trtheta - 2)^2 - oint |theta_hat|^2
        + 2 sum oint E_NN x^i y^i - 2 sum int x^i E . D^2 x^i.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Final

import numpy as np
from scipy.spatial.distance import pdist

from nullgeo.harmonic.dirichlet import HarmonicSolution
from nullgeo.sphere import (
    SphereField,
    covariant_derivative,
    laplacian,
    norm,
    second_derivative,
)

logger = logging.getLogger(__name__)

GUARANTEED_SIZE: Final = 1e-2
CONTAINMENT_SLACK: Final = 1e-8


@dataclass(frozen=True)
class IdentityBalance:
    """Both sides of an integral identity and the terms of its right side.

    Attributes:
        name (str): Identity name.
        lhs (float): Left side.
        rhs (float): Right side, the sum of the terms.
        terms (dict[str, float]): Named contributions to the right side and, for
            the refined identity, to the left side.
    """

    name: str
    lhs: float
    rhs: float
    terms: dict[str, float] = field(default_factory=dict)

    @property
    def mismatch(self) -> float:
        """Return |lhs - rhs|."""
        return abs(self.lhs - self.rhs)

    def relative(self, floor: float = 0.0) -> float:
        """Return |lhs - rhs| / max(|lhs|, floor), or the mismatch if both vanish."""
        scale = max(abs(self.lhs), floor)
        return self.mismatch / scale if scale > 0.0 else self.mismatch

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-ready summary."""
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "mismatch": self.mismatch,
            "terms": dict(self.terms),
        }


@dataclass(frozen=True)
class BochnerCertificate:
    """The energy, Bochner and refined Bochner identities and the size estimates.

    Attributes:
        energy (IdentityBalance): int |D x|^2 = oint x N(x).
        bochner (IdentityBalance): ||D^2 x||^2 = -int Ric(D x, D x)
            + oint D^2 x(N, D x).
        refined (IdentityBalance): The refined identity.
        estimates (dict[str, float | None]): Measured sizes and ratios.
    """

    energy: IdentityBalance
    bochner: IdentityBalance
    refined: IdentityBalance
    estimates: dict[str, float | None]

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-ready summary."""
        return {
            "energy": self.energy.to_dict(),
            "bochner": self.bochner.to_dict(),
            "refined": self.refined.to_dict(),
            "estimates": dict(self.estimates),
        }


def _boundary_contract(
    inverse: np.ndarray, first: np.ndarray, second: np.ndarray
) -> np.ndarray:
    return np.einsum("...ac,...bd,...ab,...cd->...", inverse, inverse, first, second)


def bochner_certificate(solution: HarmonicSolution) -> BochnerCertificate:
    """Evaluate the energy, Bochner and refined Bochner identities.

    Args:
        solution (HarmonicSolution): Converged harmonic coordinates.

    Returns:
        BochnerCertificate: Both sides of each identity with their terms.
    """
    mesh = solution.mesh
    inverse = mesh.inverse
    ricci = mesh.metric.ricci(mesh.points, solution.settings.ricci_step)
    scalar = np.einsum("...ab,...ab->...", inverse, ricci)[..., None, None]
    traceless = ricci - scalar * mesh.matrix / 3.0
    einstein = ricci - 0.5 * scalar * mesh.matrix
    einstein_raised = np.einsum("...ac,...cd,...db->...ab", inverse, einstein, inverse)

    gradients = solution.gradients
    hessians = solution.hessians
    raised = np.einsum("xyzab,ixyzb->ixyza", inverse, gradients)
    coordinates = np.stack([x.values for x in solution.coordinates])

    metric = solution.boundary.metric
    grid = metric.grid

    def surface(values: np.ndarray) -> float:
        return float(np.sum(metric.area_element * values))

    normal = mesh.normal[0]
    x = solution.boundary_values
    n = solution.normal_derivatives
    defect = n - x

    energy = IdentityBalance(
        "energy",
        mesh.integrate(np.einsum("ixyza,ixyza->xyz", raised, gradients)),
        surface(np.sum(x * n, axis=0)),
    )

    hessian_total = mesh.integrate(sum(mesh.squared_norm(h, 2) for h in hessians))
    ricci_term = -mesh.integrate(
        np.einsum("xyzab,ixyza,ixyzb->xyz", ricci, raised, raised)
    )
    flux = np.einsum("jka,ijkab,ijkb->jk", normal, hessians[:, 0], raised[:, 0])
    bochner = IdentityBalance(
        "bochner",
        hessian_total,
        ricci_term + surface(flux),
        {"ricci": ricci_term, "flux": surface(flux)},
    )

    theta = mesh.second_fundamental_form.values
    induced = metric.matrix
    mean = np.einsum("...ab,...ab->...", metric.inverse, theta)
    shear = theta - 0.5 * mean[..., None, None] * induced
    tangential_hessian = np.stack(
        [second_derivative(SphereField(grid, values), metric).values for values in x]
    )
    tangential_laplacian = np.stack(
        [laplacian(SphereField(grid, values), metric).values for values in x]
    )
    shape = np.sum(
        x[..., None, None] * (tangential_hessian + 2.0 * x[..., None, None] * induced),
        axis=0,
    )
    coupling = defect * (
        2.0 * (tangential_laplacian + 2.0 * x) + (mean - 2.0) * (n + x)
    )
    einstein_normal = np.einsum("...a,...ab,...b->...", normal, einstein[0], normal)
    einstein_hessian = np.einsum("xyzab,ixyzab->ixyz", einstein_raised, hessians)

    traceless_density = np.einsum("xyzab,ixyza,ixyzb->xyz", traceless, raised, raised)

    neumann = surface(np.sum(defect**2, axis=0))
    terms = {
        "traceless_ricci": -3.0 * mesh.integrate(traceless_density),
        "shape": surface(_boundary_contract(metric.inverse, theta - induced, shape)),
        "neumann_coupling": -surface(np.sum(coupling, axis=0)),
        "mean_curvature_linear": -surface(mean - 2.0),
        "mean_curvature": 0.5 * surface((mean - 2.0) ** 2),
        "shear": -surface(_boundary_contract(metric.inverse, shear, shear)),
        "einstein_boundary": 2.0
        * surface(einstein_normal * np.sum(x * defect, axis=0)),
        "einstein_volume": -2.0
        * mesh.integrate(np.sum(coordinates * einstein_hessian, axis=0)),
    }
    refined = IdentityBalance(
        "refined_bochner",
        hessian_total + 2.0 * neumann,
        float(sum(terms.values())),
        {"hessian": hessian_total, "neumann": neumann, **terms},
    )

    estimates = _estimates(solution, ricci, theta - induced, hessian_total, neumann)
    logger.info(
        "Bochner certificate on %s: energy %.3e, bochner %.3e, refined %.3e",
        mesh,
        energy.mismatch,
        bochner.mismatch,
        refined.mismatch,
    )
    return BochnerCertificate(energy, bochner, refined, estimates)


def _estimates(
    solution: HarmonicSolution,
    ricci: np.ndarray,
    umbilic_defect: np.ndarray,
    hessian_total: float,
    neumann: float,
) -> dict[str, float | None]:
    mesh = solution.mesh
    metric = solution.boundary.metric
    grid = metric.grid
    factor = solution.boundary.factor
    third = sum(
        mesh.integrate(mesh.squared_norm(mesh.covariant_gradient(h, 2), 3))
        for h in solution.hessians
    )
    curvature = float(np.sqrt(mesh.integrate(mesh.squared_norm(ricci, 2))))
    shape = norm(SphereField(grid, umbilic_defect, 2), metric, "Hhalf")
    offset = factor - SphereField.constant(grid, 1.0)
    conformal = norm(offset, metric, "Hhalf") + norm(
        covariant_derivative(factor, metric), metric, "Hhalf"
    )
    size = mesh.metric.size
    data = curvature + shape + conformal + size
    return {
        "hessian_l2_squared": hessian_total,
        "neumann_l2_squared": neumann,
        "third_derivative_l2": float(np.sqrt(third)),
        "ricci_l2": curvature,
        "umbilic_hhalf": shape,
        "conformal_hhalf": conformal,
        "regularity_ratio": float(np.sqrt(third)) / data if data > 0.0 else None,
        "gram_max_dev": solution.gram_deviation,
        "gram_ratio": solution.gram_deviation / size if size > 0.0 else None,
    }


@dataclass(frozen=True)
class DiffeomorphismReport:
    """Scan of x = (x^1, x^2, x^3) as a map from the disk to the unit ball.

    Attributes:
        det_min (float): Smallest det(dx) in an orthonormal frame.
        det_max (float): Largest det(dx) in an orthonormal frame.
        max_modulus (float): Largest |x| over the nodes.
        separation (float): Smallest |x(p) - x(q)| / |p - q| over pairs of
            boundary nodes.
        guaranteed (bool): Whether the metric lies in the small-data regime.
    """

    det_min: float
    det_max: float
    max_modulus: float
    separation: float
    guaranteed: bool

    @property
    def contained(self) -> bool:
        """Return whether every node maps into the closed unit ball."""
        return self.max_modulus <= 1.0 + CONTAINMENT_SLACK

    @property
    def flagged(self) -> bool:
        """Return whether the scan found a fold, an escape or a collision."""
        return self.det_min <= 0.0 or not self.contained or self.separation <= 0.0

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-ready summary."""
        return {
            "det_min": self.det_min,
            "det_max": self.det_max,
            "max_modulus": self.max_modulus,
            "separation": self.separation,
            "guaranteed": self.guaranteed,
            "flagged": self.flagged,
        }


def diffeomorphism_check(solution: HarmonicSolution) -> DiffeomorphismReport:
    """Scan the Jacobian determinant, the image and the boundary map."""
    mesh = solution.mesh
    differential = np.moveaxis(solution.gradients, 0, -2)
    determinant = np.linalg.det(differential) / mesh.density
    image = np.moveaxis(np.stack([x.values for x in solution.coordinates]), 0, -1)
    modulus = float(np.max(np.linalg.norm(image, axis=-1)))
    sources = mesh.points[0].reshape(-1, 3)
    targets = image[0].reshape(-1, 3)
    separation = float(np.min(pdist(targets) / pdist(sources)))
    report = DiffeomorphismReport(
        float(np.min(determinant)),
        float(np.max(determinant)),
        modulus,
        separation,
        mesh.metric.size <= GUARANTEED_SIZE,
    )
    if report.flagged:
        logger.warning("harmonic map on %s is not a diffeomorphism: %s", mesh, report)
    return report
