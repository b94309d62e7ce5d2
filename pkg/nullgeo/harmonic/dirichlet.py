"""Harmonic coordinates: the Dirichlet problem lap_g x^i = 0 with centred data.

The unknowns are the band-limited values on the interior spheres. The equation
is projected onto the band-limited functions and solved by GMRES with the exact
inverse of the flat Laplacian as preconditioner. A second-order finite-difference
solve of the radial equation is kept as an independent reference for centred
conformal bumps.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Final

import numpy as np
from scipy.linalg import solve_banded
from scipy.sparse.linalg import LinearOperator, gmres

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.harmonic.boundary import BoundaryData, uniformise_boundary
from nullgeo.harmonic.mesh import DiskField, DiskMesh
from nullgeo.harmonic.metrics import ConformalBump
from nullgeo.sphere import SphereField, laplacian
from nullgeo.structure.reports import ResidualReport, build_report

logger = logging.getLogger(__name__)

MAXIMUM_PRINCIPLE_SLACK: Final = 1e-8


@dataclass(frozen=True)
class DirichletSettings:
    """Solver settings for the harmonic coordinates.

    Attributes:
        tolerance (float): Bound on the 2-norm of the preconditioned residual,
            which is in the units of the solution.
        restart (int): GMRES restart length.
        max_cycles (int): Number of GMRES restart cycles.
        ricci_step (float): Step of the finite-difference Ricci tensor.
        curvature_limit (float): Largest accepted L2 norm of the Ricci tensor.
        workers (int): Threads solving the three coordinates.
    """

    tolerance: float = 1e-8
    restart: int = 60
    max_cycles: int = 20
    ricci_step: float = 1e-3
    curvature_limit: float = 50.0
    workers: int = 1

    def __post_init__(self) -> None:
        """Validate the settings."""
        if not 0.0 < self.tolerance < 1.0:
            raise ConfigurationError(
                f"tolerance must lie in (0, 1), got {self.tolerance}"
            )
        if self.restart < 1 or self.max_cycles < 1:
            raise ConfigurationError("restart and max_cycles must be positive")
        if not self.ricci_step > 0.0:
            raise ConfigurationError(
                f"ricci_step must be positive, got {self.ricci_step}"
            )
        if not self.curvature_limit > 0.0:
            raise ConfigurationError(
                f"curvature_limit must be positive, got {self.curvature_limit}"
            )
        if self.workers < 1:
            raise ConfigurationError(f"workers must be positive, got {self.workers}")


@dataclass(frozen=True, eq=False)
class HarmonicSolution:
    """Harmonic coordinates of a disk and the fields derived from them.

    Attributes:
        mesh (DiskMesh): The disk.
        boundary (BoundaryData): Centred boundary data.
        coordinates (tuple[DiskField, ...]): x^1, x^2, x^3.
        residuals (tuple[float, ...]): Preconditioned residual of every solve.
        iterations (tuple[int, ...]): GMRES inner iterations of every solve.
        settings (DirichletSettings): Solver settings.
    """

    mesh: DiskMesh
    boundary: BoundaryData
    coordinates: tuple[DiskField, ...]
    residuals: tuple[float, ...]
    iterations: tuple[int, ...]
    settings: DirichletSettings

    @cached_property
    def gradients(self) -> np.ndarray:
        """Return d x^i, shape (3, radial, theta, phi, 3)."""
        return np.stack([self.mesh.gradient(x.values) for x in self.coordinates])

    @cached_property
    def hessians(self) -> np.ndarray:
        """Return D^2 x^i, shape (3, radial, theta, phi, 3, 3)."""
        return np.stack([self.mesh.hessian(x.values) for x in self.coordinates])

    @cached_property
    def gram(self) -> np.ndarray:
        """Return G^ij = g(D x^i, D x^j), shape (radial, theta, phi, 3, 3)."""
        return np.einsum(
            "ixyza,xyzab,jxyzb->xyzij",
            self.gradients,
            self.mesh.inverse,
            self.gradients,
        )

    @property
    def gram_deviation(self) -> float:
        """Return max |G^ij - delta^ij| over the nodes."""
        return float(np.max(np.abs(self.gram - np.eye(3))))

    @cached_property
    def bochner_tensor(self) -> np.ndarray:
        """Return B = sum_i D x^i (x) D x^i - g."""
        return (
            np.einsum("ixyza,ixyzb->xyzab", self.gradients, self.gradients)
            - self.mesh.matrix
        )

    @cached_property
    def normal_derivatives(self) -> np.ndarray:
        """Return N(x^i) on the boundary, shape (3, theta, phi)."""
        return np.einsum("jka,ijka->ijk", self.mesh.normal[0], self.gradients[:, 0])

    @property
    def neumann_defect(self) -> np.ndarray:
        """Return N(x^i) - x^i on the boundary."""
        return self.normal_derivatives - self.boundary_values

    @property
    def boundary_values(self) -> np.ndarray:
        """Return x^i on the boundary, shape (3, theta, phi)."""
        return np.stack([x.boundary for x in self.coordinates])

    @property
    def max_modulus(self) -> float:
        """Return max_i max |x^i|."""
        return float(max(np.max(np.abs(x.values)) for x in self.coordinates))

    @property
    def satisfies_maximum_principle(self) -> bool:
        """Return whether every |x^i| <= 1 up to the slack."""
        return self.max_modulus <= 1.0 + MAXIMUM_PRINCIPLE_SLACK

    def boundary_laplace_reports(self) -> list[ResidualReport]:
        """Return the residuals of D_N D_N x + lap x + trtheta N(x) = 0."""
        metric = self.boundary.metric
        grid = metric.grid
        theta = self.mesh.second_fundamental_form.values
        mean = np.einsum("...ab,...ab->...", metric.inverse, theta)
        normal = self.mesh.normal[0]
        reports = []
        for index, values in enumerate(self.boundary_values):
            hessian = self.hessians[index, 0]
            transverse = np.einsum("...a,...ab,...b->...", normal, hessian, normal)
            tangential = laplacian(SphereField(grid, values), metric).values
            residual = (
                transverse + tangential + mean * self.normal_derivatives[index]
            )
            reports.append(
                build_report(
                    "boundary_laplace",
                    SphereField(grid, residual),
                    metric,
                    {"coordinate": index + 1, "resolution": self.mesh.resolution},
                )
            )
        return reports


def _solve_component(
    mesh: DiskMesh, boundary: np.ndarray, settings: DirichletSettings
) -> tuple[np.ndarray, float, int]:
    interior = (mesh.radial - 1,) + mesh.sphere.shape
    size = int(np.prod(interior))
    data = mesh.project(boundary[None])[0]
    initial = mesh.harmonic_extension(data)
    initial[0] = data

    def assemble(unknowns: np.ndarray) -> np.ndarray:
        values = np.zeros(mesh.shape)
        values[1:] = mesh.project(unknowns.reshape(interior))
        return values

    def precondition(residual: np.ndarray) -> np.ndarray:
        return mesh.solve_flat(residual.reshape(interior)).ravel()

    def apply(unknowns: np.ndarray) -> np.ndarray:
        return precondition(mesh.project(mesh.laplacian(assemble(unknowns))[1:]))

    operator = LinearOperator((size, size), matvec=apply, dtype=float)
    source = -precondition(mesh.project(mesh.laplacian(initial)[1:]))

    counter = {"inner": 0}

    def count(_: object) -> None:
        counter["inner"] += 1

    correction, info = gmres(
        operator,
        source,
        rtol=0.01 * settings.tolerance,
        atol=settings.tolerance,
        restart=settings.restart,
        maxiter=settings.max_cycles,
        callback=count,
        callback_type="pr_norm",
    )
    if not np.all(np.isfinite(correction)):
        raise NumericalFailure("Dirichlet solve produced non-finite values")
    residual = float(np.linalg.norm(source - apply(correction)))
    if residual > settings.tolerance:
        raise NumericalFailure(
            f"Dirichlet solve did not converge on {mesh}: preconditioned residual "
            f"{residual:.3e} after {counter['inner']} iterations (info {info})"
        )
    return initial + assemble(correction), residual, counter["inner"]


def ricci_norm(mesh: DiskMesh, step: float) -> float:
    """Return the L2 norm of the finite-difference Ricci tensor over the ball."""
    ricci = mesh.metric.ricci(mesh.points, step)
    return float(np.sqrt(mesh.integrate(mesh.squared_norm(ricci, 2))))


def solve_dirichlet(
    mesh: DiskMesh,
    boundary: BoundaryData | None = None,
    settings: DirichletSettings | None = None,
) -> HarmonicSolution:
    """Return the harmonic functions with the given boundary values.

    Args:
        mesh (DiskMesh): The disk.
        boundary (BoundaryData | None): Boundary data; the centred conformal
            parametrisation by default.
        settings (DirichletSettings | None): Solver settings.

    Raises:
        ConfigurationError: If the curvature exceeds the accepted limit.
        NumericalFailure: If GMRES does not reach the tolerance.
    """
    settings = settings or DirichletSettings()
    curvature = ricci_norm(mesh, settings.ricci_step)
    if curvature > settings.curvature_limit:
        raise ConfigurationError(
            f"curvature assumption fails on {mesh}: |Ric|_L2 = {curvature:.3e} "
            f"exceeds {settings.curvature_limit}"
        )
    if boundary is None:
        boundary = uniformise_boundary(mesh)

    def solve(values: np.ndarray) -> tuple[np.ndarray, float, int]:
        return _solve_component(mesh, values, settings)

    if settings.workers > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as pool:
            results = list(pool.map(solve, boundary.values))
    else:
        results = [solve(values) for values in boundary.values]

    solution = HarmonicSolution(
        mesh,
        boundary,
        tuple(DiskField(mesh, values) for values, _, _ in results),
        tuple(residual for _, residual, _ in results),
        tuple(count for _, _, count in results),
        settings,
    )
    logger.info(
        "solved harmonic coordinates on %s: residuals %s, iterations %s",
        mesh,
        [f"{value:.2e}" for value in solution.residuals],
        list(solution.iterations),
    )
    if not solution.satisfies_maximum_principle:
        logger.warning(
            "maximum principle violated on %s: max |x| = %.12f",
            mesh,
            solution.max_modulus,
        )
    return solution


def radial_reference(
    metric: ConformalBump, points: int = 4000
) -> tuple[np.ndarray, np.ndarray]:
    """Return r and R(r) with x^i = R(r) y^i / r harmonic for a centred bump.

    For g = w^4 delta the equation is div(w^2 grad x) = 0, which for x = R y / r
    reads R'' + (2 / r + (w^2)' / w^2) R' - 2 R / r^2 = 0 with R(0) = 0 and
    R(1) = 1. It is solved by second-order central differences on a uniform grid.

    Raises:
        ConfigurationError: If the bump is not centred or the grid is too small.
    """
    if points < 4:
        raise ConfigurationError(f"need at least 4 reference points, got {points}")
    step = 1.0 / points
    radii = np.linspace(0.0, 1.0, points + 1)
    inner = radii[1:-1]
    factor, slope = metric.radial_profile(inner)
    drift = 2.0 / inner + 2.0 * slope / factor
    lower = 1.0 / step**2 - drift / (2.0 * step)
    upper = 1.0 / step**2 + drift / (2.0 * step)
    diagonal = -2.0 / step**2 - 2.0 / inner**2

    banded = np.zeros((3, inner.size))
    banded[0, 1:] = upper[:-1]
    banded[1] = diagonal
    banded[2, :-1] = lower[1:]
    source = np.zeros(inner.size)
    source[-1] = -upper[-1]

    profile = np.zeros(points + 1)
    profile[1:-1] = solve_banded((1, 1), banded, source)
    profile[-1] = 1.0
    return radii, profile


def reference_solution(mesh: DiskMesh, points: int = 4000) -> np.ndarray:
    """Return the reference coordinates on the mesh nodes, shape (3,) + mesh.shape.

    Raises:
        ConfigurationError: If the mesh metric is not a centred conformal bump.
    """
    if not isinstance(mesh.metric, ConformalBump):
        raise ConfigurationError(
            f"no finite-difference reference for the {mesh.metric.name} metric"
        )
    radii, profile = radial_reference(mesh.metric, points)
    values = np.interp(mesh.radii, radii, profile)
    return np.moveaxis(
        values[:, None, None, None] * mesh.sphere.normal[None], -1, 0
    )
