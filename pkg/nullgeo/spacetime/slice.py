"""Geometry of a spacelike slice sampled on a sphere lying in it."""

import logging
from dataclasses import dataclass

import numpy as np

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.spacetime.adapters import MetricAdapter
from nullgeo.spacetime.cone import restrict
from nullgeo.spacetime.curvature import christoffel, left_dual, volume_form
from nullgeo.spacetime.differences import directional, jacobian
from nullgeo.spacetime.frames import FrameCalculus, FrameSettings, project
from nullgeo.spacetime.oracle import fd_oracle
from nullgeo.sphere import SphereField, SphereGrid

logger = logging.getLogger(__name__)

MAXIMAL_TOLERANCE = 1e-6
SLICE_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Decomposition of k on a sphere lying in the slice.

    Attributes:
        nu (SphereField): Slope with T = 1/2 (nu^-1 lbar + nu l).
        delta (SphereField): k(N, N).
        epsilon (SphereField): k(N, e_a).
        kappa (SphereField): k(e_a, e_b).
        d3_log_nu (SphereField): D_3 log nu.
        d4_log_nu (SphereField): D_4 log nu.
    """

    nu: SphereField
    delta: SphereField
    epsilon: SphereField
    kappa: SphereField
    d3_log_nu: SphereField
    d4_log_nu: SphereField


@dataclass(frozen=True, eq=False)
class SliceState:
    """Fundamental forms and curvature of a slice at the nodes of a sphere.

    Slice tensors are (..., 3, 3) arrays in the spatial coordinates of the
    adapter.

    Attributes:
        adapter (MetricAdapter): Source spacetime.
        level (float): Value of the time function on the slice.
        grid (SphereGrid): Sphere grid of the sample.
        metric (np.ndarray): Induced metric g_ij.
        lapse (SphereField): Time lapse n.
        second_form (np.ndarray): Second fundamental form k_ij.
        electric (np.ndarray): E_ij = R(T, i, T, j).
        magnetic (np.ndarray): H_ij = *R(T, i, T, j).
        residuals (dict[str, np.ndarray]): Gauss, div k, curl k - H, tr k and
            the lapse equation.
        boundary (BoundaryData): Decomposition on the sphere.
        maximal (bool): Whether tr k = 0 was requested and verified.
    """

    adapter: MetricAdapter
    level: float
    grid: SphereGrid
    metric: np.ndarray
    lapse: SphereField
    second_form: np.ndarray
    electric: np.ndarray
    magnetic: np.ndarray
    residuals: dict[str, np.ndarray]
    boundary: BoundaryData
    maximal: bool = False

    def residual_norm(self, name: str) -> float:
        """Return the largest component of a residual.

        Raises:
            ConfigurationError: If the residual is unknown.
        """
        if name not in self.residuals:
            raise ConfigurationError(
                f"unknown slice residual {name!r}; known: {sorted(self.residuals)}"
            )
        return float(np.max(np.abs(self.residuals[name])))


class SliceGeometry:
    """Embedding x -> (t(x), x) of a level set of the adapter's time function."""

    def __init__(
        self, adapter: MetricAdapter, level: float, settings: FrameSettings
    ) -> None:
        """Initialise the slice geometry.

        Args:
            adapter (MetricAdapter): Source spacetime.
            level (float): Level of the time function.
            settings (FrameSettings): Finite-difference steps.
        """
        self.adapter = adapter
        self.level = level
        self.settings = settings

    def step(self, spatial: np.ndarray, transverse: bool = False) -> np.ndarray:
        """Return the per-point step for spatial differences."""
        base = self.settings.transverse_step if transverse else self.settings.step
        return base * np.maximum(np.linalg.norm(spatial, axis=-1), 1.0)

    def embed(self, spatial: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return the spacetime points and the tangent vectors d_i X (..., 3, 4)."""
        time, gradient = self.adapter.slice_time(self.level, spatial)
        points = np.concatenate([time[..., None], spatial], axis=-1)
        tangents = np.concatenate(
            [gradient[..., None], np.broadcast_to(np.eye(3), gradient.shape + (3,))],
            axis=-1,
        )
        return points, tangents

    def normal(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return the lapse n and the lowered unit normal T = -n dT.

        Raises:
            NumericalFailure: If the slice is not spacelike.
        """
        _, differential = self.adapter.time_function(points)
        inverse = self.adapter.inverse_metric(points)
        norm = np.einsum("...mn,...m,...n->...", inverse, differential, differential)
        if np.any(norm >= 0.0):
            raise NumericalFailure(
                f"slice at level {self.level} of {self.adapter.name} is not spacelike"
            )
        lapse = 1.0 / np.sqrt(-norm)
        return lapse, -lapse[..., None] * differential

    def normal_form(self, points: np.ndarray) -> np.ndarray:
        """Return the lowered unit normal."""
        return self.normal(points)[1]

    def spacetime_second_form(self, points: np.ndarray) -> np.ndarray:
        """Return k_mn = -h h D T as a spacetime tensor."""
        form = self.normal_form(points)
        inverse = self.adapter.inverse_metric(points)
        vector = np.einsum("...mn,...n->...m", inverse, form)
        gamma = self.adapter.christoffel(points)
        scale = np.maximum(np.linalg.norm(points[..., 1:], axis=-1), 1.0)
        partial = jacobian(self.normal_form, points, self.settings.step * scale)
        derivative = partial - np.einsum("...dab,...d->...ab", gamma, form)
        tangential = np.eye(4) + np.einsum("...a,...m->...am", vector, form)
        return -np.einsum(
            "...am,...bn,...ab->...mn", tangential, tangential, derivative
        )

    def pull_back(self, tangents: np.ndarray, tensor: np.ndarray) -> np.ndarray:
        """Return the slice components of a covariant spacetime 2-tensor."""
        return np.einsum("...im,...jn,...mn->...ij", tangents, tangents, tensor)

    def metric(self, spatial: np.ndarray) -> np.ndarray:
        """Return the induced metric g_ij."""
        points, tangents = self.embed(spatial)
        return self.pull_back(tangents, self.adapter.metric(points))

    def second_form(self, spatial: np.ndarray) -> np.ndarray:
        """Return k_ij."""
        points, tangents = self.embed(spatial)
        return self.pull_back(tangents, self.spacetime_second_form(points))

    def lapse(self, spatial: np.ndarray) -> np.ndarray:
        """Return n on the slice."""
        points, _ = self.embed(spatial)
        return self.normal(points)[0]

    def christoffel(self, spatial: np.ndarray) -> np.ndarray:
        """Return the connection of g_ij."""
        derivative = jacobian(self.metric, spatial, self.step(spatial))
        return christoffel(np.linalg.inv(self.metric(spatial)), derivative)

    def volume(self, spatial: np.ndarray) -> np.ndarray:
        """Return eps_ijk = e(T, d_i X, d_j X, d_k X)."""
        points, tangents = self.embed(spatial)
        form = self.normal_form(points)
        vector = np.einsum(
            "...mn,...n->...m", self.adapter.inverse_metric(points), form
        )
        return np.einsum(
            "...abcd,...a,...ib,...jc,...kd->...ijk",
            volume_form(self.adapter.metric(points)),
            vector,
            tangents,
            tangents,
            tangents,
        )


def _residuals(
    geometry: SliceGeometry,
    spatial: np.ndarray,
    electric: np.ndarray,
    magnetic: np.ndarray,
) -> dict[str, np.ndarray]:
    metric = geometry.metric(spatial)
    inverse = np.linalg.inv(metric)
    gamma = geometry.christoffel(spatial)
    second = geometry.second_form(spatial)
    step = geometry.step(spatial, transverse=True)

    # D_a k_bc with the derivative index first
    derivative = jacobian(geometry.second_form, spatial, step)
    derivative = (
        derivative
        - np.einsum("...dab,...dc->...abc", gamma, second)
        - np.einsum("...dac,...bd->...abc", gamma, second)
    )
    divergence = np.einsum("...ab,...abc->...c", inverse, derivative)

    volume = geometry.volume(spatial)
    raised = np.einsum("...iab,...ap,...bq->...ipq", volume, inverse, inverse)
    rotation = np.einsum("...ipq,...pqj->...ij", raised, derivative)
    curl = 0.5 * (rotation + np.swapaxes(rotation, -1, -2))

    ricci = fd_oracle(geometry.metric, spatial, "Ricci")
    square = np.einsum("...ia,...ab,...bj->...ij", second, inverse, second)

    lapse = geometry.lapse(spatial)
    gradient = jacobian(geometry.lapse, spatial, step)

    def lapse_gradient(shifted: np.ndarray) -> np.ndarray:
        return jacobian(geometry.lapse, shifted, geometry.step(shifted))

    hessian = jacobian(lapse_gradient, spatial, step) - np.einsum(
        "...dab,...d->...ab", gamma, gradient
    )
    laplacian = np.einsum("...ab,...ab->...", inverse, hessian)
    norm_k = np.einsum("...ab,...ia,...jb,...ij->...", second, inverse, inverse, second)

    return {
        "gauss": ricci - electric - square,
        "divergence": divergence,
        "curl": curl - magnetic,
        "trace": np.einsum("...ij,...ij->...", inverse, second),
        "lapse": laplacian - lapse * norm_k,
    }


def extract_slice_state(
    adapter: MetricAdapter,
    u: float,
    ubar: float,
    band_limit: int = 12,
    *,
    maximal: bool = False,
    settings: FrameSettings | None = None,
) -> SliceState:
    """Extract the slice through S(u, ubar) of the adapter's time function.

    Args:
        adapter (MetricAdapter): Source spacetime.
        u (float): Outgoing label of the sampled sphere.
        ubar (float): Incoming label of the sampled sphere.
        band_limit (int): Band limit of the sphere grid.
        maximal (bool): Require tr k = 0.
        settings (FrameSettings | None): Finite-difference steps.

    Returns:
        SliceState: Slice geometry at the sphere nodes.

    Raises:
        ConfigurationError: If the sphere does not lie in one slice, or the slice
            is not maximal although requested.
        NumericalFailure: If the slice is not spacelike.
    """
    calculus = FrameCalculus(adapter, settings)
    embedding = adapter.sphere_embedding(u, ubar, band_limit)
    if not embedding.coordinate:
        raise ConfigurationError(
            f"slices are sampled on coordinate spheres; {adapter!r} does not label "
            f"its spheres by coordinate radius"
        )
    grid, points = embedding.grid, embedding.points
    levels, _ = adapter.time_function(points)
    level = float(np.mean(levels))
    if np.max(np.abs(levels - level)) > SLICE_TOLERANCE * max(1.0, abs(level)):
        raise ConfigurationError(
            f"sphere S({u}, {ubar}) does not lie in a level set of the time function"
        )

    geometry = SliceGeometry(adapter, level, calculus.settings)
    spatial = points[..., 1:]
    points, tangents = geometry.embed(spatial)
    lapse, form = geometry.normal(points)
    vector = np.einsum("...mn,...n->...m", adapter.inverse_metric(points), form)

    scale = calculus.scale(points)
    riemann = adapter.riemann(points, calculus.settings.step * scale)
    dual = left_dual(adapter.metric(points), riemann)
    pinch = "...ambn,...a,...b,...im,...jn->...ij"
    electric = np.einsum(pinch, riemann, vector, vector, tangents, tangents)
    magnetic = np.einsum(pinch, dual, vector, vector, tangents, tangents)
    second_form = geometry.spacetime_second_form(points)
    residuals = _residuals(geometry, spatial, electric, magnetic)

    trace = float(np.max(np.abs(residuals["trace"])))
    if maximal and trace > MAXIMAL_TOLERANCE:
        raise ConfigurationError(
            f"slice of {adapter.name} at level {level} is not maximal: "
            f"|tr k| = {trace:.3e}"
        )

    boundary = _boundary(calculus, geometry, grid, points, second_form)
    logger.info(
        "extracted slice of %s at level %g; gauss residual %.3e",
        adapter.name,
        level,
        float(np.max(np.abs(residuals["gauss"]))),
    )
    return SliceState(
        adapter,
        level,
        grid,
        geometry.pull_back(tangents, adapter.metric(points)),
        SphereField(grid, lapse),
        geometry.pull_back(tangents, second_form),
        electric,
        magnetic,
        residuals,
        boundary,
        maximal,
    )


def _boundary(
    calculus: FrameCalculus,
    geometry: SliceGeometry,
    grid: SphereGrid,
    points: np.ndarray,
    second_form: np.ndarray,
) -> BoundaryData:
    pair = calculus.null_pair(points)

    def log_slope(shifted: np.ndarray) -> np.ndarray:
        form = geometry.normal_form(shifted)
        outgoing = calculus.null_pair(shifted).l
        return np.log(-1.0 / np.einsum("...m,...m->...", form, outgoing))

    nu = np.exp(log_slope(points))
    normal = 0.5 * (-pair.lb / nu[..., None] + nu[..., None] * pair.l)
    step = calculus.settings.transverse_step * calculus.scale(points)
    contracted = np.einsum("...mn,...n->...m", second_form, normal)
    return BoundaryData(
        nu=SphereField(grid, nu),
        delta=SphereField(grid, np.einsum("...m,...m->...", contracted, normal)),
        epsilon=restrict(grid, project(pair.projector, contracted, 1), "epsilon"),
        kappa=restrict(grid, project(pair.projector, second_form, 2), "kappa"),
        d3_log_nu=SphereField(grid, directional(log_slope, points, pair.lb, step)),
        d4_log_nu=SphereField(grid, directional(log_slope, points, pair.l, step)),
    )
