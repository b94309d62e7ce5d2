"""Snapshots of the null geometry of a sphere S(u, ubar) as sphere fields."""

import logging
from dataclasses import dataclass, field

import numpy as np

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.spacetime.adapters import MetricAdapter, SphereEmbedding
from nullgeo.spacetime.frames import (
    COMPONENTS,
    FrameCalculus,
    FrameSettings,
    Transverse,
    project,
)
from nullgeo.spacetime.optical import Foliation, with_foliation
from nullgeo.sphere import SphereField, SphereGrid, SphereMetric

logger = logging.getLogger(__name__)

CAUSTIC_THRESHOLD = 50.0


def restrict(
    grid: SphereGrid,
    values: np.ndarray,
    name: str,
    tangents: np.ndarray | None = None,
) -> SphereField:
    """Pull a horizontal spacetime tensor back to the reference sphere.

    ``tangents`` (..., 3, 4) pushes the ambient tangent vectors of the grid into
    spacetime. Without it the sphere is a coordinate sphere, whose tangent
    vectors have vanishing time component.
    """
    rank, symmetric, traceless = COMPONENTS.get(name, (values.ndim - 2, False, False))
    if tangents is None:
        pulled = values[(Ellipsis,) + (slice(1, None),) * rank]
    elif rank == 0:
        pulled = values
    elif rank == 1:
        pulled = np.einsum("...am,...m->...a", tangents, values)
    elif rank == 2:
        pulled = np.einsum("...am,...bn,...mn->...ab", tangents, tangents, values)
    else:
        raise ConfigurationError(f"cannot restrict {name!r} of rank {rank}")
    return SphereField(grid, grid.project(pulled, rank), rank, symmetric, traceless)


def sphere_points(
    adapter: MetricAdapter, u: float, ubar: float, band_limit: int
) -> tuple[SphereGrid, np.ndarray]:
    """Return the grid of S(u, ubar) and its spacetime points (..., 4)."""
    embedding = adapter.sphere_embedding(u, ubar, band_limit)
    return embedding.grid, embedding.points


def induced_metric(
    grid: SphereGrid, metric: np.ndarray, tangents: np.ndarray | None = None
) -> SphereMetric:
    """Return the sphere metric from spacetime metric values on the nodes."""
    tangential = restrict(grid, metric, "metric", tangents).values
    return SphereMetric(grid, tangential - grid.projector)


@dataclass(frozen=True, eq=False)
class ConeState:
    """Connection coefficients and curvature components on a sphere S(u, ubar).

    Attributes:
        adapter (MetricAdapter): Source spacetime with the foliation used.
        u (float): Outgoing foliation label.
        ubar (float): Incoming foliation label.
        metric (SphereMetric): Induced sphere metric.
        points (np.ndarray): Spacetime points of the nodes.
        fields (dict[str, SphereField]): Frame components, the shift b and the
            null lapse.
        transverse (dict[str, dict[str, SphereField]]): nabla_3 and nabla_4 of the
            frame components, keyed by "3" and "4".
        lie (dict[str, SphereField]): Projected Lie derivatives of the sphere
            metric along lbar ("3") and l ("4").
        settings (FrameSettings): Steps used for the extraction.
        tangents (np.ndarray | None): Push-forward of the reference tangent
            vectors; None for coordinate spheres.
    """

    adapter: MetricAdapter
    u: float
    ubar: float
    metric: SphereMetric
    points: np.ndarray
    fields: dict[str, SphereField]
    transverse: dict[str, dict[str, SphereField]] = field(default_factory=dict)
    lie: dict[str, SphereField] = field(default_factory=dict)
    settings: FrameSettings = field(default_factory=FrameSettings)
    tangents: np.ndarray | None = None

    @property
    def grid(self) -> SphereGrid:
        """Return the sphere grid."""
        return self.metric.grid

    @property
    def radius(self) -> float:
        """Return the area radius."""
        return self.metric.area_radius

    @property
    def calculus(self) -> FrameCalculus:
        """Return a frame calculus with the extraction settings."""
        return FrameCalculus(self.adapter, self.settings)

    def restrict(self, values: np.ndarray, name: str) -> SphereField:
        """Pull spacetime tensor values on the nodes back to this sphere."""
        return restrict(self.grid, values, name, self.tangents)

    def __getitem__(self, name: str) -> SphereField:
        """Return a frame component by name.

        Raises:
            ConfigurationError: If the component is unknown.
        """
        if name not in self.fields:
            raise ConfigurationError(
                f"cone state has no component {name!r}; known: {sorted(self.fields)}"
            )
        return self.fields[name]

    def nabla(self, which: Transverse, name: str) -> SphereField:
        """Return nabla_3 or nabla_4 of a component.

        Raises:
            ConfigurationError: If transverse data was not extracted.
        """
        if which not in self.transverse or name not in self.transverse[which]:
            raise ConfigurationError(
                f"cone state carries no nabla_{which} {name}; extract it with "
                f"transverse=True"
            )
        return self.transverse[which][name]


def _shift(calculus: FrameCalculus, embedding: SphereEmbedding) -> np.ndarray:
    """Return b, the horizontal part of d/du of the nodes at fixed ubar."""
    pair = calculus.null_pair(embedding.points)
    lowered = np.einsum("...mn,...n->...m", pair.metric, embedding.velocity)
    return project(pair.projector, lowered, 1)


def extract_cone_state(
    adapter: MetricAdapter,
    u: float,
    ubar: float,
    band_limit: int = 16,
    *,
    transverse: bool = True,
    settings: FrameSettings | None = None,
    foliation: Foliation = "native",
) -> ConeState:
    """Extract the null decomposition of the adapter on the sphere S(u, ubar).

    Args:
        adapter (MetricAdapter): Spacetime and its double foliation.
        u (float): Outgoing foliation label.
        ubar (float): Incoming foliation label.
        band_limit (int): Band limit of the sphere grid.
        transverse (bool): Also compute nabla_3, nabla_4 and the Lie derivatives
            of the sphere metric.
        settings (FrameSettings | None): Finite-difference steps.
        foliation (Foliation): "native" uses the adapter's foliation functions;
            "geodesic" labels spheres by the light cones of the time axis and
            their affine parameters.

    Returns:
        ConeState: The snapshot.

    Raises:
        ConfigurationError: If the foliation is unknown.
        NumericalFailure: If the frame is degenerate or a caustic is detected.
    """
    adapter = with_foliation(adapter, foliation)
    calculus = FrameCalculus(adapter, settings)
    embedding = adapter.sphere_embedding(u, ubar, band_limit)
    grid, points, tangents = embedding.grid, embedding.points, embedding.tangents
    adapter.check_signature(points)
    pair = calculus.null_pair(points)
    pair.check()

    metric = induced_metric(grid, pair.metric, tangents)
    if not metric.area_radius > 0.0:
        raise NumericalFailure(f"sphere S({u}, {ubar}) is degenerate")

    values = calculus.components(points)
    fields = {
        name: restrict(grid, tensor, name, tangents) for name, tensor in values.items()
    }
    fields["b"] = restrict(grid, _shift(calculus, embedding), "b", tangents)
    fields["lapse"] = SphereField(grid, pair.lapse)

    defocusing = metric.area_radius * float(np.max(np.abs(values["trchib"])))
    if defocusing > CAUSTIC_THRESHOLD:
        raise NumericalFailure(
            f"caustic at S({u}, {ubar}): r |trchib| = {defocusing:.2f} exceeds "
            f"{CAUSTIC_THRESHOLD}"
        )

    derived: dict[str, dict[str, SphereField]] = {}
    lie: dict[str, SphereField] = {}
    if transverse:
        for which in ("3", "4"):
            raw = calculus.transverse(points, which)
            derived[which] = {
                name: restrict(grid, tensor, name, tangents)
                for name, tensor in raw.items()
            }
            lie[which] = restrict(
                grid, calculus.lie_derivative_metric(points, which), "chi", tangents
            )
    logger.info(
        "extracted cone state of %s at (u, ubar) = (%g, %g), r = %.6g, L = %d",
        adapter.name,
        u,
        ubar,
        metric.area_radius,
        band_limit,
    )
    return ConeState(
        adapter,
        u,
        ubar,
        metric,
        points,
        fields,
        derived,
        lie,
        calculus.settings,
        tangents,
    )
