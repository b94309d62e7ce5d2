"""Integration of the outgoing transport equations along a null cone.

On a geodesic foliation the nodes of the spheres S(u, ubar) are labelled so that
l transports the labels: along radial generators for spherically symmetric
backgrounds, along the generators of the axis light cones otherwise. Every node
then evolves by an ordinary differential equation in ubar. Tensors are pulled
back to the reference sphere of radius R; the Lie-dragged frame scales with R,
which adds -rank (dR/ds) / R to every rate, s = ubar / 2 being the affine
parameter of l.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from tqdm import tqdm

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.spacetime.adapters import MetricAdapter
from nullgeo.spacetime.cone import (
    CAUSTIC_THRESHOLD,
    ConeState,
    extract_cone_state,
    restrict,
)
from nullgeo.spacetime.differences import directional, fit_slope
from nullgeo.spacetime.frames import FrameCalculus, FrameSettings
from nullgeo.spacetime.optical import with_foliation
from nullgeo.sphere import SphereField, SphereMetric, compose, norm
from nullgeo.structure.reports import Operators

logger = logging.getLogger(__name__)

Variables = dict[str, np.ndarray]

# name -> rank of the evolved quantities
EVOLVED: dict[str, int] = {
    "metric": 2,
    "trchi": 0,
    "chih": 2,
    "zeta": 1,
    "trchib": 0,
    "chibh": 2,
    "omegab": 0,
}


@dataclass(frozen=True, eq=False)
class TransportResult:
    """Outcome of a cone integration.

    Attributes:
        state (ConeState): Evolved data on the final sphere.
        reference (ConeState): Data extracted from the spacetime on the same
            sphere.
        errors (dict[str, float]): Sup norm of evolved minus extracted data.
        steps (int): Number of RK4 steps taken.
    """

    state: ConeState
    reference: ConeState
    errors: dict[str, float]
    steps: int


class ConeTransport:
    """RK4 integrator of the outgoing null structure equations on one cone."""

    def __init__(
        self,
        adapter: MetricAdapter,
        u: float,
        band_limit: int = 8,
        settings: FrameSettings | None = None,
    ) -> None:
        """Initialise the integrator.

        Args:
            adapter (MetricAdapter): Spacetime; a native foliation that is not
                geodesic is replaced by the light cones of the time axis.
            u (float): Label of the cone.
            band_limit (int): Band limit of the sphere grids.
            settings (FrameSettings | None): Steps of the curvature extraction.

        Raises:
            ConfigurationError: If the base metric cannot carry geodesic cones.
        """
        self.adapter = with_foliation(adapter, "geodesic")
        self.u = u
        self.band_limit = band_limit
        self.calculus = FrameCalculus(self.adapter, settings)

    def radius(self, ubar: float) -> float:
        """Return the reference radius R of S(u, ubar)."""
        return self.adapter.sphere_position(self.u, ubar)[1]

    def radius_rate(self, ubar: float) -> float:
        """Return dR/ds = 2 dR/dubar."""
        step = 1e-3 * max(1.0, abs(ubar))

        def radius(labels: np.ndarray) -> np.ndarray:
            return np.asarray(self.radius(float(labels[0])))

        return 2.0 * float(directional(radius, np.array([ubar]), np.ones(1), step))

    def initial(self, ubar: float) -> tuple[ConeState, Variables]:
        """Return the extracted state on S(u, ubar) and its evolved variables."""
        state = extract_cone_state(
            self.adapter,
            self.u,
            ubar,
            self.band_limit,
            transverse=False,
            settings=self.calculus.settings,
        )
        variables = {
            name: state[name].values.copy() for name in EVOLVED if name != "metric"
        }
        variables["metric"] = state.metric.matrix.copy()
        return state, variables

    def rates(self, ubar: float, variables: Variables) -> Variables:
        """Return d/ds of the evolved variables on S(u, ubar)."""
        embedding = self.adapter.sphere_embedding(self.u, ubar, self.band_limit)
        grid = embedding.grid
        metric = SphereMetric(grid, variables["metric"] - grid.projector)
        op = Operators(metric)
        curvature = {
            name: restrict(grid, tensor, name, embedding.tangents)
            for name, tensor in self.calculus.curvature(embedding.points).items()
        }

        def field(name: str) -> SphereField:
            rank = EVOLVED[name]
            return SphereField(grid, variables[name], rank, rank == 2, rank == 2)

        trchi, trchib, omegab = field("trchi"), field("trchib"), field("omegab")
        chih, chibh, zeta = field("chih"), field("chibh"), field("zeta")
        g = SphereField(grid, metric.matrix, 2, symmetric=True)
        chi = chih + g * trchi * 0.5
        rho, beta, alpha = curvature["rho"], curvature["beta"], curvature["alpha"]
        zeta2 = op.square(zeta)

        def lie(tensor: SphereField) -> SphereField:
            if tensor.rank == 1:
                return op.contract(chi, tensor)
            product = compose(chi, tensor, metric).values
            return tensor.with_values(product + np.swapaxes(product, -1, -2))

        dragged = {
            "metric": 2.0 * chi,
            "trchi": -0.5 * trchi * trchi - op.square(chih),
            "chih": -(chih * trchi) - alpha + lie(chih),
            "zeta": -(zeta * trchi) - 2.0 * op.contract(chih, zeta) - beta + lie(zeta),
            "trchib": -0.5 * trchi * trchib
            - 2.0 * op.div(zeta)
            - op.dot(chih, chibh)
            + 2.0 * zeta2
            + 2.0 * rho,
            "chibh": -(chibh * trchi * 0.5)
            - op.sym_grad(zeta)
            - chih * trchib * 0.5
            + op.product(zeta, zeta)
            + lie(chibh),
            "omegab": 3.0 * zeta2 + rho,
        }
        stretch = self.radius_rate(ubar) / self.radius(ubar)
        return {
            name: grid.project(
                rate.values - EVOLVED[name] * stretch * variables[name], EVOLVED[name]
            )
            for name, rate in dragged.items()
        }

    def check_caustic(self, ubar: float, variables: Variables) -> None:
        """Raise if the expansion blows up or stops being finite.

        Raises:
            NumericalFailure: If r trchi leaves the admissible range.
        """
        if not all(np.all(np.isfinite(value)) for value in variables.values()):
            raise NumericalFailure(f"transport produced non-finite data at {ubar}")
        focusing = self.radius(ubar) * float(np.min(variables["trchi"]))
        if focusing < -CAUSTIC_THRESHOLD:
            raise NumericalFailure(
                f"caustic on the cone u = {self.u} at ubar = {ubar}: r trchi = "
                f"{focusing:.2f}"
            )

    def integrate(
        self, ubar_start: float, ubar_end: float, steps: int, progress: bool = False
    ) -> TransportResult:
        """Integrate from S(u, ubar_start) to S(u, ubar_end) with classic RK4.

        Args:
            ubar_start (float): Initial sphere label.
            ubar_end (float): Final sphere label.
            steps (int): Number of RK4 steps.
            progress (bool): Show a progress bar.

        Returns:
            TransportResult: Evolved and extracted data on the final sphere.

        Raises:
            ConfigurationError: If the interval or step count is invalid.
            NumericalFailure: If a caustic is met.
        """
        if steps < 1:
            raise ConfigurationError(f"steps must be positive, got {steps}")
        if not ubar_end > ubar_start:
            raise ConfigurationError(
                f"integration needs ubar_end > ubar_start, got {ubar_start}, "
                f"{ubar_end}"
            )
        _, variables = self.initial(ubar_start)
        width = (ubar_end - ubar_start) / steps
        # rates are per unit s = ubar / 2
        ds = 0.5 * width

        def shifted(base: Variables, rate: Variables, factor: float) -> Variables:
            return {name: base[name] + factor * rate[name] for name in base}

        ubar = ubar_start
        for _ in tqdm(range(steps), disable=not progress, desc="transport"):
            k1 = self.rates(ubar, variables)
            k2 = self.rates(ubar + 0.5 * width, shifted(variables, k1, 0.5 * ds))
            k3 = self.rates(ubar + 0.5 * width, shifted(variables, k2, 0.5 * ds))
            k4 = self.rates(ubar + width, shifted(variables, k3, ds))
            variables = {
                name: variables[name]
                + ds / 6.0 * (k1[name] + 2.0 * k2[name] + 2.0 * k3[name] + k4[name])
                for name in variables
            }
            ubar += width
            self.check_caustic(ubar, variables)

        reference, _ = self.initial(ubar_end)
        evolved = self._state(reference, variables)
        errors = {
            name: norm(evolved[name] - reference[name], reference.metric, "Linf")
            for name in EVOLVED
            if name != "metric"
        }
        errors["metric"] = float(
            np.max(np.abs(variables["metric"] - reference.metric.matrix))
        )
        logger.info(
            "transported %s cone u = %g from %g to %g in %d steps; trchi error %.3e",
            self.adapter.name,
            self.u,
            ubar_start,
            ubar_end,
            steps,
            errors["trchi"],
        )
        return TransportResult(evolved, reference, errors, steps)

    def _state(self, reference: ConeState, variables: Variables) -> ConeState:
        grid = reference.grid
        metric = SphereMetric(grid, variables["metric"] - grid.projector)
        fields = {
            name: SphereField(grid, variables[name], rank, rank == 2, rank == 2)
            for name, rank in EVOLVED.items()
            if name != "metric"
        }
        g = SphereField(grid, metric.matrix, 2, symmetric=True)
        fields["chi"] = fields["chih"] + g * fields["trchi"] * 0.5
        fields["chib"] = fields["chibh"] + g * fields["trchib"] * 0.5
        return ConeState(
            self.adapter,
            self.u,
            reference.ubar,
            metric,
            reference.points,
            fields,
            settings=self.calculus.settings,
            tangents=reference.tangents,
        )


def integrate_cone(
    adapter: MetricAdapter,
    u: float,
    ubar_start: float,
    ubar_end: float,
    *,
    steps: int = 32,
    band_limit: int = 8,
    settings: FrameSettings | None = None,
) -> TransportResult:
    """Integrate the outgoing transport equations and compare with extraction.

    Raises:
        ConfigurationError: If the interval or step count is invalid or the
            metric cannot carry geodesic cones.
        NumericalFailure: If a caustic is met.
    """
    transport = ConeTransport(adapter, u, band_limit, settings)
    return transport.integrate(ubar_start, ubar_end, steps)


def transport_convergence(
    adapter: MetricAdapter,
    u: float,
    ubar_start: float,
    ubar_end: float,
    step_counts: Sequence[int] = (8, 16, 32),
    component: str = "trchi",
    *,
    band_limit: int = 8,
) -> tuple[list[float], float]:
    """Return the errors of a component for several step counts and their order.

    The order is the negated log-log slope of error against step count.
    """
    if component not in EVOLVED:
        raise ConfigurationError(
            f"unknown evolved component {component!r}; choose from {list(EVOLVED)}"
        )
    errors = [
        integrate_cone(
            adapter, u, ubar_start, ubar_end, steps=count, band_limit=band_limit
        ).errors[component]
        for count in step_counts
    ]
    return errors, -fit_slope(step_counts, errors)
