"""Bel-Robinson fluxes through spheres and incoming cones, and sphere charges."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any, Final

import numpy as np
from scipy import integrate as quadrature
from tqdm import tqdm

from nullgeo.energy.bel_robinson import (
    NullVector,
    bel_robinson_contract,
    expansion_weights,
    multiplier,
    null_expansion,
)
from nullgeo.energy.currents import modified_lie_derivative
from nullgeo.energy.deformation import vector_field
from nullgeo.energy.rotations import RotationFields
from nullgeo.energy.weyl import WeylField, weyl_field
from nullgeo.errors import ConfigurationError
from nullgeo.spacetime.adapters import MetricAdapter
from nullgeo.spacetime.cone import ConeState, extract_cone_state
from nullgeo.spacetime.frames import FrameSettings
from nullgeo.sphere import (
    SphereField,
    SphereMetric,
    dot,
    integrate,
    pointwise_norm_squared,
)
from nullgeo.structure.reports import ResidualReport, build_report

logger = logging.getLogger(__name__)

# null block k (number of l slots) -> component
BLOCKS: Final = {4: "alpha", 3: "beta", 2: "rho_sigma", 1: "betab", 0: "alphab"}


@dataclass(frozen=True)
class FluxReport:
    """Flux of Q(W)(X1, X2, X3, X4) through one sphere.

    Attributes:
        flux (float): Integral of the null-expansion contraction.
        index_flux (float): Integral of the full index contraction.
        terms (dict[str, float]): Integrals of the weighted null blocks, keyed by
            the component squared in each; they sum to the flux.
        parameters (dict[str, Any]): Sphere labels, radius and multipliers.
    """

    flux: float
    index_flux: float
    terms: dict[str, float]
    parameters: dict[str, Any] = field(default_factory=dict)

    @property
    def defect(self) -> float:
        """Return the disagreement of the two contractions, relative to the flux."""
        scale = abs(self.flux) or 1.0
        return abs(self.flux - self.index_flux) / scale

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-serialisable summary."""
        return {
            "flux": self.flux,
            "index_flux": self.index_flux,
            "terms": dict(self.terms),
            "parameters": dict(self.parameters),
        }


def _vectors(
    names: Sequence[str], u: float, ubar: float
) -> tuple[list[str], list[NullVector]]:
    names = list(names)
    if len(names) == 3:
        names.append("lb")
    if len(names) != 4:
        raise ConfigurationError(
            f"flux needs three multipliers and a transversal, got {names}"
        )
    return names, [multiplier(name, u, ubar) for name in names]


def _integral(values: SphereField, metric: SphereMetric) -> float:
    return float(np.real(integrate(values, metric)))


def _check_domain(weyl: WeylField, metric: SphereMetric) -> None:
    if weyl.pair.metric.shape[:-2] != metric.grid.shape:
        raise ConfigurationError(
            f"Weyl field of batch {weyl.pair.metric.shape[:-2]} is not sampled on "
            f"{metric.grid}"
        )


def energy_flux(
    weyl: WeylField,
    metric: SphereMetric,
    u: float,
    ubar: float,
    multipliers: Sequence[str] = ("K", "K", "T"),
) -> FluxReport:
    """Return the integral of Q(W)(X1, X2, X3, X4) over a sphere S(u, ubar).

    Args:
        weyl (WeylField): Weyl field sampled on the sphere nodes.
        metric (SphereMetric): Sphere metric.
        u (float): Outgoing label entering the multiplier weights.
        ubar (float): Incoming label entering the multiplier weights.
        multipliers (Sequence[str]): Three multipliers, with lbar appended as the
            transversal, or four names.

    Raises:
        ConfigurationError: If the Weyl field does not live on the sphere or a
            multiplier is unknown.
    """
    _check_domain(weyl, metric)
    names, vectors = _vectors(multipliers, u, ubar)
    grid = metric.grid
    weights = expansion_weights(vectors, grid.shape)
    expansion = null_expansion(weyl)
    terms = {
        BLOCKS[count]: _integral(
            SphereField(grid, weights[count] * expansion[count]), metric
        )
        for count in BLOCKS
    }
    flux = sum(terms.values())
    index = bel_robinson_contract(weyl, vectors, method="index")
    index_flux = _integral(SphereField(grid, index), metric)
    return FluxReport(
        flux,
        index_flux,
        terms,
        {
            "u": u,
            "ubar": ubar,
            "radius": metric.area_radius,
            "multipliers": names,
        },
    )


def expansion_report(
    weyl: WeylField,
    metric: SphereMetric,
    u: float,
    ubar: float,
    multipliers: Sequence[str] = ("T", "T", "T", "T"),
) -> ResidualReport:
    """Return the pointwise residual of the null expansion against the index sum."""
    _check_domain(weyl, metric)
    names, vectors = _vectors(multipliers, u, ubar)
    residual = bel_robinson_contract(weyl, vectors) - bel_robinson_contract(
        weyl, vectors, method="index"
    )
    return build_report(
        "bel_robinson_expansion",
        SphereField(metric.grid, residual),
        metric,
        {"u": u, "ubar": ubar, "multipliers": names},
    )


def commuted_weyl_field(state: ConeState, commutator: str | None = None) -> WeylField:
    """Return W, or Lieh_X W for a commutator X, sampled on the state's nodes."""
    calculus = state.calculus
    if commutator is None:
        return weyl_field(calculus, state.points)
    vector = vector_field(calculus, commutator)
    tensor = modified_lie_derivative(calculus, vector, state.points)
    return WeylField.from_tensor(calculus.null_pair(state.points), tensor)


@dataclass(frozen=True)
class ConeFlux:
    """Flux through a segment of an incoming cone, sphere by sphere.

    Attributes:
        ubar (float): Label of the incoming cone.
        spheres (list[FluxReport]): Sphere fluxes in increasing u.
        total (float): Integral of the sphere fluxes in u.
    """

    ubar: float
    spheres: list[FluxReport]
    total: float

    def rows(self) -> list[dict[str, Any]]:
        """Return one flat row per sphere for tabular output."""
        return [
            {
                "u": report.parameters["u"],
                "ubar": report.parameters["ubar"],
                "flux": report.flux,
                "index_flux": report.index_flux,
                **report.terms,
            }
            for report in self.spheres
        ]


def cone_flux(
    adapter: MetricAdapter,
    ubar: float,
    labels: Sequence[float],
    multipliers: Sequence[str] = ("K", "K", "T"),
    *,
    commutator: str | None = None,
    band_limit: int = 8,
    settings: FrameSettings | None = None,
    progress: bool = False,
) -> ConeFlux:
    """Return the flux of Q through the incoming cone ubar between the labels u.

    The sphere fluxes are integrated in u with the trapezoidal rule.

    Raises:
        ConfigurationError: If fewer than two labels are given or they do not
            increase.
    """
    labels = [float(label) for label in labels]
    if len(labels) < 2 or np.any(np.diff(labels) <= 0.0):
        raise ConfigurationError(
            f"cone segment needs at least two increasing labels, got {labels}"
        )
    spheres = []
    for u in tqdm(labels, desc="spheres", disable=not progress):
        state = extract_cone_state(
            adapter, u, ubar, band_limit, transverse=False, settings=settings
        )
        weyl = commuted_weyl_field(state, commutator)
        report = energy_flux(weyl, state.metric, u, ubar, multipliers)
        spheres.append(report)
        logger.debug("flux through S(%g, %g) = %.6e", u, ubar, report.flux)
    total = float(quadrature.trapezoid([r.flux for r in spheres], labels))
    return ConeFlux(ubar, spheres, total)


@dataclass(frozen=True)
class SphereCharges:
    """Hawking mass, Bondi loss integrand and angular momenta of a sphere.

    Attributes:
        hawking_mass (float): r/2 + r/(32 pi) int trchi trchib.
        bondi_loss (float): r/(64 pi) int trchi |chibh|^2, non-negative when
            trchi > 0.
        angular_momentum (tuple[float, float, float] | None): 1/(8 pi r) int
            zeta . O^(l), when rotation fields are given.
    """

    hawking_mass: float
    bondi_loss: float
    angular_momentum: tuple[float, float, float] | None = None

    @property
    def momentum(self) -> tuple[float, float, float]:
        """Return the angular momenta.

        Raises:
            ConfigurationError: If no rotation fields were supplied.
        """
        if self.angular_momentum is None:
            raise ConfigurationError(
                "angular momentum needs rotation fields of the sphere"
            )
        return self.angular_momentum


def mass_momentum(
    state: ConeState, rotations: RotationFields | None = None
) -> SphereCharges:
    """Return the Hawking mass, Bondi loss and angular momenta of a sphere."""
    metric = state.metric
    radius = state.radius
    trchi = state["trchi"]
    mass = radius / 2.0 + radius / (32.0 * np.pi) * _integral(
        trchi * state["trchib"], metric
    )
    shear = SphereField(state.grid, pointwise_norm_squared(state["chibh"], metric))
    loss = radius / (64.0 * np.pi) * _integral(trchi * shear, metric)
    momentum = None
    if rotations is not None:
        first, second, third = (
            _integral(dot(state["zeta"], rotation, metric), metric)
            / (8.0 * np.pi * radius)
            for rotation in rotations.fields
        )
        momentum = (first, second, third)
    logger.info("S(%g, %g): Hawking mass %.8f", state.u, state.ubar, mass)
    return SphereCharges(mass, loss, momentum)
