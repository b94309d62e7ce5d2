"""Averaged quantities, the Hawking mass and the averaged transport equations.

Averages are taken over (S, g) with the area of the sphere. Derivatives of averages
along l are five-point differences across neighbouring spheres of the same cone;
with a geodesic foliation l = 2 d/d(ubar) and, where y = 0, lbar = 2 d/du.
"""

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime.cone import ConeState, extract_cone_state
from nullgeo.spacetime.differences import FIVE_POINT
from nullgeo.sphere import SphereField, average, integrate
from nullgeo.structure.reports import (
    Operators,
    ResidualReport,
    build_report,
    state_parameters,
)

logger = logging.getLogger(__name__)

FLAT_NULL_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class AveragedDiagnostics:
    """Sphere averages and quasi-local mass of a cone state.

    Attributes:
        radius (float): Area radius r.
        rho_bar (float): Average of rho.
        sigma_bar (float): Average of sigma.
        shear_twist (float): Half the average of chih ^ chibh, equal to sigma_bar.
        trchi_bar (float): Average of trchi.
        trchib_bar (float): Average of trchib.
        omegab_bar (float): Average of omegab.
        mu (SphereField): Mass aspect div zeta + rho.
        mu_bar (float): Average of the mass aspect, equal to rho_bar.
        hawking_mass (float): r/2 + r/(32 pi) times the integral of trchi trchib.
        hawking_mass_curvature (float): The same mass written with rho and the
            shears, r/(8 pi) times the integral of -rho + 1/2 chih.chibh.
    """

    radius: float
    rho_bar: float
    sigma_bar: float
    shear_twist: float
    trchi_bar: float
    trchib_bar: float
    omegab_bar: float
    mu: SphereField
    mu_bar: float
    hawking_mass: float
    hawking_mass_curvature: float

    def to_dict(self) -> dict[str, float]:
        """Return the scalar diagnostics."""
        return {
            name: float(getattr(self, name))
            for name in self.__dataclass_fields__
            if name != "mu"
        }


def _real(value: float | complex) -> float:
    return float(np.real(value))


def mass_aspect(state: ConeState) -> SphereField:
    """Return mu = div zeta + rho."""
    return Operators(state.metric).div(state["zeta"]) + state["rho"]


def averaged_diagnostics(state: ConeState) -> AveragedDiagnostics:
    """Return the averages, the mass aspect and the Hawking mass of a cone state."""
    op = Operators(state.metric)
    metric = state.metric
    radius = state.radius

    def mean(field: SphereField) -> float:
        return _real(average(field, metric))

    mu = mass_aspect(state)
    product = state["trchi"] * state["trchib"]
    curvature = op.dot(state["chih"], state["chibh"]) * 0.5 - state["rho"]
    return AveragedDiagnostics(
        radius=radius,
        rho_bar=mean(state["rho"]),
        sigma_bar=mean(state["sigma"]),
        shear_twist=0.5 * mean(op.wedge(state["chih"], state["chibh"])),
        trchi_bar=mean(state["trchi"]),
        trchib_bar=mean(state["trchib"]),
        omegab_bar=mean(state["omegab"]),
        mu=mu,
        mu_bar=mean(mu),
        hawking_mass=0.5 * radius
        + radius / (32.0 * np.pi) * _real(integrate(product, metric)),
        hawking_mass_curvature=radius
        / (8.0 * np.pi)
        * _real(integrate(curvature, metric)),
    )


def _sample(state: ConeState) -> dict[str, Any]:
    diagnostics = averaged_diagnostics(state)
    return {
        "radius": diagnostics.radius,
        "trchi": diagnostics.trchi_bar,
        "trchib": diagnostics.trchib_bar,
        "omegab": diagnostics.omegab_bar,
        "rho": diagnostics.rho_bar,
        "mu": diagnostics.mu.values,
    }


def null_rates(
    state: ConeState, which: str, step: float | None = None
) -> dict[str, Any]:
    """Return l or lbar of the averages, of r and of the mass aspect.

    Neighbouring spheres are extracted without transverse data at the same band
    limit, so the mass aspect is differenced node by node along the generators.

    Args:
        state (ConeState): Central sphere.
        which (str): ``4`` for l, differencing in ubar; ``3`` for lbar,
            differencing in u.
        step (float | None): Label step; defaults to the transverse step times
            max(r, 1).
    """
    if which not in ("3", "4"):
        raise ConfigurationError(f"null direction must be 3 or 4, got {which}")
    step = step or state.settings.transverse_step * max(state.radius, 1.0)
    samples = []
    for shift, _ in FIVE_POINT:
        u, ubar = state.u, state.ubar
        if which == "4":
            ubar = ubar + shift * step
        else:
            u = u + shift * step
        neighbour = extract_cone_state(
            state.adapter,
            u,
            ubar,
            state.grid.band_limit,
            transverse=False,
            settings=state.settings,
        )
        samples.append(_sample(neighbour))
    rates = {}
    for key in samples[0]:
        total = sum(
            weight * sample[key] for (_, weight), sample in zip(FIVE_POINT, samples)
        )
        # the null vector is twice the label derivative
        rates[key] = 2.0 * total / (12.0 * step)
    return rates


def _constant(state: ConeState, value: float) -> SphereField:
    return SphereField.constant(state.grid, value)


def _outgoing_residuals(
    state: ConeState, rates: dict[str, Any]
) -> dict[str, SphereField]:
    op = Operators(state.metric)
    metric = state.metric
    f = state.__getitem__
    d = averaged_diagnostics(state)
    r = d.radius

    def mean(field: SphereField) -> float:
        return _real(average(field, metric))

    trchi, trchib, rho, zeta = f("trchi"), f("trchib"), f("rho"), f("zeta")
    chih, chibh = f("chih"), f("chibh")
    dtrchi = trchi - _constant(state, d.trchi_bar)
    dtrchib = trchib - _constant(state, d.trchib_bar)
    drho = rho - _constant(state, d.rho_bar)
    domegab = f("omegab") - _constant(state, d.omegab_bar)
    zeta2 = op.square(zeta)
    shear = op.dot(chih, chibh)
    l_inverse_radius = -rates["radius"] / r**2
    mu_rate = SphereField(state.grid, rates["mu"])

    scalars = {
        "average_l_commutation": rates["rho"]
        - mean(state.nabla("4", "rho"))
        - mean(dtrchi * rho),
        "average_l_radius": rates["radius"] - 0.5 * r * d.trchi_bar,
        "average_nabla4_rho": rates["rho"]
        + 1.5 * d.trchi_bar * d.rho_bar
        + 0.5 * mean(op.dot(chibh, f("alpha")))
        + mean(op.dot(zeta, f("beta")))
        + 0.5 * mean(dtrchi * drho),
        "average_sigma": d.sigma_bar - d.shear_twist,
        "average_nabla4_trchi": rates["trchi"]
        - 2.0 * l_inverse_radius
        + 0.5 * d.trchi_bar * (d.trchi_bar - 2.0 / r)
        + mean(op.square(chih))
        - 0.5 * mean(dtrchi * dtrchi),
        "average_nabla4_trchib": rates["trchib"]
        + 2.0 * l_inverse_radius
        + 0.5 * d.trchi_bar * (d.trchib_bar + 2.0 / r)
        - 2.0 * d.rho_bar
        + mean(shear)
        - 2.0 * mean(zeta2)
        - 0.5 * mean(dtrchi * dtrchib),
        "average_nabla4_omegab": rates["omegab"]
        - d.rho_bar
        - 3.0 * mean(zeta2)
        - mean(dtrchi * domegab),
        "average_mu_rho": d.mu_bar - d.rho_bar,
    }
    residuals = {name: _constant(state, value) for name, value in scalars.items()}

    error = (
        -shear
        + 2.0 * zeta2
        + _constant(
            state,
            mean(shear) - 2.0 * mean(zeta2) - 0.5 * mean(dtrchi * dtrchib),
        )
    )
    residuals["average_nabla4_trchi_renormalised"] = (
        state.nabla("4", "trchi")
        - _constant(state, rates["trchi"])
        + d.trchi_bar * dtrchi
        + op.square(chih)
        + 0.5 * dtrchi * dtrchi
        - _constant(
            state, mean(op.square(chih)) - 0.5 * mean(dtrchi * dtrchi)
        )
    )
    residuals["average_nabla4_trchib_renormalised"] = (
        state.nabla("4", "trchib")
        - _constant(state, rates["trchib"])
        + 0.5 * d.trchi_bar * dtrchib
        + 0.5 * trchib * dtrchi
        + 2.0 * op.div(zeta)
        - 2.0 * drho
        - error
    )
    residuals["average_nabla4_omegab_renormalised"] = (
        state.nabla("4", "omegab")
        - _constant(state, rates["omegab"])
        - drho
        - 3.0 * zeta2
        + _constant(state, 3.0 * mean(zeta2) + mean(dtrchi * domegab))
    )
    residuals["nabla4_zeta_geodesic"] = (
        state.nabla("4", "zeta")
        + zeta * trchi
        + 2.0 * op.contract(chih, zeta)
        + f("beta")
    )
    residuals["nabla4_mu"] = (
        mu_rate
        + 1.5 * trchi * d.mu
        + 2.0 * op.dot(op.div(chih), zeta)
        + 3.0 * op.dot(chih, op.grad(zeta))
        + op.dot(op.contract(f("chi"), zeta), zeta)
        - trchi * zeta2
        + 2.0 * op.dot(zeta, f("beta"))
        + op.dot(op.grad(trchi), zeta)
        + 0.5 * op.dot(chibh, f("alpha"))
    )
    return residuals


def _incoming_residuals(
    state: ConeState, rates: dict[str, Any]
) -> dict[str, SphereField]:
    op = Operators(state.metric)
    metric = state.metric
    f = state.__getitem__
    d = averaged_diagnostics(state)
    r = d.radius

    def mean(field: SphereField) -> float:
        return _real(average(field, metric))

    rho = f("rho")
    dtrchib = f("trchib") - _constant(state, d.trchib_bar)
    drho = rho - _constant(state, d.rho_bar)
    domegab = f("omegab") - _constant(state, d.omegab_bar)
    lb_inverse_radius = -rates["radius"] / r**2
    scalars = {
        "average_lb_commutation": rates["rho"]
        - mean(state.nabla("3", "rho"))
        - mean(dtrchib * rho),
        "average_lb_radius": rates["radius"] - 0.5 * r * d.trchib_bar,
        "average_nabla3_rho": rates["rho"]
        + 1.5 * d.trchib_bar * d.rho_bar
        + 0.5 * mean(op.dot(f("chih"), f("alphab")))
        + mean(op.dot(f("zeta"), f("betab")))
        + 0.5 * mean(dtrchib * drho),
        "average_nabla3_trchib": rates["trchib"]
        + 2.0 * lb_inverse_radius
        + 0.5 * d.trchib_bar * (d.trchib_bar + 2.0 / r)
        + 2.0 * mean(domegab * dtrchib)
        + mean(op.square(f("chibh")))
        - 0.5 * mean(dtrchib * dtrchib),
    }
    return {name: _constant(state, value) for name, value in scalars.items()}


def eval_averaged_equations(
    state: ConeState, step: float | None = None
) -> list[ResidualReport]:
    """Evaluate the averaged transport equations on a cone state.

    The incoming equations are evaluated only where y vanishes, so that lbar is
    tangent to the incoming cones of the foliation.

    Args:
        state (ConeState): Snapshot extracted with transverse data.
        step (float | None): Label step of the neighbouring spheres.

    Returns:
        list[ResidualReport]: One report per evaluated identity.

    Raises:
        ConfigurationError: If the foliation is not geodesic or the state carries
            no transverse data.
    """
    if not state.adapter.geodesic_foliation:
        raise ConfigurationError(
            f"averaged equations need a geodesic foliation; extract the "
            f"{state.adapter.name} state with foliation=\"geodesic\""
        )
    if not state.transverse:
        raise ConfigurationError(
            "averaged equations need a cone state extracted with transverse=True"
        )
    residuals = _outgoing_residuals(state, null_rates(state, "4", step))
    if float(np.max(np.abs(state["y"].values))) <= FLAT_NULL_TOLERANCE:
        residuals.update(_incoming_residuals(state, null_rates(state, "3", step)))
    else:
        logger.info(
            "y does not vanish on S(%g, %g); skipping the incoming averages",
            state.u,
            state.ubar,
        )
    parameters = state_parameters(state)
    return [
        build_report(name, residual, state.metric, parameters)
        for name, residual in residuals.items()
    ]
