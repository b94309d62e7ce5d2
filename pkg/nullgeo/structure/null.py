"""Null structure equations and geodesic-foliation relations on a cone state."""

import logging

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime.cone import ConeState
from nullgeo.sphere import SphereField
from nullgeo.structure.reports import (
    Operators,
    ResidualReport,
    build_report,
    state_parameters,
)

logger = logging.getLogger(__name__)


def _transport_residuals(
    state: ConeState, op: Operators
) -> dict[str, SphereField]:
    f = state.__getitem__

    def n3(name: str) -> SphereField:
        return state.nabla("3", name)

    def n4(name: str) -> SphereField:
        return state.nabla("4", name)

    trchi, trchib = f("trchi"), f("trchib")
    chi, chib, chih, chibh = f("chi"), f("chib"), f("chih"), f("chibh")
    xi, xib, eta, etab, zeta = f("xi"), f("xib"), f("eta"), f("etab"), f("zeta")
    omega, omegab, rho = f("omega"), f("omegab"), f("rho")

    return {
        "lie_lb_metric": state.lie["3"] - 2.0 * chib,
        "lie_l_metric": state.lie["4"] - 2.0 * chi,
        "nabla3_chibh": n3("chibh")
        + chibh * trchib
        - op.sym_grad(xib)
        + chibh * omegab * 2.0
        - op.product(eta + etab - 2.0 * zeta, xib)
        + f("alphab"),
        "nabla3_trchib": n3("trchib")
        + 0.5 * trchib * trchib
        - 2.0 * op.div(xib)
        + 2.0 * omegab * trchib
        - 2.0 * op.dot(xib, eta + etab - 2.0 * zeta)
        + op.square(chibh),
        "nabla3_zeta": n3("zeta")
        + 2.0 * op.grad(omegab)
        + op.contract(chib, zeta + eta)
        - (zeta - eta) * omegab * 2.0
        - op.contract(chi, xib)
        - xib * omega * 2.0
        + f("betab"),
        "nabla3_chih": n3("chih")
        + chih * trchib * 0.5
        - op.sym_grad(eta)
        - chih * omegab * 2.0
        + chibh * trchi * 0.5
        - op.product(xib, xi)
        - op.product(eta, eta),
        "nabla3_trchi": n3("trchi")
        + 0.5 * trchib * trchi
        - 2.0 * op.div(eta)
        - 2.0 * omegab * trchi
        + op.dot(chih, chibh)
        - 2.0 * (op.dot(xi, xib) + op.square(eta))
        - 2.0 * rho,
        "nabla3_xi": n3("xi")
        - n4("eta")
        - xi * omegab * 4.0
        - op.contract(chi, eta - etab)
        - f("beta"),
        "nabla3_etab": n3("etab")
        - n4("xib")
        + xib * omega * 4.0
        + op.contract(chib, etab - eta)
        - f("betab"),
        "nabla3_omega": n3("omega")
        + n4("omegab")
        - op.dot(xi, xib)
        - op.dot(zeta, eta - etab)
        + op.dot(eta, etab)
        - 4.0 * omega * omegab
        - rho,
        "nabla4_chih": n4("chih")
        + chih * trchi
        - op.sym_grad(xi)
        + chih * omega * 2.0
        - op.product(eta + etab + 2.0 * zeta, xi)
        + f("alpha"),
        "nabla4_trchi": n4("trchi")
        + 0.5 * trchi * trchi
        - 2.0 * op.div(xi)
        + 2.0 * omega * trchi
        - 2.0 * op.dot(xi, eta + etab + 2.0 * zeta)
        + op.square(chih),
        "nabla4_zeta": n4("zeta")
        - 2.0 * op.grad(omega)
        - op.contract(chi, etab - zeta)
        - (zeta + etab) * omega * 2.0
        + op.contract(chib, xi)
        + xi * omegab * 2.0
        + f("beta"),
        "nabla4_chibh": n4("chibh")
        + chibh * trchi * 0.5
        - op.sym_grad(etab)
        - chibh * omega * 2.0
        + chih * trchib * 0.5
        - op.product(xi, xib)
        - op.product(etab, etab),
        "nabla4_trchib": n4("trchib")
        + 0.5 * trchi * trchib
        - 2.0 * op.div(etab)
        - 2.0 * omega * trchib
        + op.dot(chibh, chih)
        - 2.0 * (op.dot(xib, xi) + op.square(etab))
        - 2.0 * rho,
    }


def _elliptic_residuals(state: ConeState, op: Operators) -> dict[str, SphereField]:
    f = state.__getitem__
    trchi, trchib = f("trchi"), f("trchib")
    chih, chibh = f("chih"), f("chibh")
    xi, xib, eta, etab, zeta = f("xi"), f("xib"), f("eta"), f("etab"), f("zeta")
    twist = 0.5 * op.wedge(chih, chibh) - op.wedge(xi, xib) - f("sigma")
    gauss = SphereField(state.grid, state.metric.gauss_curvature)
    return {
        "curl_etab": op.curl(etab) - twist,
        "curl_eta": op.curl(eta) + twist,
        "codazzi_chibh": op.div(chibh)
        - 0.5 * op.grad(trchib)
        - op.contract(f("chib"), zeta)
        + zeta * trchib
        - f("betab"),
        "codazzi_chih": op.div(chih)
        - 0.5 * op.grad(trchi)
        + op.contract(f("chi"), zeta)
        - zeta * trchi
        + f("beta"),
        "curl_xi": op.curl(xi) - op.wedge(xi, eta + etab + 2.0 * zeta),
        "curl_xib": op.curl(xib) - op.wedge(xib, eta + etab - 2.0 * zeta),
        "gauss": gauss
        + 0.25 * trchi * trchib
        - 0.5 * op.dot(chih, chibh)
        + f("rho"),
    }


def eval_structure_residuals(state: ConeState) -> list[ResidualReport]:
    """Evaluate every null structure equation on a cone state.

    Args:
        state (ConeState): Snapshot extracted with transverse data.

    Returns:
        list[ResidualReport]: One report per structure identity.

    Raises:
        ConfigurationError: If the state carries no transverse data.
    """
    if not state.transverse or not state.lie:
        raise ConfigurationError(
            "structure residuals need a cone state extracted with transverse=True"
        )
    op = Operators(state.metric)
    residuals = {**_transport_residuals(state, op), **_elliptic_residuals(state, op)}
    parameters = state_parameters(state)
    reports = [
        build_report(name, residual, state.metric, parameters)
        for name, residual in residuals.items()
    ]
    worst = max(reports, key=lambda report: report.norms["Linf"])
    logger.info(
        "structure residuals on S(%g, %g): largest %s = %.3e",
        state.u,
        state.ubar,
        worst.id,
        worst.norms["Linf"],
    )
    return reports


def eval_geodesic_relations(state: ConeState) -> list[ResidualReport]:
    """Evaluate the relations that hold on geodesic foliations.

    Raises:
        ConfigurationError: If the adapter's foliation is not geodesic or the
            state carries no transverse data.
    """
    if not state.adapter.geodesic_foliation:
        raise ConfigurationError(
            f"{state.adapter.name} does not carry a geodesic foliation; extract "
            f"the state with foliation=\"geodesic\""
        )
    op = Operators(state.metric)
    f = state.__getitem__
    residuals = {
        "geodesic_xi": f("xi"),
        "geodesic_omega": f("omega"),
        "geodesic_eta": f("eta") - f("zeta"),
        "geodesic_etab": f("etab") + f("zeta"),
        "geodesic_grad_y": op.grad(f("y")) + 2.0 * f("xib"),
        "geodesic_nabla4_y": state.nabla("4", "y") + 4.0 * f("omegab"),
    }
    parameters = state_parameters(state)
    return [
        build_report(name, residual, state.metric, parameters)
        for name, residual in residuals.items()
    ]

