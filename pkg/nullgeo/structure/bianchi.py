"""Null Bianchi equations on a cone state."""

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


def bianchi_residuals(state: ConeState) -> dict[str, SphereField]:
    """Return LHS - RHS of every null Bianchi equation, keyed by equation id."""
    op = Operators(state.metric)
    f = state.__getitem__

    def n3(name: str) -> SphereField:
        return state.nabla("3", name)

    def n4(name: str) -> SphereField:
        return state.nabla("4", name)

    trchi, trchib = f("trchi"), f("trchib")
    chih, chibh = f("chih"), f("chibh")
    xi, xib, eta, etab, zeta = f("xi"), f("xib"), f("eta"), f("etab"), f("zeta")
    omega, omegab = f("omega"), f("omegab")
    alpha, alphab, beta, betab = f("alpha"), f("alphab"), f("beta"), f("betab")
    rho, sigma = f("rho"), f("sigma")
    dual = op.dual

    return {
        "bianchi_nabla3_alpha": n3("alpha")
        + alpha * trchib * 0.5
        - op.sym_grad(beta)
        - alpha * omegab * 2.0
        + 3.0 * (chih * rho + dual(chih) * sigma)
        - op.product(zeta + 4.0 * eta, beta),
        "bianchi_nabla4_beta": n4("beta")
        + beta * trchi * 2.0
        - op.div(alpha)
        + beta * omega * 2.0
        - op.contract(alpha, 2.0 * zeta + etab)
        - 3.0 * (xi * rho + dual(xi) * sigma),
        "bianchi_nabla3_beta": n3("beta")
        + beta * trchib
        - op.grad(rho)
        - dual(op.grad(sigma))
        - beta * omegab * 2.0
        - op.contract(alpha, xib)
        - 3.0 * (eta * rho + dual(eta) * sigma),
        "bianchi_nabla4_rho": n4("rho")
        + 1.5 * trchi * rho
        - op.div(beta)
        + 0.5 * op.dot(chibh, alpha)
        - op.dot(zeta, beta)
        - 2.0 * (op.dot(etab, beta) - op.dot(xi, betab)),
        "bianchi_nabla3_rho": n3("rho")
        + 1.5 * trchib * rho
        + op.div(betab)
        + 0.5 * op.dot(chih, alphab)
        - op.dot(zeta, betab)
        - 2.0 * (op.dot(xib, beta) - op.dot(eta, betab)),
        "bianchi_nabla4_sigma": n4("sigma")
        + 1.5 * trchi * sigma
        + op.curl(beta)
        - 0.5 * op.dot(chibh, dual(alpha))
        + op.dot(zeta, dual(beta))
        + 2.0 * (op.dot(etab, dual(beta)) + 2.0 * op.dot(xi, dual(betab))),
        "bianchi_nabla3_sigma": n3("sigma")
        + 1.5 * trchib * sigma
        + op.curl(betab)
        + 0.5 * op.dot(chih, dual(alphab))
        - op.dot(zeta, dual(betab))
        + 2.0 * (op.dot(etab, dual(beta)) + op.dot(eta, dual(betab))),
        "bianchi_nabla4_betab": n4("betab")
        + betab * trchi
        + op.grad(rho)
        - dual(op.grad(sigma))
        - 2.0 * op.contract(chibh, beta)
        - betab * omega * 2.0
        + op.contract(alphab, xi)
        + 3.0 * (etab * rho - dual(etab) * sigma),
        "bianchi_nabla3_betab": n3("betab")
        + betab * trchib * 2.0
        + op.div(alphab)
        + betab * omegab * 2.0
        + op.contract(alphab, eta - 2.0 * zeta)
        - 3.0 * (dual(xib) * sigma - xib * rho),
        "bianchi_nabla4_alphab": n4("alphab")
        + alphab * trchi * 0.5
        + op.sym_grad(betab)
        - alphab * omega * 4.0
        + 3.0 * (chibh * rho - dual(chibh) * sigma)
        - op.product(zeta - 4.0 * etab, betab),
    }


def eval_bianchi_residuals(state: ConeState) -> list[ResidualReport]:
    """Evaluate the null Bianchi equations on a cone state.

    Args:
        state (ConeState): Snapshot extracted with transverse data.

    Returns:
        list[ResidualReport]: One report per Bianchi identity.

    Raises:
        ConfigurationError: If the state carries no transverse data.
    """
    if not state.transverse:
        raise ConfigurationError(
            "Bianchi residuals need a cone state extracted with transverse=True"
        )
    parameters = state_parameters(state)
    reports = [
        build_report(name, residual, state.metric, parameters)
        for name, residual in bianchi_residuals(state).items()
    ]
    logger.info(
        "Bianchi residuals on S(%g, %g): largest Linf %.3e",
        state.u,
        state.ubar,
        max(report.norms["Linf"] for report in reports),
    )
    return reports
