"""Registry of the identities checked by the residual evaluators."""

from dataclasses import dataclass
from typing import Literal

from nullgeo.errors import ConfigurationError

Family = Literal[
    "structure",
    "bianchi",
    "commutation",
    "geodesic",
    "averaged",
    "transition",
    "energy",
    "canonical",
    "harmonic",
]
FAMILIES: tuple[Family, ...] = (
    "structure",
    "bianchi",
    "commutation",
    "geodesic",
    "averaged",
    "transition",
    "energy",
    "canonical",
    "harmonic",
)


@dataclass(frozen=True)
class Equation:
    """A registered identity.

    Attributes:
        id (str): Stable identifier used in reports.
        family (Family): Catalog the identity belongs to.
        statement (str): The identity as LHS = RHS in plain notation.
        transverse (bool): Whether it involves nabla_3 or nabla_4 derivatives, so
            its residual converges at the order of the transverse stencil rather
            than spectrally.
    """

    id: str
    family: Family
    statement: str
    transverse: bool = True


_ENTRIES: tuple[Equation, ...] = (
    Equation("lie_lb_metric", "structure", "L_lbar g = 2 chibar"),
    Equation("lie_l_metric", "structure", "L_l g = 2 chi"),
    Equation(
        "nabla3_chibh",
        "structure",
        "nabla_3 chibh + trchib chibh = D(x)xib - 2 omegab chibh "
        "+ (eta + etab - 2 zeta)(x)xib - alphab",
    ),
    Equation(
        "nabla3_trchib",
        "structure",
        "nabla_3 trchib + 1/2 trchib^2 = 2 div xib - 2 omegab trchib "
        "+ 2 xib.(eta + etab - 2 zeta) - |chibh|^2",
    ),
    Equation(
        "nabla3_zeta",
        "structure",
        "nabla_3 zeta = -2 D omegab - chib.(zeta + eta) + 2 omegab (zeta - eta) "
        "+ chi.xib + 2 omega xib - betab",
    ),
    Equation(
        "nabla3_chih",
        "structure",
        "nabla_3 chih + 1/2 trchib chih = D(x)eta + 2 omegab chih "
        "- 1/2 trchi chibh + xib(x)xi + eta(x)eta",
    ),
    Equation(
        "nabla3_trchi",
        "structure",
        "nabla_3 trchi + 1/2 trchib trchi = 2 div eta + 2 omegab trchi "
        "- chih.chibh + 2 (xi.xib + |eta|^2) + 2 rho",
    ),
    Equation(
        "nabla3_xi",
        "structure",
        "nabla_3 xi - nabla_4 eta = 4 omegab xi + chi.(eta - etab) + beta",
    ),
    Equation(
        "nabla3_etab",
        "structure",
        "nabla_3 etab - nabla_4 xib = -4 omega xib - chib.(etab - eta) + betab",
    ),
    Equation(
        "nabla3_omega",
        "structure",
        "nabla_3 omega + nabla_4 omegab = xi.xib + zeta.(eta - etab) - eta.etab "
        "+ 4 omega omegab + rho",
    ),
    Equation(
        "nabla4_chih",
        "structure",
        "nabla_4 chih + trchi chih = D(x)xi - 2 omega chih "
        "+ (eta + etab + 2 zeta)(x)xi - alpha",
    ),
    Equation(
        "nabla4_trchi",
        "structure",
        "nabla_4 trchi + 1/2 trchi^2 = 2 div xi - 2 omega trchi "
        "+ 2 xi.(eta + etab + 2 zeta) - |chih|^2",
    ),
    Equation(
        "nabla4_zeta",
        "structure",
        "nabla_4 zeta = 2 D omega + chi.(-zeta + etab) + 2 omega (zeta + etab) "
        "- chib.xi - 2 omegab xi - beta",
    ),
    Equation(
        "nabla4_chibh",
        "structure",
        "nabla_4 chibh + 1/2 trchi chibh = D(x)etab + 2 omega chibh "
        "- 1/2 trchib chih + xi(x)xib + etab(x)etab",
    ),
    Equation(
        "nabla4_trchib",
        "structure",
        "nabla_4 trchib + 1/2 trchi trchib = 2 div etab + 2 omega trchib "
        "- chibh.chih + 2 (xib.xi + |etab|^2) + 2 rho",
    ),
    Equation(
        "curl_etab",
        "structure",
        "curl etab = 1/2 chih^chibh - xi^xib - sigma",
        transverse=False,
    ),
    Equation(
        "curl_eta",
        "structure",
        "curl eta = -1/2 chih^chibh + xi^xib + sigma",
        transverse=False,
    ),
    Equation(
        "codazzi_chibh",
        "structure",
        "div chibh = 1/2 D trchib + chib.zeta - trchib zeta + betab",
        transverse=False,
    ),
    Equation(
        "codazzi_chih",
        "structure",
        "div chih = 1/2 D trchi - chi.zeta + trchi zeta - beta",
        transverse=False,
    ),
    Equation(
        "curl_xi", "structure", "curl xi = xi^(eta + etab + 2 zeta)", transverse=False
    ),
    Equation(
        "curl_xib",
        "structure",
        "curl xib = xib^(eta + etab - 2 zeta)",
        transverse=False,
    ),
    Equation(
        "gauss",
        "structure",
        "K = -1/4 trchi trchib + 1/2 chih.chibh - rho",
        transverse=False,
    ),
    Equation(
        "bianchi_nabla3_alpha",
        "bianchi",
        "nabla_3 alpha + 1/2 trchib alpha = D(x)beta + 2 omegab alpha "
        "- 3 (chih rho + *chih sigma) + (zeta + 4 eta)(x)beta",
    ),
    Equation(
        "bianchi_nabla4_beta",
        "bianchi",
        "nabla_4 beta + 2 trchi beta = div alpha - 2 omega beta "
        "+ (2 zeta + etab).alpha + 3 (xi rho + *xi sigma)",
    ),
    Equation(
        "bianchi_nabla3_beta",
        "bianchi",
        "nabla_3 beta + trchib beta = D rho + *D sigma + 2 omegab beta "
        "+ xib.alpha + 3 (eta rho + *eta sigma)",
    ),
    Equation(
        "bianchi_nabla4_rho",
        "bianchi",
        "nabla_4 rho + 3/2 trchi rho = div beta - 1/2 chibh.alpha + zeta.beta "
        "+ 2 (etab.beta - xi.betab)",
    ),
    Equation(
        "bianchi_nabla3_rho",
        "bianchi",
        "nabla_3 rho + 3/2 trchib rho = -div betab - 1/2 chih.alphab "
        "+ zeta.betab + 2 (xib.beta - eta.betab)",
    ),
    Equation(
        "bianchi_nabla4_sigma",
        "bianchi",
        "nabla_4 sigma + 3/2 trchi sigma = -curl beta + 1/2 chibh.*alpha "
        "- zeta.*beta - 2 (etab.*beta + 2 xi.*betab)",
    ),
    Equation(
        "bianchi_nabla3_sigma",
        "bianchi",
        "nabla_3 sigma + 3/2 trchib sigma = -curl betab - 1/2 chih.*alphab "
        "+ zeta.*betab - 2 (etab.*beta + eta.*betab)",
    ),
    Equation(
        "bianchi_nabla4_betab",
        "bianchi",
        "nabla_4 betab + trchi betab = -D rho + *D sigma + 2 chibh.beta "
        "+ 2 omega betab - xi.alphab - 3 (etab rho - *etab sigma)",
    ),
    Equation(
        "bianchi_nabla3_betab",
        "bianchi",
        "nabla_3 betab + 2 trchib betab = -div alphab - 2 omegab betab "
        "- (-2 zeta + eta).alphab + 3 (-xib rho + *xib sigma)",
    ),
    Equation(
        "bianchi_nabla4_alphab",
        "bianchi",
        "nabla_4 alphab + 1/2 trchi alphab = -D(x)betab + 4 omega alphab "
        "- 3 (chibh rho - *chibh sigma) + (zeta - 4 etab)(x)betab",
    ),
    Equation(
        "commute_nabla4_angular",
        "commutation",
        "[nabla_4, D] F = -1/2 trchi DF - chih.DF + xi nabla_3 F "
        "+ (etab + zeta) nabla_4 F + E(4, D).F",
    ),
    Equation(
        "commute_nabla3_angular",
        "commutation",
        "[nabla_3, D] F = -1/2 trchib DF - chibh.DF + xib nabla_4 F "
        "+ (eta - zeta) nabla_3 F + E(3, D).F",
    ),
    Equation(
        "commute_nabla3_nabla4",
        "commutation",
        "[nabla_3, nabla_4] F = 2 omega nabla_3 F + 2 omegab nabla_4 F "
        "+ (eta - etab).DF + E(3, 4).F",
    ),
    Equation("geodesic_xi", "geodesic", "xi = 0", transverse=False),
    Equation("geodesic_omega", "geodesic", "omega = 0", transverse=False),
    Equation("geodesic_eta", "geodesic", "eta = zeta", transverse=False),
    Equation("geodesic_etab", "geodesic", "etab = -zeta", transverse=False),
    Equation("geodesic_grad_y", "geodesic", "D y = -2 xib", transverse=False),
    Equation("geodesic_nabla4_y", "geodesic", "nabla_4 y = -4 omegab"),
    Equation(
        "average_l_commutation",
        "averaged",
        "l(avg phi) = avg(l phi) + avg((trchi - avg trchi) phi)",
    ),
    Equation(
        "average_lb_commutation",
        "averaged",
        "lbar(avg phi) = avg(lbar phi) + avg((trchib - avg trchib) phi) where y = 0",
    ),
    Equation("average_l_radius", "averaged", "l(r) = 1/2 r avg trchi"),
    Equation(
        "average_lb_radius", "averaged", "lbar(r) = 1/2 r avg trchib where y = 0"
    ),
    Equation(
        "average_nabla4_rho",
        "averaged",
        "nabla_4 avg rho + 3/2 avg trchi avg rho = -1/2 avg(chibh.alpha) "
        "- avg(zeta.beta) - 1/2 avg((trchi - avg trchi)(rho - avg rho))",
    ),
    Equation(
        "average_nabla3_rho",
        "averaged",
        "nabla_3 avg rho + 3/2 avg trchib avg rho = -1/2 avg(chih.alphab) "
        "- avg(zeta.betab) - 1/2 avg((trchib - avg trchib)(rho - avg rho))",
    ),
    Equation(
        "average_sigma",
        "averaged",
        "avg sigma = 1/2 avg(chih^chibh)",
        transverse=False,
    ),
    Equation(
        "average_nabla4_trchi_renormalised",
        "averaged",
        "nabla_4 (trchi - avg) + avg trchi (trchi - avg) = -|chih|^2 "
        "- 1/2 (trchi - avg)^2 + avg|chih|^2 - 1/2 avg((trchi - avg)^2)",
    ),
    Equation(
        "average_nabla4_trchi",
        "averaged",
        "nabla_4 (avg trchi - 2/r) + 1/2 avg trchi (avg trchi - 2/r) = "
        "-avg|chih|^2 + 1/2 avg((trchi - avg)^2)",
    ),
    Equation(
        "average_nabla4_trchib_renormalised",
        "averaged",
        "nabla_4 (trchib - avg) + 1/2 avg trchi (trchib - avg) = "
        "-1/2 trchib (trchi - avg) - 2 div zeta + 2 (rho - avg rho) + err",
    ),
    Equation(
        "average_nabla4_trchib",
        "averaged",
        "nabla_4 (avg trchib + 2/r) + 1/2 avg trchi (avg trchib + 2/r) = "
        "2 avg rho - avg(chih.chibh) + 2 avg|zeta|^2 "
        "+ 1/2 avg((trchi - avg)(trchib - avg))",
    ),
    Equation(
        "average_nabla3_trchib",
        "averaged",
        "nabla_3 (avg trchib + 2/r) + 1/2 avg trchib (avg trchib + 2/r) = "
        "-2 avg((omegab - avg)(trchib - avg)) - avg|chibh|^2 "
        "+ 1/2 avg((trchib - avg)^2) where y = 0",
    ),
    Equation(
        "average_nabla4_omegab_renormalised",
        "averaged",
        "nabla_4 (omegab - avg) = rho - avg rho + 3 |zeta|^2 - 3 avg|zeta|^2 "
        "- avg((trchi - avg)(omegab - avg))",
    ),
    Equation(
        "average_nabla4_omegab",
        "averaged",
        "nabla_4 avg omegab = avg rho + 3 avg|zeta|^2 "
        "+ avg((trchi - avg)(omegab - avg))",
    ),
    Equation(
        "average_mu_rho",
        "averaged",
        "avg mu = avg rho with mu = div zeta + rho",
        transverse=False,
    ),
    Equation(
        "nabla4_zeta_geodesic",
        "averaged",
        "nabla_4 zeta + trchi zeta = -2 chih.zeta - beta",
    ),
    Equation(
        "nabla4_mu",
        "averaged",
        "nabla_4 mu + 3/2 trchi mu = -2 (D chih).zeta - 3 chih.D zeta "
        "- chi.zeta.zeta + trchi |zeta|^2 - 2 zeta.beta - D trchi.zeta "
        "- 1/2 chibh.alpha",
    ),
    Equation(
        "transition_chi",
        "transition",
        "lambda^-1 chi' = chi + D f + zeta (x) f + fbar (x) xi + f (x) eta",
    ),
    Equation(
        "transition_chib",
        "transition",
        "lambda chib' = chib + D fbar - zeta (x) fbar + f (x) xib + fbar (x) etab",
    ),
    Equation("transition_trchi", "transition", "trace of the chi law"),
    Equation("transition_trchib", "transition", "trace of the chib law"),
    Equation(
        "transition_xi",
        "transition",
        "lambda^-2 xi' = xi + 1/2 nabla_4 f + 1/4 trchi f + omega f + 1/2 f.chih",
    ),
    Equation(
        "transition_xib",
        "transition",
        "lambda^2 xib' = xib + 1/2 nabla_3 fbar + 1/4 trchib fbar + omegab fbar "
        "+ 1/2 fbar.chibh",
    ),
    Equation(
        "transition_eta",
        "transition",
        "eta' = eta + 1/2 nabla_3 f + 1/4 trchi fbar - omegab f + 1/2 fbar.chih",
    ),
    Equation(
        "transition_etab",
        "transition",
        "etab' = etab + 1/2 nabla_4 fbar + 1/4 trchib f - omega fbar "
        "+ 1/2 f.chibh",
    ),
    Equation(
        "transition_zeta",
        "transition",
        "zeta' = zeta - D log lambda - 1/4 trchib f + 1/4 trchi fbar + omega fbar "
        "- omegab f - 1/2 chibh.f + 1/2 chih.fbar",
    ),
    Equation(
        "transition_omega",
        "transition",
        "lambda^-1 omega' = omega - 1/2 lambda^-1 l'(log lambda) "
        "+ 1/2 f.(zeta - etab) + 1/2 xi.fbar",
    ),
    Equation(
        "transition_omegab",
        "transition",
        "lambda omegab' = omegab + 1/2 lambda lbar'(log lambda) "
        "- 1/2 fbar.(zeta + eta) + 1/2 xib.f",
    ),
    Equation(
        "transition_alpha",
        "transition",
        "lambda^-2 alpha' = alpha + f (x) beta - *f (x) *beta",
        transverse=False,
    ),
    Equation(
        "transition_beta",
        "transition",
        "lambda^-1 beta' = beta + 3/2 (f rho + *f sigma) + 1/2 alpha.fbar",
        transverse=False,
    ),
    Equation(
        "transition_rho",
        "transition",
        "rho' = rho + fbar.beta - f.betab",
        transverse=False,
    ),
    Equation(
        "transition_sigma",
        "transition",
        "sigma' = sigma - fbar.*beta - f.*betab",
        transverse=False,
    ),
    Equation(
        "transition_betab",
        "transition",
        "lambda betab' = betab - 3/2 (fbar rho + *fbar sigma) - 1/2 alphab.f",
        transverse=False,
    ),
    Equation(
        "transition_alphab",
        "transition",
        "lambda^2 alphab' = alphab - fbar (x) betab + *fbar (x) *betab",
        transverse=False,
    ),
    Equation(
        "transition_nabla4",
        "transition",
        "nabla_4 F^+ = lambda^-1 (nabla'_4 F)^+ - f.D F^+ - 1/4 |f|^2 nabla_3 F^+",
    ),
    Equation(
        "transition_angular",
        "transition",
        "D F^+ = (D' F)^+ - 1/2 fbar (f.D F^+) - 1/2 fbar nabla_4 F^+ "
        "- (1/2 f + 1/8 |f|^2 fbar) nabla_3 F^+",
    ),
    Equation(
        "transition_nabla3",
        "transition",
        "nabla_3 F^+ = lambda (nabla'_3 F)^+ "
        "- (1/2 f.fbar + 1/16 |f|^2 |fbar|^2) nabla_3 F^+ "
        "- (fbar + 1/4 |fbar|^2 f).D F^+ - 1/4 |fbar|^2 nabla_4 F^+",
    ),
    Equation(
        "boundary_kappa",
        "transition",
        "k(e_a, e_b) = -1/2 nu^-1 chib - 1/2 nu chi",
        transverse=False,
    ),
    Equation(
        "boundary_epsilon",
        "transition",
        "k(N, e_a) = -D log nu + zeta",
        transverse=False,
    ),
    Equation(
        "boundary_delta",
        "transition",
        "k(N, N) = 1/2 nu^-1 D_3 log nu - 1/2 nu D_4 log nu + nu^-1 omegab "
        "+ nu omega",
    ),
    Equation(
        "boundary_lapse",
        "transition",
        "n = c / (c + 1) (nu + (c^-1 - 1/2 y) nu^-1)",
        transverse=False,
    ),
    Equation(
        "bel_robinson_expansion",
        "energy",
        "Q(X1, X2, X3, X4) = sum over null blocks of 2|alpha|^2, 4|beta|^2, "
        "4(rho^2 + sigma^2), 4|betab|^2, 2|alphab|^2",
        transverse=False,
    ),
    Equation(
        "rotation_commutator",
        "energy",
        "P_abc - P_bac = (K - r^-2)(O_b g_ac - O_a g_bc)",
        transverse=False,
    ),
    Equation(
        "canonical_condition",
        "canonical",
        "lap log Omega = s^-1 lap s + F(s, D s, D^2 s) - average",
        transverse=False,
    ),
    Equation(
        "canonical_mean_lapse",
        "canonical",
        "mean log Omega(u) = int_0^u mean((trchib - mean trchib) log Omega)",
        transverse=False,
    ),
    Equation(
        "boundary_unit_sum",
        "harmonic",
        "sum_i (x^i)^2 = 1 on the boundary",
        transverse=False,
    ),
    Equation(
        "conformal_laplace",
        "harmonic",
        "lap x^i + 2 x^i = 2 x^i (1 - phi^-2) on the boundary",
        transverse=False,
    ),
    Equation(
        "boundary_laplace",
        "harmonic",
        "D_N D_N x + lap x + trtheta N(x) = 0 on the boundary",
        transverse=False,
    ),
)

EQUATIONS: dict[str, Equation] = {entry.id: entry for entry in _ENTRIES}


def equation(equation_id: str) -> Equation:
    """Return a registered identity.

    Raises:
        ConfigurationError: If the id is not registered.
    """
    if equation_id not in EQUATIONS:
        raise ConfigurationError(f"unknown equation id {equation_id!r}")
    return EQUATIONS[equation_id]


def catalog(family: str | None = None) -> list[Equation]:
    """Return the identities of a family, or all of them.

    Raises:
        ConfigurationError: If the family is unknown.
    """
    if family is None:
        return list(_ENTRIES)
    if family not in FAMILIES:
        raise ConfigurationError(
            f"unknown catalog {family!r}; choose one of {list(FAMILIES)}"
        )
    return [entry for entry in _ENTRIES if entry.family == family]
