from nullgeo.structure.averaged import (
    AveragedDiagnostics,
    averaged_diagnostics,
    eval_averaged_equations,
    mass_aspect,
    null_rates,
)
from nullgeo.structure.bianchi import bianchi_residuals, eval_bianchi_residuals
from nullgeo.structure.catalog import EQUATIONS, FAMILIES, Equation, catalog, equation
from nullgeo.structure.commutation import (
    COMMUTATOR_IDS,
    SAMPLE_FIELDS,
    commutator_residual,
    eval_commutation,
    horizontal_sample,
)
from nullgeo.structure.null import eval_geodesic_relations, eval_structure_residuals
from nullgeo.structure.reports import (
    Operators,
    ResidualReport,
    build_report,
    state_parameters,
)
from nullgeo.structure.transport import (
    EVOLVED,
    ConeTransport,
    TransportResult,
    integrate_cone,
    transport_convergence,
)

__all__ = [
    "COMMUTATOR_IDS",
    "EQUATIONS",
    "EVOLVED",
    "FAMILIES",
    "SAMPLE_FIELDS",
    "AveragedDiagnostics",
    "ConeTransport",
    "Equation",
    "Operators",
    "ResidualReport",
    "TransportResult",
    "averaged_diagnostics",
    "bianchi_residuals",
    "build_report",
    "catalog",
    "commutator_residual",
    "equation",
    "eval_averaged_equations",
    "eval_bianchi_residuals",
    "eval_commutation",
    "eval_geodesic_relations",
    "eval_structure_residuals",
    "horizontal_sample",
    "integrate_cone",
    "mass_aspect",
    "null_rates",
    "state_parameters",
    "transport_convergence",
]
