from nullgeo.hodge.operators import (
    EstimateReport,
    HodgeSystem,
    RoundInverse,
    SolveReport,
    apply,
    inner_product,
    solve,
    solve_with_report,
    verify_elliptic_estimate,
)

__all__ = [
    "EstimateReport",
    "HodgeSystem",
    "RoundInverse",
    "SolveReport",
    "apply",
    "inner_product",
    "solve",
    "solve_with_report",
    "verify_elliptic_estimate",
]
