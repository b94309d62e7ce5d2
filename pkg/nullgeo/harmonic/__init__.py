from nullgeo.harmonic.boundary import (
    BoundaryData,
    conformal_factor,
    mobius,
    uniformise_boundary,
)
from nullgeo.harmonic.certificate import (
    BochnerCertificate,
    DiffeomorphismReport,
    IdentityBalance,
    bochner_certificate,
    diffeomorphism_check,
)
from nullgeo.harmonic.dirichlet import (
    DirichletSettings,
    HarmonicSolution,
    radial_reference,
    reference_solution,
    ricci_norm,
    solve_dirichlet,
)
from nullgeo.harmonic.mesh import DiskField, DiskMesh, chebyshev, clenshaw_curtis
from nullgeo.harmonic.metrics import (
    DISK_METRICS,
    ConformalBump,
    DiskMetric,
    FlatDisk,
    MobiusDisk,
    TracelessBump,
    load_disk_metric,
)

__all__ = [
    "DISK_METRICS",
    "BochnerCertificate",
    "BoundaryData",
    "ConformalBump",
    "DiffeomorphismReport",
    "DirichletSettings",
    "DiskField",
    "DiskMesh",
    "DiskMetric",
    "FlatDisk",
    "HarmonicSolution",
    "IdentityBalance",
    "MobiusDisk",
    "TracelessBump",
    "bochner_certificate",
    "chebyshev",
    "clenshaw_curtis",
    "conformal_factor",
    "diffeomorphism_check",
    "load_disk_metric",
    "mobius",
    "radial_reference",
    "reference_solution",
    "ricci_norm",
    "solve_dirichlet",
    "uniformise_boundary",
]
