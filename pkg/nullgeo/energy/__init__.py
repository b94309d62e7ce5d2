from nullgeo.energy.bel_robinson import (
    MULTIPLIERS,
    NullVector,
    bel_robinson_contract,
    bel_robinson_divergence,
    bel_robinson_tensor,
    multiplier,
    null_expansion,
)
from nullgeo.energy.currents import WeylCurrent, modified_lie_derivative, weyl_current
from nullgeo.energy.deformation import (
    DEFORMATION_FIELDS,
    DeformationData,
    deformation_oracle,
    deformation_tensors,
    vector_field,
)
from nullgeo.energy.fluxes import (
    ConeFlux,
    FluxReport,
    SphereCharges,
    commuted_weyl_field,
    cone_flux,
    energy_flux,
    expansion_report,
    mass_momentum,
)
from nullgeo.energy.rotations import (
    RotationFields,
    cartesian_functions,
    commutator_identity,
    rotation_fields,
)
from nullgeo.energy.weyl import WEYL_COMPONENTS, WeylField, reconstruct, weyl_field

__all__ = [
    "DEFORMATION_FIELDS",
    "MULTIPLIERS",
    "WEYL_COMPONENTS",
    "ConeFlux",
    "DeformationData",
    "FluxReport",
    "NullVector",
    "RotationFields",
    "SphereCharges",
    "WeylCurrent",
    "WeylField",
    "bel_robinson_contract",
    "bel_robinson_divergence",
    "bel_robinson_tensor",
    "cartesian_functions",
    "commutator_identity",
    "commuted_weyl_field",
    "cone_flux",
    "deformation_oracle",
    "deformation_tensors",
    "energy_flux",
    "expansion_report",
    "mass_momentum",
    "modified_lie_derivative",
    "multiplier",
    "null_expansion",
    "reconstruct",
    "rotation_fields",
    "vector_field",
    "weyl_current",
    "weyl_field",
]
