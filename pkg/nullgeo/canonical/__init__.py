from nullgeo.canonical.background import (
    BACKGROUNDS,
    ConeBackground,
    GeodesicFields,
    MinkowskiBackground,
    Sources,
    SyntheticBackground,
    background_from_adapter,
    load_background,
)
from nullgeo.canonical.iteration import (
    CanonicalFoliation,
    CanonicalSettings,
    ConeGrid,
    FoliationIterate,
    picard_step,
    solve_canonical,
    stability_threshold,
    verify_canonical_conditions,
    weighted_norm,
)

__all__ = [
    "BACKGROUNDS",
    "CanonicalFoliation",
    "CanonicalSettings",
    "ConeBackground",
    "ConeGrid",
    "FoliationIterate",
    "GeodesicFields",
    "MinkowskiBackground",
    "Sources",
    "SyntheticBackground",
    "background_from_adapter",
    "load_background",
    "picard_step",
    "solve_canonical",
    "stability_threshold",
    "verify_canonical_conditions",
    "weighted_norm",
]
