from nullgeo.transition.boundary import boundary_transition
from nullgeo.transition.coefficients import MAX_SIZE, TransitionCoefficients
from nullgeo.transition.derivatives import DERIVATIVE_IDS, transform_derivatives
from nullgeo.transition.frames import (
    Transition,
    TransformedCalculus,
    composition_defect,
    recover_transition,
    transition_at,
)
from nullgeo.transition.laws import (
    LAWS,
    direct_components,
    predicted_components,
    transform_frame,
    transition_mismatch,
    transition_slopes,
)

__all__ = [
    "DERIVATIVE_IDS",
    "LAWS",
    "MAX_SIZE",
    "TransformedCalculus",
    "Transition",
    "TransitionCoefficients",
    "boundary_transition",
    "composition_defect",
    "direct_components",
    "predicted_components",
    "recover_transition",
    "transform_derivatives",
    "transform_frame",
    "transition_at",
    "transition_mismatch",
    "transition_slopes",
]
