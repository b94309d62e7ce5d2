"""Transition formulas for projected covariant derivatives of primed tensors."""

import logging

import numpy as np

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime.cone import ConeState
from nullgeo.spacetime.frames import TENSOR_LETTERS, project
from nullgeo.structure.commutation import SAMPLE_FIELDS
from nullgeo.structure.reports import ResidualReport, build_report, state_parameters
from nullgeo.transition.coefficients import TransitionCoefficients
from nullgeo.transition.frames import TransformedCalculus

logger = logging.getLogger(__name__)

DERIVATIVE_IDS: dict[str, str] = {
    "4": "transition_nabla4",
    "angular": "transition_angular",
    "3": "transition_nabla3",
}


def transform_derivatives(
    state: ConeState,
    coefficients: TransitionCoefficients,
    sample: str = "one_form",
) -> dict[str, ResidualReport]:
    """Check the derivative transitions on a sample tangent to the primed spheres.

    With F' the sample projected onto the primed horizontal spaces and F its pull
    back, nabla_4 F, D F and nabla_3 F are computed in the unprimed frame and
    compared with the primed derivatives of F' corrected by the first-order
    frame terms.

    Args:
        state (ConeState): Unprimed cone state.
        coefficients (TransitionCoefficients): The frame change.
        sample (str): Name of a registered sample.

    Returns:
        dict[str, ResidualReport]: Reports keyed by "4", "angular" and "3".

    Raises:
        ConfigurationError: If the sample is unknown or the coefficients too large.
    """
    if sample not in SAMPLE_FIELDS:
        choices = list(SAMPLE_FIELDS)
        raise ConfigurationError(f"unknown sample {sample!r}; choose from {choices}")
    rank, raw = SAMPLE_FIELDS[sample]
    points = state.points
    base = state.calculus
    primed = TransformedCalculus(state.adapter, coefficients, state.settings)
    coefficients.check(base.null_pair(points), points)

    def tensor(shifted: np.ndarray) -> np.ndarray:
        return project(primed.null_pair(shifted).projector, raw(shifted), rank)

    def pulled(shifted: np.ndarray) -> np.ndarray:
        return primed.transition(shifted).drop(tensor(shifted), rank)

    transition = primed.transition(points)
    pair, primed_pair = transition.pair, primed.null_pair(points)
    f, fb = transition.f, transition.fb
    f_squared, fb_squared = transition.f_squared, transition.fb_squared

    nabla4 = base.covariant(pulled, points, rank, direction=pair.l)
    nabla3 = base.covariant(pulled, points, rank, direction=pair.lb)
    angular = base.covariant(pulled, points, rank)
    primed4 = transition.drop(
        primed.covariant(tensor, points, rank, direction=primed_pair.l), rank
    )
    primed3 = transition.drop(
        primed.covariant(tensor, points, rank, direction=primed_pair.lb), rank
    )
    primed_angular = transition.drop(primed.covariant(tensor, points, rank), rank + 1)

    letters = TENSOR_LETTERS[:rank]

    def along(form: np.ndarray) -> np.ndarray:
        vector = np.einsum("...mn,...n->...m", pair.horizontal_inverse, form)
        return np.einsum(f"...z,...z{letters}->...{letters}", vector, angular)

    def outer(form: np.ndarray, values: np.ndarray) -> np.ndarray:
        return np.einsum(f"...z,...{letters}->...z{letters}", form, values)

    def weighted(weight: np.ndarray, values: np.ndarray) -> np.ndarray:
        return weight.reshape(weight.shape + (1,) * rank) * values

    lam = transition.lam
    leg = 0.5 * f + 0.125 * f_squared[..., None] * fb
    mixed = 0.5 * transition.f_dot_fb + f_squared * fb_squared / 16.0
    residuals = {
        "4": nabla4
        - (
            weighted(1.0 / lam, primed4)
            - along(f)
            - weighted(0.25 * f_squared, nabla3)
        ),
        "angular": angular
        - (
            primed_angular
            - 0.5 * outer(fb, along(f))
            - 0.5 * outer(fb, nabla4)
            - outer(leg, nabla3)
        ),
        "3": nabla3
        - (
            weighted(lam, primed3)
            - weighted(mixed, nabla3)
            - along(fb + 0.25 * fb_squared[..., None] * f)
            - weighted(0.25 * fb_squared, nabla4)
        ),
    }
    parameters = {
        **state_parameters(state),
        "sample": sample,
        "lapse": coefficients.lapse,
        "outgoing": coefficients.outgoing,
        "incoming": coefficients.incoming,
    }
    reports = {}
    for which, values in residuals.items():
        residual = state.restrict(values, DERIVATIVE_IDS[which])
        reports[which] = build_report(
            DERIVATIVE_IDS[which], residual, state.metric, parameters
        )
        logger.debug(
            "%s residual %.3e", DERIVATIVE_IDS[which], reports[which].norms["Linf"]
        )
    return reports
