"""Commutators of projected null-frame derivatives on sample tensor fields.

A sample is a smooth spacetime tensor field projected onto the horizontal spaces,
so every nested derivative is evaluated pointwise through the frame calculus.
"""

import logging
from collections.abc import Callable
from typing import Literal

import numpy as np

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime.cone import ConeState
from nullgeo.spacetime.frames import TENSOR_LETTERS, FrameCalculus, NullPair, project
from nullgeo.structure.reports import ResidualReport, build_report, state_parameters

logger = logging.getLogger(__name__)

Commutator = Literal["4", "3", "34"]
FieldMap = Callable[[np.ndarray], np.ndarray]

COMMUTATOR_IDS: dict[str, str] = {
    "4": "commute_nabla4_angular",
    "3": "commute_nabla3_angular",
    "34": "commute_nabla3_nabla4",
}


def _radial(points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    x = points[..., 1:]
    radius = np.linalg.norm(x, axis=-1)
    return points[..., 0], x / radius[..., None], radius


def _scalar(points: np.ndarray) -> np.ndarray:
    time, unit, _ = _radial(points)
    return (3.0 * unit[..., 2] ** 2 - 1.0) * (1.0 + 0.1 * time) + unit[..., 0]


def _one_form(points: np.ndarray) -> np.ndarray:
    time, unit, _ = _radial(points)
    return np.stack(
        [
            0.2 * unit[..., 0],
            -unit[..., 1] + 0.1 * time,
            unit[..., 0] + 0.5 * unit[..., 2],
            unit[..., 0] * unit[..., 1],
        ],
        axis=-1,
    )


def _symmetric(points: np.ndarray) -> np.ndarray:
    first = _one_form(points)
    _, unit, _ = _radial(points)
    second = np.stack(
        [
            np.zeros_like(unit[..., 0]),
            unit[..., 2],
            np.ones_like(unit[..., 0]),
            unit[..., 0],
        ],
        axis=-1,
    )
    product = np.einsum("...a,...b->...ab", first, second)
    return product + np.swapaxes(product, -1, -2)


SAMPLE_FIELDS: dict[str, tuple[int, FieldMap]] = {
    "scalar": (0, _scalar),
    "one_form": (1, _one_form),
    "symmetric": (2, _symmetric),
}


def horizontal_sample(calculus: FrameCalculus, name: str) -> tuple[int, FieldMap]:
    """Return the rank and the horizontal projection of a registered sample.

    Raises:
        ConfigurationError: If the sample is unknown.
    """
    if name not in SAMPLE_FIELDS:
        choices = list(SAMPLE_FIELDS)
        raise ConfigurationError(f"unknown sample {name!r}; choose from {choices}")
    rank, raw = SAMPLE_FIELDS[name]

    def sample(points: np.ndarray) -> np.ndarray:
        return project(calculus.null_pair(points).projector, raw(points), rank)

    return rank, sample


def _error_term(
    coefficient: np.ndarray, values: np.ndarray, pair: NullPair, rank: int
) -> np.ndarray:
    """Return sum_i C_{a c b} F_{..b..}, c in slot i and the derivative index first.

    Coefficients of shape (..., a, c, b) act on every tensor slot of F; for the
    [nabla_3, nabla_4] commutator the derivative index is absent and the
    coefficient has shape (..., c, b).
    """
    batch = values.ndim - rank
    with_derivative = coefficient.ndim - batch == 3
    letters = TENSOR_LETTERS[:rank]
    total = np.zeros(1)
    for slot in range(rank):
        target = letters.replace(letters[slot], "c")
        source = letters.replace(letters[slot], "b")
        raised = np.einsum(
            f"...b{letters[slot]},...{letters}->...{source}",
            pair.horizontal_inverse,
            values,
        )
        if with_derivative:
            term = np.einsum(f"...zcb,...{source}->...z{target}", coefficient, raised)
        else:
            term = np.einsum(f"...cb,...{source}->...{target}", coefficient, raised)
        total = total + term
    return total


def _raised_dual(pair: NullPair, form: np.ndarray) -> np.ndarray:
    return np.einsum(
        "...ab,...bc,...c->...a", pair.area_form, pair.horizontal_inverse, form
    )


def commutator_residual(
    calculus: FrameCalculus,
    points: np.ndarray,
    sample: FieldMap,
    rank: int,
    which: Commutator,
    *,
    error_terms: bool = True,
) -> np.ndarray:
    """Return the pointwise residual of a commutator identity on a sample.

    Args:
        calculus (FrameCalculus): Frame calculus of the spacetime.
        points (np.ndarray): Points of shape (..., 4).
        sample (FieldMap): Horizontal tensor field of the given rank.
        rank (int): Rank of the sample.
        which (Commutator): ``4`` for [nabla_4, D], ``3`` for [nabla_3, D] and
            ``34`` for [nabla_3, nabla_4].
        error_terms (bool): Include the terms linear in F without derivatives.

    Returns:
        np.ndarray: Horizontal residual tensor.
    """
    if which not in COMMUTATOR_IDS:
        raise ConfigurationError(f"unknown commutator {which!r}")
    pair = calculus.null_pair(points)
    c = calculus.components(points)
    inverse = pair.horizontal_inverse
    letters = TENSOR_LETTERS[:rank]
    values = sample(points)

    def along(vector_of: Callable[[NullPair], np.ndarray]) -> FieldMap:
        def derivative(shifted: np.ndarray) -> np.ndarray:
            direction = vector_of(calculus.null_pair(shifted))
            return calculus.covariant(sample, shifted, rank, direction=direction)

        return derivative

    def angular(shifted: np.ndarray) -> np.ndarray:
        return calculus.covariant(sample, shifted, rank)

    def l_of(frame: NullPair) -> np.ndarray:
        return frame.l

    def lb_of(frame: NullPair) -> np.ndarray:
        return frame.lb

    grad = angular(points)
    nabla3 = calculus.covariant(sample, points, rank, direction=pair.lb)
    nabla4 = calculus.covariant(sample, points, rank, direction=pair.l)

    def times(form: np.ndarray, tensor: np.ndarray) -> np.ndarray:
        return np.einsum(f"...z,...{letters}->...z{letters}", form, tensor)

    def act(tensor: np.ndarray) -> np.ndarray:
        return np.einsum(
            f"...zm,...mn,...n{letters}->...z{letters}", tensor, inverse, grad
        )

    def pairs(first: np.ndarray, second: np.ndarray) -> np.ndarray:
        return np.einsum("...a,...b->...ab", first, second)

    def scale(scalar: np.ndarray, tensor: np.ndarray) -> np.ndarray:
        padding = (1,) * (tensor.ndim - scalar.ndim)
        return scalar.reshape(scalar.shape + padding) * tensor

    area = pair.area_form
    if which == "4":
        lhs = calculus.covariant(angular, points, rank + 1, direction=pair.l)
        lhs = lhs - calculus.covariant(along(l_of), points, rank)
        rhs = (
            scale(-0.5 * c["trchi"], grad)
            - act(c["chih"])
            + times(c["xi"], nabla3)
            + times(c["etab"] + c["zeta"], nabla4)
        )
        chi, chib, xi, etab = c["chi"], c["chib"], c["xi"], c["etab"]
        dual_beta = _raised_dual(pair, c["beta"])
        coefficient = (
            np.einsum("...ca,...b->...acb", chib, xi)
            - np.einsum("...ab,...c->...acb", chib, xi)
            + np.einsum("...ca,...b->...acb", chi, etab)
            - np.einsum("...ab,...c->...acb", chi, etab)
            + np.einsum("...cb,...a->...acb", area, dual_beta)
        )
    elif which == "3":
        lhs = calculus.covariant(angular, points, rank + 1, direction=pair.lb)
        lhs = lhs - calculus.covariant(along(lb_of), points, rank)
        rhs = (
            scale(-0.5 * c["trchib"], grad)
            - act(c["chibh"])
            + times(c["xib"], nabla4)
            + times(c["eta"] - c["zeta"], nabla3)
        )
        chi, chib, xib, eta = c["chi"], c["chib"], c["xib"], c["eta"]
        dual_betab = _raised_dual(pair, c["betab"])
        coefficient = (
            np.einsum("...ca,...b->...acb", chi, xib)
            - np.einsum("...ab,...c->...acb", chi, xib)
            + np.einsum("...ca,...b->...acb", chib, eta)
            - np.einsum("...ab,...c->...acb", chib, eta)
            - np.einsum("...cb,...a->...acb", area, dual_betab)
        )
    else:
        lhs = calculus.covariant(along(l_of), points, rank, direction=pair.lb)
        lhs = lhs - calculus.covariant(along(lb_of), points, rank, direction=pair.l)
        rhs = (
            scale(2.0 * c["omega"], nabla3)
            + scale(2.0 * c["omegab"], nabla4)
            + np.einsum(
                f"...m,...mn,...n{letters}->...{letters}",
                c["eta"] - c["etab"],
                inverse,
                grad,
            )
        )
        coefficient = 2.0 * (
            pairs(c["xi"], c["xib"])
            - pairs(c["xib"], c["xi"])
            + pairs(c["etab"], c["eta"])
            - pairs(c["eta"], c["etab"])
            + scale(c["sigma"], area)
        )
    if error_terms and rank > 0:
        rhs = rhs + _error_term(coefficient, values, pair, rank)
    return lhs - rhs


def eval_commutation(
    state: ConeState,
    sample: str = "one_form",
    which: Commutator = "4",
    *,
    error_terms: bool = True,
) -> ResidualReport:
    """Evaluate a commutator identity on a registered sample over a cone state.

    Args:
        state (ConeState): Snapshot supplying the adapter, points and steps.
        sample (str): One of ``scalar``, ``one_form`` or ``symmetric``.
        which (Commutator): The commutator to check.
        error_terms (bool): Include the zeroth-order terms; disabling them shows
            their contribution.

    Returns:
        ResidualReport: Report of the commutator residual restricted to the sphere.

    Raises:
        ConfigurationError: If the sample or commutator is unknown.
    """
    if which not in COMMUTATOR_IDS:
        raise ConfigurationError(
            f"unknown commutator {which!r}; choose from {list(COMMUTATOR_IDS)}"
        )
    calculus = state.calculus
    rank, field = horizontal_sample(calculus, sample)
    residual = commutator_residual(
        calculus, state.points, field, rank, which, error_terms=error_terms
    )
    parameters = {
        **state_parameters(state),
        "sample": sample,
        "error_terms": error_terms,
    }
    report = build_report(
        COMMUTATOR_IDS[which],
        state.restrict(residual, "commutator"),
        state.metric,
        parameters,
    )
    logger.info(
        "commutator %s on %s sample: Linf residual %.3e",
        which,
        sample,
        report.norms["Linf"],
    )
    return report
