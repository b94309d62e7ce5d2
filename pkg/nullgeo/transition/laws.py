"""Transformation laws of the null connection and curvature.

Predictions are expressed on the unprimed horizontal spaces and compared with the
primed components pulled back through the frame map. The primed frame is
expanded in f, fbar and d(log lambda), with lambda itself kept exact, and every
primed component is built from the unprimed connection coefficients and Riemann
tensor. The laws keep the terms linear in the transition; the error terms are
the quadratic ones. The mismatch with the primed frame is cubic in the size of
the transition with the error terms and quadratic without them.
"""

import itertools
import logging
from collections.abc import Callable, Sequence
from typing import Any

import numpy as np

from nullgeo.errors import NumericalFailure
from nullgeo.spacetime.adapters import MetricAdapter
from nullgeo.spacetime.cone import ConeState, extract_cone_state
from nullgeo.spacetime.curvature import left_dual
from nullgeo.spacetime.differences import fit_slope
from nullgeo.spacetime.frames import COMPONENTS, FrameCalculus, FrameSettings
from nullgeo.structure.reports import ResidualReport, build_report, state_parameters
from nullgeo.transition.coefficients import TransitionCoefficients
from nullgeo.transition.frames import TransformedCalculus, transition_at

logger = logging.getLogger(__name__)

LAWS: tuple[str, ...] = (
    "chi",
    "chib",
    "trchi",
    "trchib",
    "xi",
    "xib",
    "eta",
    "etab",
    "zeta",
    "omega",
    "omegab",
    "alpha",
    "beta",
    "rho",
    "sigma",
    "betab",
    "alphab",
)

DOT = "...m,...m->..."
TIMES = "...,...m->...m"
OUTER = "...a,...b->...ab"
GRADIENT = "...ad,...d->...a"


class Expansion:
    """Tensor field expanded in the size of a transition and cut at an order.

    terms[k] is homogeneous of degree k in (f, fbar, d log lambda); None marks a
    vanishing part.
    """

    def __init__(self, terms: Sequence[np.ndarray | None], order: int) -> None:
        """Initialise the expansion.

        Args:
            terms (Sequence[np.ndarray | None]): Parts by degree; parts beyond
                the order are dropped.
            order (int): Highest kept degree.
        """
        kept = list(terms)[: order + 1]
        self.order = order
        self.terms: list[np.ndarray | None] = kept + [None] * (order + 1 - len(kept))

    @classmethod
    def homogeneous(cls, value: np.ndarray, degree: int, order: int) -> "Expansion":
        """Return the expansion of a field of a single degree."""
        return cls([None] * degree + [value], order)

    def __add__(self, other: "Expansion") -> "Expansion":
        terms: list[np.ndarray | None] = []
        for mine, theirs in zip(self.terms, other.terms):
            if mine is None or theirs is None:
                terms.append(theirs if mine is None else mine)
            else:
                terms.append(mine + theirs)
        return Expansion(terms, min(self.order, other.order))

    def __mul__(self, factor: float) -> "Expansion":
        return Expansion(
            [None if term is None else factor * term for term in self.terms],
            self.order,
        )

    __rmul__ = __mul__

    def __neg__(self) -> "Expansion":
        return self * -1.0

    def __sub__(self, other: "Expansion") -> "Expansion":
        return self + -other

    def scaled(self, factor: np.ndarray) -> "Expansion":
        """Return the expansion multiplied by an exact scalar field."""
        terms: list[np.ndarray | None] = []
        for term in self.terms:
            if term is None:
                terms.append(None)
                continue
            padding = (1,) * (term.ndim - factor.ndim)
            terms.append(factor.reshape(factor.shape + padding) * term)
        return Expansion(terms, self.order)

    def total(self) -> np.ndarray:
        """Return the sum of the kept degrees."""
        present = [term for term in self.terms if term is not None]
        if not present:
            raise NumericalFailure("expansion has no terms to sum")
        return np.sum(present, axis=0)


def expand(subscripts: str, *factors: Expansion) -> Expansion:
    """Return the einsum of expansions, keeping degrees up to the lowest order."""
    order = min(factor.order for factor in factors)
    terms: list[np.ndarray | None] = [None] * (order + 1)
    for degrees in itertools.product(range(order + 1), repeat=len(factors)):
        degree = sum(degrees)
        if degree > order:
            continue
        parts = [factor.terms[k] for factor, k in zip(factors, degrees)]
        present = [part for part in parts if part is not None]
        if len(present) < len(parts):
            continue
        value = np.einsum(subscripts, *present)
        current = terms[degree]
        terms[degree] = value if current is None else current + value
    return Expansion(terms, order)


def _outer(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    return np.einsum(OUTER, first, second)


def frame_connection(
    components: dict[str, np.ndarray], l_low: np.ndarray, lb_low: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Return D_a l_b and D_a lbar_b rebuilt from the connection coefficients."""
    omega = components["omega"][..., None, None]
    omegab = components["omegab"][..., None, None]
    outgoing = (
        components["chi"]
        - _outer(components["zeta"], l_low)
        - _outer(lb_low, components["xi"])
        + omega * _outer(lb_low, l_low)
        - _outer(l_low, components["eta"])
        - omegab * _outer(l_low, l_low)
    )
    incoming = (
        components["chib"]
        + _outer(components["zeta"], lb_low)
        - _outer(lb_low, components["etab"])
        - omega * _outer(lb_low, lb_low)
        - _outer(l_low, components["xib"])
        + omegab * _outer(l_low, lb_low)
    )
    return outgoing, incoming


def predicted_components(
    calculus: FrameCalculus,
    coefficients: TransitionCoefficients,
    points: np.ndarray,
    *,
    error_terms: bool = True,
) -> dict[str, np.ndarray]:
    """Return the primed components predicted from the unprimed frame.

    Args:
        calculus (FrameCalculus): Calculus of the unprimed frame.
        coefficients (TransitionCoefficients): The frame change.
        points (np.ndarray): Points of shape (..., 4).
        error_terms (bool): Keep the terms quadratic in the transition.

    Returns:
        dict[str, np.ndarray]: Predictions on the unprimed horizontal spaces,
            keyed like LAWS.
    """
    order = 2 if error_terms else 1
    pair = calculus.null_pair(points)
    connection = calculus.connection(points)
    transition = transition_at(coefficients, pair, points)
    step = calculus.settings.step
    dl, dlb = frame_connection(connection, pair.l_low, pair.lb_low)

    def fixed(value: np.ndarray) -> Expansion:
        return Expansion.homogeneous(value, 0, order)

    def small(value: np.ndarray) -> Expansion:
        return Expansion.homogeneous(value, 1, order)

    def gradient(function: Callable[[np.ndarray], np.ndarray], rank: int) -> np.ndarray:
        # spacetime gradient of a horizontal field from its frame derivatives
        angular = calculus.covariant(function, points, rank, step=step)
        along_l = calculus.covariant(function, points, rank, pair.l, step)
        along_lb = calculus.covariant(function, points, rank, pair.lb, step)
        if rank == 0:
            return (
                angular
                - 0.5 * pair.lb_low * along_l[..., None]
                - 0.5 * pair.l_low * along_lb[..., None]
            )
        values = function(points)
        raised = np.einsum("...mn,...n->...m", pair.horizontal_inverse, values)
        return (
            angular
            - 0.5 * _outer(pair.lb_low, along_l)
            - 0.5 * _outer(pair.l_low, along_lb)
            + 0.5 * _outer(np.einsum(GRADIENT, dl, raised), pair.lb_low)
            + 0.5 * _outer(np.einsum(GRADIENT, dlb, raised), pair.l_low)
        )

    def outgoing(shifted: np.ndarray) -> np.ndarray:
        return coefficients.forms(calculus.null_pair(shifted), shifted)[0]

    def incoming(shifted: np.ndarray) -> np.ndarray:
        return coefficients.forms(calculus.null_pair(shifted), shifted)[1]

    l_low, lb_low = fixed(pair.l_low), fixed(pair.lb_low)
    l_up, lb_up = fixed(pair.l), fixed(pair.lb)
    dl_x, dlb_x = fixed(dl), fixed(dlb)
    f, fb = small(transition.f), small(transition.fb)
    f_up, fb_up = small(transition.f_up), small(transition.fb_up)
    df, dfb = small(gradient(outgoing, 1)), small(gradient(incoming, 1))
    d_log = small(gradient(coefficients.log_lambda, 0))

    f_f = expand(DOT, f_up, f)
    fb_fb = expand(DOT, fb_up, fb)
    weight = (
        fixed(np.ones_like(transition.lam))
        + 0.5 * expand(DOT, f_up, fb)
        + expand("...,...->...", f_f, fb_fb) * (1.0 / 16.0)
    )
    # l' / lambda and lambda lbar'
    out = l_low + f + 0.25 * expand(TIMES, f_f, lb_low)
    out_up = l_up + f_up + 0.25 * expand(TIMES, f_f, lb_up)
    inc = expand(TIMES, weight, lb_low) + fb + 0.25 * expand(TIMES, fb_fb, f + l_low)
    inc_up = (
        expand(TIMES, weight, lb_up)
        + fb_up
        + 0.25 * expand(TIMES, fb_fb, f_up + l_up)
    )
    frame = (
        fixed(pair.projector)
        + 0.5 * expand("...p,...m->...pm", f_up + l_up, fb)
        + expand(
            "...p,...m->...pm", lb_up, 0.5 * f + 0.125 * expand(TIMES, f_f, fb)
        )
    )

    d_f_f = 2.0 * expand(GRADIENT, df, f_up)
    d_fb_fb = 2.0 * expand(GRADIENT, dfb, fb_up)
    d_weight = 0.5 * (expand(GRADIENT, df, fb_up) + expand(GRADIENT, dfb, f_up)) + (
        expand("...a,...->...a", d_f_f, fb_fb) + expand("...a,...->...a", d_fb_fb, f_f)
    ) * (1.0 / 16.0)
    d_out = dl_x + df + 0.25 * (
        expand(OUTER, d_f_f, lb_low) + expand("...,...ab->...ab", f_f, dlb_x)
    )
    d_inc = (
        expand(OUTER, d_weight, lb_low)
        + expand("...,...ab->...ab", weight, dlb_x)
        + dfb
        + 0.25
        * (
            expand(OUTER, d_fb_fb, f + l_low)
            + expand("...,...ab->...ab", fb_fb, df + dl_x)
        )
    )

    lam = transition.lam
    l_primed = out_up.scaled(lam)
    lb_primed = inc_up.scaled(1.0 / lam)
    d_l_primed = (expand(OUTER, d_log, out) + d_out).scaled(lam)
    d_lb_primed = (d_inc - expand(OUTER, d_log, inc)).scaled(1.0 / lam)

    riemann = calculus.adapter.riemann(points, step * calculus.scale(points))
    curvature = fixed(riemann)
    dual = fixed(left_dual(pair.metric, riemann))
    pinch = "...rasc,...r,...s,...am,...cn->...mn"
    leg = "...abcd,...am,...b,...c,...d->...m"
    full = "...abcd,...a,...b,...c,...d->..."
    along = "...bn,...a,...ab->...n"
    expansions = {
        "chi": expand("...am,...bn,...ab->...mn", frame, frame, d_l_primed),
        "chib": expand("...am,...bn,...ab->...mn", frame, frame, d_lb_primed),
        "xi": 0.5 * expand(along, frame, l_primed, d_l_primed),
        "xib": 0.5 * expand(along, frame, lb_primed, d_lb_primed),
        "eta": 0.5 * expand(along, frame, lb_primed, d_l_primed),
        "etab": 0.5 * expand(along, frame, l_primed, d_lb_primed),
        "zeta": 0.5 * expand("...am,...ab,...b->...m", frame, d_l_primed, lb_primed),
        "omega": 0.25 * expand("...a,...ab,...b->...", l_primed, d_l_primed, lb_primed),
        "omegab": 0.25
        * expand("...a,...ab,...b->...", lb_primed, d_lb_primed, l_primed),
        "alpha": expand(pinch, curvature, l_primed, l_primed, frame, frame),
        "beta": 0.5 * expand(leg, curvature, frame, l_primed, lb_primed, l_primed),
        "rho": 0.25 * expand(full, curvature, lb_primed, l_primed, lb_primed, l_primed),
        "sigma": 0.25 * expand(full, dual, lb_primed, l_primed, lb_primed, l_primed),
        "betab": 0.5 * expand(leg, curvature, frame, lb_primed, lb_primed, l_primed),
        "alphab": expand(pinch, curvature, lb_primed, lb_primed, frame, frame),
    }
    totals = {name: expansion.total() for name, expansion in expansions.items()}
    for name in ("chi", "chib"):
        totals[f"tr{name}"] = np.einsum(
            "...mn,...mn->...", pair.horizontal_inverse, totals[name]
        )
    return {name: totals[name] for name in LAWS}


def direct_components(
    adapter: MetricAdapter,
    coefficients: TransitionCoefficients,
    points: np.ndarray,
    settings: FrameSettings | None = None,
) -> dict[str, np.ndarray]:
    """Return the primed components computed from the primed pair, pulled back.

    Raises:
        NumericalFailure: If the primed pair is not normalised.
    """
    calculus = TransformedCalculus(adapter, coefficients, settings)
    transition = calculus.transition(points)
    calculus.null_pair(points).check()
    values = calculus.components(points)
    result = {}
    for name in LAWS:
        rank = COMPONENTS[name][0]
        result[name] = transition.drop(values[name], rank)
    return result


def _check(state: ConeState, coefficients: TransitionCoefficients) -> None:
    coefficients.check(state.calculus.null_pair(state.points), state.points)


def transform_frame(
    state: ConeState,
    coefficients: TransitionCoefficients,
    *,
    error_terms: bool = True,
) -> ConeState:
    """Return the cone state of the primed frame predicted by the transformation laws.

    The predicted components are pulled back to the unprimed sphere, so the
    returned state shares grid, metric and points with the input.

    Args:
        state (ConeState): Unprimed cone state.
        coefficients (TransitionCoefficients): The frame change.
        error_terms (bool): Include the error terms of the laws.

    Returns:
        ConeState: The predicted primed components, keyed like LAWS.

    Raises:
        ConfigurationError: If the coefficients are too large.
    """
    _check(state, coefficients)
    predicted = predicted_components(
        state.calculus, coefficients, state.points, error_terms=error_terms
    )
    fields = {
        name: state.restrict(values, f"{name}'")
        for name, values in predicted.items()
    }
    return ConeState(
        state.adapter,
        state.u,
        state.ubar,
        state.metric,
        state.points,
        fields,
        settings=state.settings,
        tangents=state.tangents,
    )


def transition_mismatch(
    state: ConeState,
    coefficients: TransitionCoefficients,
    *,
    error_terms: bool = True,
) -> dict[str, ResidualReport]:
    """Compare the predicted primed components with the directly computed ones.

    Returns:
        dict[str, ResidualReport]: Reports keyed by component name.

    Raises:
        ConfigurationError: If the coefficients are too large.
        NumericalFailure: If the primed pair is not normalised.
    """
    _check(state, coefficients)
    predicted = predicted_components(
        state.calculus, coefficients, state.points, error_terms=error_terms
    )
    direct = direct_components(
        state.adapter, coefficients, state.points, state.settings
    )
    parameters: dict[str, Any] = {
        **state_parameters(state),
        "lapse": coefficients.lapse,
        "outgoing": coefficients.outgoing,
        "incoming": coefficients.incoming,
        "error_terms": error_terms,
    }
    reports = {}
    for name in LAWS:
        residual = state.restrict(predicted[name] - direct[name], f"{name}'")
        reports[name] = build_report(
            f"transition_{name}", residual, state.metric, parameters
        )
    worst = max(reports.values(), key=lambda report: report.norms["Linf"])
    logger.info(
        "frame transition of size (%g, %g, %g): worst mismatch %s = %.3e",
        coefficients.lapse,
        coefficients.outgoing,
        coefficients.incoming,
        worst.id,
        worst.norms["Linf"],
    )
    return reports


def transition_slopes(
    adapter: MetricAdapter,
    u: float,
    ubar: float,
    sizes: Sequence[float] = (2e-2, 5e-3),
    *,
    error_terms: bool = True,
    band_limit: int = 6,
    settings: FrameSettings | None = None,
) -> dict[str, float]:
    """Fit the order of the mismatch in the size of generic coefficients.

    Components whose mismatch vanishes at some size get a NaN slope.

    Returns:
        dict[str, float]: Log-log slope of the sup mismatch, keyed like LAWS.
    """
    state = extract_cone_state(
        adapter, u, ubar, band_limit, transverse=False, settings=settings
    )
    mismatches: dict[str, list[float]] = {name: [] for name in LAWS}
    for size in sizes:
        reports = transition_mismatch(
            state, TransitionCoefficients.generic(size), error_terms=error_terms
        )
        for name, report in reports.items():
            mismatches[name].append(report.norms["Linf"])
    slopes = {}
    for name, values in mismatches.items():
        try:
            slopes[name] = fit_slope(sizes, values)
        except NumericalFailure:
            logger.warning("no slope for %s: mismatch vanishes", name)
            slopes[name] = float("nan")
    return slopes
