"""Pointwise change of null frame and the maps between the two horizontal spaces.

A transition (lambda, f, fbar) relative to a null pair (l, lbar) produces

    l' = lambda (l + f + 1/4 |f|^2 lbar),
    lbar' = lambda^-1 ((1 + 1/2 f.fbar + 1/16 |f|^2 |fbar|^2) lbar + fbar
            + 1/4 |fbar|^2 f + 1/4 |fbar|^2 l),
    e'_a = e_a + 1/2 fbar_a f + 1/2 fbar_a l + (1/2 f_a + 1/8 |f|^2 fbar_a) lbar.

The linear map e_a -> e'_a is an isometry between the horizontal spaces; pulling
a primed tensor back through it is the dagger operation, pushing a tensor forward
is the double dagger.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from nullgeo.errors import NumericalFailure
from nullgeo.spacetime.adapters import MetricAdapter
from nullgeo.spacetime.frames import (
    FrameCalculus,
    FrameSettings,
    NullPair,
    norm_squared,
    project,
)
from nullgeo.transition.coefficients import TransitionCoefficients

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Transition:
    """Transition coefficients at a batch of points.

    Attributes:
        pair (NullPair): Unprimed null pair.
        lam (np.ndarray): lambda > 0.
        f (np.ndarray): Lowered horizontal 1-form f.
        fb (np.ndarray): Lowered horizontal 1-form fbar.
    """

    pair: NullPair
    lam: np.ndarray
    f: np.ndarray
    fb: np.ndarray

    def _raise(self, form: np.ndarray) -> np.ndarray:
        return np.einsum("...mn,...n->...m", self.pair.horizontal_inverse, form)

    @cached_property
    def f_up(self) -> np.ndarray:
        """Return f as a vector."""
        return self._raise(self.f)

    @cached_property
    def fb_up(self) -> np.ndarray:
        """Return fbar as a vector."""
        return self._raise(self.fb)

    @cached_property
    def f_squared(self) -> np.ndarray:
        """Return |f|^2."""
        return norm_squared(self.pair, self.f, 1)

    @cached_property
    def fb_squared(self) -> np.ndarray:
        """Return |fbar|^2."""
        return norm_squared(self.pair, self.fb, 1)

    @cached_property
    def f_dot_fb(self) -> np.ndarray:
        """Return f . fbar."""
        return np.einsum("...m,...m->...", self.f_up, self.fb)

    @cached_property
    def frame_map(self) -> np.ndarray:
        """Return T^p_m with T(e_a) = e'_a and T(l) = T(lbar) = 0."""
        pair = self.pair
        leg = 0.5 * self.f + 0.125 * self.f_squared[..., None] * self.fb
        return (
            pair.projector
            + 0.5 * np.einsum("...p,...m->...pm", self.f_up + pair.l, self.fb)
            + np.einsum("...p,...m->...pm", pair.lb, leg)
        )

    @cached_property
    def primed_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (l', lbar')."""
        pair = self.pair
        lam = self.lam[..., None]
        f_squared = self.f_squared[..., None]
        fb_squared = self.fb_squared[..., None]
        outgoing = lam * (pair.l + self.f_up + 0.25 * f_squared * pair.lb)
        weight = 1.0 + 0.5 * self.f_dot_fb + self.f_squared * self.fb_squared / 16.0
        incoming = (
            weight[..., None] * pair.lb
            + self.fb_up
            + 0.25 * fb_squared * self.f_up
            + 0.25 * fb_squared * pair.l
        ) / lam
        return outgoing, incoming

    def primed_pair(self, dub: np.ndarray) -> NullPair:
        """Return the primed null pair, with y' = lbar'(ubar) from the differential."""
        outgoing, incoming = self.primed_vectors
        pair = self.pair
        return NullPair(
            pair.metric,
            pair.inverse,
            outgoing,
            incoming,
            np.einsum("...m,...m->...", dub, incoming),
            pair.lapse,
        )

    def drop(self, values: np.ndarray, rank: int) -> np.ndarray:
        """Return the pull back of a primed horizontal tensor to the unprimed spaces."""
        return project(self.frame_map, values, rank)

    def lift(self, values: np.ndarray, rank: int) -> np.ndarray:
        """Return the push forward of an unprimed horizontal tensor."""
        pair = self.pair
        push = np.einsum(
            "...am,...qm,...qp->...ap",
            pair.horizontal_inverse,
            self.frame_map,
            pair.metric,
        )
        return project(push, values, rank)


def transition_at(
    coefficients: TransitionCoefficients, pair: NullPair, points: np.ndarray
) -> Transition:
    """Evaluate transition coefficients relative to a null pair."""
    outgoing, incoming = coefficients.forms(pair, points)
    return Transition(pair, np.exp(coefficients.log_lambda(points)), outgoing, incoming)


def recover_transition(
    pair: NullPair, outgoing: np.ndarray, incoming: np.ndarray
) -> Transition:
    """Return the coefficients taking a null pair to another normalised pair.

    lambda = -1/2 g(l', lbar) and f = Pi(l') / lambda close the outgoing leg;
    fbar solves fbar + 1/4 |fbar|^2 f = lambda Pi(lbar'), a quadratic in |fbar|^2
    whose small root is taken.

    Raises:
        NumericalFailure: If the incoming leg admits no solution.
    """
    lam = -0.5 * np.einsum("...m,...m->...", outgoing, pair.lb_low)
    if np.any(~(lam > 0.0)):
        raise NumericalFailure("primed outgoing leg is not future directed")
    lowered_out = np.einsum("...mn,...n->...m", pair.metric, outgoing)
    lowered_in = np.einsum("...mn,...n->...m", pair.metric, incoming)
    f = project(pair.projector, lowered_out, 1) / lam[..., None]
    target = lam[..., None] * project(pair.projector, lowered_in, 1)

    inverse = pair.horizontal_inverse
    f_squared = norm_squared(pair, f, 1)
    target_squared = norm_squared(pair, target, 1)
    linear = 1.0 + 0.5 * np.einsum("...mn,...m,...n->...", inverse, target, f)
    discriminant = linear**2 - 0.25 * f_squared * target_squared
    if np.any(discriminant < 0.0):
        raise NumericalFailure("incoming leg is outside the range of the transition")
    fb_squared = 2.0 * target_squared / (linear + np.sqrt(discriminant))
    fb = target - 0.25 * fb_squared[..., None] * f
    return Transition(pair, lam, f, fb)


def composition_defect(
    adapter: MetricAdapter,
    points: np.ndarray,
    first: TransitionCoefficients,
    second: TransitionCoefficients,
) -> float:
    """Return how far two successive transitions are from their naive composite.

    The second transition acts on the frame produced by the first; the composite
    is recovered from the final pair and compared with (lambda_1 lambda_2,
    f_1 + f_2, fbar_1 + fbar_2), the second coefficients projected back onto the
    unprimed spaces.
    """
    calculus = FrameCalculus(adapter)
    pair = calculus.null_pair(points)
    _, _, _, dub = adapter.foliation(points)
    initial = transition_at(first, pair, points)
    middle = initial.primed_pair(dub)
    following = transition_at(second, middle, points)
    final = following.primed_pair(dub)
    composite = recover_transition(pair, final.l, final.lb)

    def gap(form: np.ndarray) -> float:
        return float(np.sqrt(np.max(norm_squared(pair, form, 1))))

    projector = pair.projector
    defects = (
        float(np.max(np.abs(composite.lam - initial.lam * following.lam))),
        gap(composite.f - initial.f - project(projector, following.f, 1)),
        gap(composite.fb - initial.fb - project(projector, following.fb, 1)),
    )
    logger.debug("composition defects (lambda, f, fbar) = %s", defects)
    return max(defects)


class TransformedCalculus(FrameCalculus):
    """Frame calculus of the null pair obtained by a transition.

    Every connection coefficient and curvature component is computed directly
    from the primed pair, so it is independent of the transformation laws.
    """

    def __init__(
        self,
        adapter: MetricAdapter,
        coefficients: TransitionCoefficients,
        settings: FrameSettings | None = None,
    ) -> None:
        """Initialise the transformed calculus.

        Args:
            adapter (MetricAdapter): Spacetime and its double foliation.
            coefficients (TransitionCoefficients): Transition applied to the
                adapter's null pair.
            settings (FrameSettings | None): Finite-difference steps.
        """
        super().__init__(adapter, settings)
        self.coefficients = coefficients

    def base_pair(self, points: np.ndarray) -> NullPair:
        """Return the unprimed pair."""
        return super().null_pair(points)

    def transition(self, points: np.ndarray) -> Transition:
        """Return the transition at the points."""
        return transition_at(self.coefficients, self.base_pair(points), points)

    def null_pair(self, points: np.ndarray) -> NullPair:
        """Return the primed pair."""
        _, _, _, dub = self.adapter.foliation(points)
        return self.transition(points).primed_pair(dub)
