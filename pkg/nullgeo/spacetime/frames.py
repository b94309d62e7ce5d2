"""Pointwise null-frame calculus on batches of spacetime points.

Horizontal quantities are stored as covariant spacetime tensors annihilated by
l and lbar, so they can be differenced along any direction and restricted to the
spheres afterwards. Index 3 refers to lbar and index 4 to l.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.spacetime.adapters import MetricAdapter
from nullgeo.spacetime.curvature import left_dual, volume_form
from nullgeo.spacetime.differences import directional, directional_fields, jacobian

logger = logging.getLogger(__name__)

Transverse = Literal["3", "4"]
NORMALISATION_TOLERANCE = 1e-10

TENSOR_LETTERS = "mnpq"

# name -> (rank, symmetric, traceless)
COMPONENTS: dict[str, tuple[int, bool, bool]] = {
    "chi": (2, True, False),
    "chib": (2, True, False),
    "trchi": (0, False, False),
    "trchib": (0, False, False),
    "chih": (2, True, True),
    "chibh": (2, True, True),
    "xi": (1, False, False),
    "xib": (1, False, False),
    "eta": (1, False, False),
    "etab": (1, False, False),
    "zeta": (1, False, False),
    "omega": (0, False, False),
    "omegab": (0, False, False),
    "y": (0, False, False),
    "alpha": (2, True, True),
    "alphab": (2, True, True),
    "beta": (1, False, False),
    "betab": (1, False, False),
    "rho": (0, False, False),
    "sigma": (0, False, False),
}


@dataclass(frozen=True)
class FrameSettings:
    """Finite-difference steps of the frame calculus, relative to max(|x|, 1).

    Attributes:
        step (float): Step for derivatives of the null pair and the connection.
        transverse_step (float): Step for derivatives of frame components.
    """

    step: float = 1e-3
    transverse_step: float = 1e-2

    def __post_init__(self) -> None:
        """Reject non-positive steps."""
        if not (self.step > 0.0 and self.transverse_step > 0.0):
            raise ConfigurationError(
                f"frame steps must be positive, got {self.step} and "
                f"{self.transverse_step}"
            )


@dataclass(frozen=True, eq=False)
class NullPair:
    """Null pair (l, lbar) adapted to the spheres S(u, ubar) at a batch of points.

    Attributes:
        metric (np.ndarray): g_mn.
        inverse (np.ndarray): g^mn.
        l (np.ndarray): Outgoing null vector with l(ubar) = 2.
        lb (np.ndarray): Incoming null vector with lbar(u) = 2.
        y (np.ndarray): Optical defect lbar(ubar).
        lapse (np.ndarray): Null lapse -2 / g(du, dubar).
    """

    metric: np.ndarray
    inverse: np.ndarray
    l: np.ndarray
    lb: np.ndarray
    y: np.ndarray
    lapse: np.ndarray

    @cached_property
    def l_low(self) -> np.ndarray:
        """Return l lowered."""
        return np.einsum("...mn,...n->...m", self.metric, self.l)

    @cached_property
    def lb_low(self) -> np.ndarray:
        """Return lbar lowered."""
        return np.einsum("...mn,...n->...m", self.metric, self.lb)

    @cached_property
    def projector(self) -> np.ndarray:
        """Return Pi^a_m = delta + 1/2 l^a lbar_m + 1/2 lbar^a l_m."""
        return (
            np.eye(4)
            + 0.5 * np.einsum("...a,...m->...am", self.l, self.lb_low)
            + 0.5 * np.einsum("...a,...m->...am", self.lb, self.l_low)
        )

    @cached_property
    def horizontal_metric(self) -> np.ndarray:
        """Return the induced sphere metric as a covariant spacetime tensor."""
        return self.metric + 0.5 * (
            np.einsum("...m,...n->...mn", self.l_low, self.lb_low)
            + np.einsum("...m,...n->...mn", self.lb_low, self.l_low)
        )

    @cached_property
    def horizontal_inverse(self) -> np.ndarray:
        """Return the inverse sphere metric as a contravariant spacetime tensor."""
        return self.inverse + 0.5 * (
            np.einsum("...m,...n->...mn", self.l, self.lb)
            + np.einsum("...m,...n->...mn", self.lb, self.l)
        )

    @cached_property
    def area_form(self) -> np.ndarray:
        """Return the sphere area form eps_mn = 1/2 e(lbar, l, m, n)."""
        return 0.5 * np.einsum(
            "...abmn,...a,...b->...mn", volume_form(self.metric), self.lb, self.l
        )

    def check(self, tolerance: float = NORMALISATION_TOLERANCE) -> None:
        """Verify g(l, lbar) = -2 and g(l, l) = g(lbar, lbar) = 0.

        Raises:
            NumericalFailure: If a normalisation fails beyond tolerance.
        """
        checks = {
            "g(l, lbar) + 2": np.einsum("...m,...m->...", self.l_low, self.lb) + 2.0,
            "g(l, l)": np.einsum("...m,...m->...", self.l_low, self.l),
            "g(lbar, lbar)": np.einsum("...m,...m->...", self.lb_low, self.lb),
        }
        for label, values in checks.items():
            worst = float(np.max(np.abs(values)))
            if worst > tolerance:
                raise NumericalFailure(
                    f"null pair normalisation {label} = {worst:.3e} exceeds "
                    f"{tolerance:.1e}"
                )


def null_pair_from_differentials(
    metric: np.ndarray, du: np.ndarray, dub: np.ndarray
) -> NullPair:
    """Return the null pair normal to the level sets of (u, ubar).

    The outgoing leg is the null combination of -Du and -Dubar closest to -Du,
    scaled to l(ubar) = 2; the incoming leg completes it with g(l, lbar) = -2.
    For optical u this gives l = -Du and lbar = -Dubar - 1/2 y l.

    Raises:
        NumericalFailure: If the normal plane is not Lorentzian.
    """
    inverse = np.linalg.inv(metric)
    outgoing = -np.einsum("...mn,...n->...m", inverse, du)
    incoming = -np.einsum("...mn,...n->...m", inverse, dub)
    g_aa = np.einsum("...m,...m->...", du, -outgoing)
    g_ab = np.einsum("...m,...m->...", dub, -outgoing)
    g_bb = np.einsum("...m,...m->...", dub, -incoming)

    discriminant = g_ab**2 - g_aa * g_bb
    if np.any(discriminant <= 0.0) or np.any(g_ab == 0.0):
        raise NumericalFailure("sphere normal bundle is not Lorentzian")
    root = -g_aa / (g_ab + np.sign(g_ab) * np.sqrt(discriminant))
    null = outgoing + root[..., None] * incoming
    l = 2.0 * null / np.einsum("...m,...m->...", dub, null)[..., None]

    l_low = np.einsum("...mn,...n->...m", metric, l)
    b_l = np.einsum("...m,...m->...", l_low, incoming)
    shifted = incoming - (g_bb / (2.0 * b_l))[..., None] * l
    lb = -2.0 * shifted / np.einsum("...m,...m->...", l_low, shifted)[..., None]

    y = np.einsum("...m,...m->...", dub, lb)
    return NullPair(metric, inverse, l, lb, y, -2.0 / g_ab)


def norm_squared(pair: NullPair, values: np.ndarray, rank: int) -> np.ndarray:
    """Return the pointwise squared sphere norm of a horizontal tensor."""
    if rank == 0:
        return values**2
    inverse = pair.horizontal_inverse
    if rank == 1:
        return np.einsum("...mn,...m,...n->...", inverse, values, values)
    return np.einsum("...mp,...nq,...mn,...pq->...", inverse, inverse, values, values)


def project(projector: np.ndarray, values: np.ndarray, rank: int) -> np.ndarray:
    """Project every covariant index of a rank-``rank`` tensor with Pi."""
    result = values
    for index in range(rank):
        letters = TENSOR_LETTERS[:rank]
        source = letters.replace(letters[index], "a")
        result = np.einsum(
            f"...a{letters[index]},...{source}->...{letters}", projector, result
        )
    return result


def connection_terms(
    gamma: np.ndarray,
    values: np.ndarray,
    rank: int,
    direction: np.ndarray | None,
) -> np.ndarray:
    """Return sum_i Gamma^d_{a m_i} T_{...d...}, contracted with direction if given."""
    letters = TENSOR_LETTERS[:rank]
    total = np.zeros(1)
    for index in range(rank):
        source = letters.replace(letters[index], "d")
        if direction is None:
            term = np.einsum(
                f"...da{letters[index]},...{source}->...a{letters}", gamma, values
            )
        else:
            term = np.einsum(
                f"...z,...dz{letters[index]},...{source}->...{letters}",
                direction,
                gamma,
                values,
            )
        total = total + term
    return total


def null_curvature(pair: NullPair, lowered: np.ndarray) -> dict[str, np.ndarray]:
    """Return alpha, beta, rho, sigma, betab and alphab of a 4-tensor.

    Args:
        pair (NullPair): Frame of the decomposition.
        lowered (np.ndarray): Covariant tensor W_abcd with the Riemann symmetries.

    Returns:
        dict[str, np.ndarray]: Components as horizontal spacetime tensors.
    """
    dual = left_dual(pair.metric, lowered)
    proj = pair.projector
    l, lb = pair.l, pair.lb

    def pinch(vector: np.ndarray) -> np.ndarray:
        tensor = np.einsum("...rasc,...r,...s->...ac", lowered, vector, vector)
        return np.einsum("...am,...cn,...ac->...mn", proj, proj, tensor)

    def contract(tensor: np.ndarray, *vectors: np.ndarray) -> np.ndarray:
        return np.einsum("...abcd,...b,...c,...d->...a", tensor, *vectors)

    return {
        "alpha": pinch(l),
        "alphab": pinch(lb),
        "beta": 0.5 * np.einsum("...am,...a->...m", proj, contract(lowered, l, lb, l)),
        "betab": 0.5
        * np.einsum("...am,...a->...m", proj, contract(lowered, lb, lb, l)),
        "rho": 0.25 * np.einsum("...a,...a->...", contract(lowered, l, lb, l), lb),
        "sigma": 0.25 * np.einsum("...a,...a->...", contract(dual, l, lb, l), lb),
    }


class FrameCalculus:
    """Connection coefficients, curvature components and projected derivatives.

    The sphere foliation is given by the adapter's pair of foliation functions.
    When u is optical the pair reduces to l = -Du and lbar = -Dubar - 1/2 y l.
    """

    def __init__(
        self, adapter: MetricAdapter, settings: FrameSettings | None = None
    ) -> None:
        """Initialise the frame calculus.

        Args:
            adapter (MetricAdapter): Spacetime supplying metric and foliation.
            settings (FrameSettings | None): Finite-difference steps.
        """
        self.adapter = adapter
        self.settings = settings or FrameSettings()

    def scale(self, points: np.ndarray) -> np.ndarray:
        """Return the per-point length scale max(|x|, 1)."""
        return np.maximum(np.linalg.norm(points[..., 1:], axis=-1), 1.0)

    def null_pair(self, points: np.ndarray) -> NullPair:
        """Return the null pair of the spheres through the points.

        Raises:
            NumericalFailure: If the foliation differentials are degenerate.
        """
        _, _, du, dub = self.adapter.foliation(points)
        return null_pair_from_differentials(self.adapter.metric(points), du, dub)

    def _pair_vectors(self, points: np.ndarray) -> np.ndarray:
        pair = self.null_pair(points)
        return np.stack([pair.l, pair.lb], axis=-2)

    def frame_derivative(
        self, points: np.ndarray, pair: NullPair | None = None
    ) -> tuple[np.ndarray, np.ndarray]:
        """Return the lowered covariant derivatives D_a l_b and D_a lbar_b."""
        pair = pair or self.null_pair(points)
        gamma = self.adapter.christoffel(points)
        step = self.settings.step * self.scale(points)
        # (..., a, 2, c) = d_a of (l, lbar)^c
        partial = jacobian(self._pair_vectors, points, step)
        lowered = []
        for slot, vector in enumerate((pair.l, pair.lb)):
            covariant = partial[..., slot, :] + np.einsum(
                "...cad,...d->...ac", gamma, vector
            )
            lowered.append(np.einsum("...ac,...cb->...ab", covariant, pair.metric))
        return lowered[0], lowered[1]

    def connection(self, points: np.ndarray) -> dict[str, np.ndarray]:
        """Return the connection coefficients as horizontal spacetime tensors."""
        pair = self.null_pair(points)
        dl, dlb = self.frame_derivative(points, pair)
        proj = pair.projector

        chi = np.einsum("...am,...bn,...ab->...mn", proj, proj, dl)
        chib = np.einsum("...am,...bn,...ab->...mn", proj, proj, dlb)
        fields = {
            "chi": chi,
            "chib": chib,
            "xi": 0.5 * np.einsum("...bn,...a,...ab->...n", proj, pair.l, dl),
            "eta": 0.5 * np.einsum("...bn,...a,...ab->...n", proj, pair.lb, dl),
            "zeta": 0.5 * np.einsum("...am,...ab,...b->...m", proj, dl, pair.lb),
            "omega": 0.25 * np.einsum("...a,...ab,...b->...", pair.l, dl, pair.lb),
            "xib": 0.5 * np.einsum("...bn,...a,...ab->...n", proj, pair.lb, dlb),
            "etab": 0.5 * np.einsum("...bn,...a,...ab->...n", proj, pair.l, dlb),
            "omegab": 0.25
            * np.einsum("...a,...ab,...b->...", pair.lb, dlb, pair.l),
            "y": pair.y,
        }
        for name, tensor in (("chi", chi), ("chib", chib)):
            trace = np.einsum("...mn,...mn->...", pair.horizontal_inverse, tensor)
            fields[f"tr{name}"] = trace
            fields[f"{name}h"] = (
                0.5 * (tensor + np.swapaxes(tensor, -1, -2))
                - 0.5 * trace[..., None, None] * pair.horizontal_metric
            )
        return fields

    def curvature(self, points: np.ndarray) -> dict[str, np.ndarray]:
        """Return the null curvature components as horizontal spacetime tensors."""
        pair = self.null_pair(points)
        step = self.settings.step * self.scale(points)
        return null_curvature(pair, self.adapter.riemann(points, step))

    def components(self, points: np.ndarray) -> dict[str, np.ndarray]:
        """Return every connection coefficient and curvature component."""
        return {**self.connection(points), **self.curvature(points)}

    def covariant(
        self,
        function: Callable[[np.ndarray], np.ndarray],
        points: np.ndarray,
        rank: int,
        direction: np.ndarray | None = None,
        step: float | None = None,
    ) -> np.ndarray:
        """Return the projected covariant derivative of a horizontal tensor field.

        Without a direction the result carries the derivative index first and is
        the angular derivative; with a direction it is the derivative along it.
        """
        pair = self.null_pair(points)
        gamma = self.adapter.christoffel(points)
        values = function(points)
        step_size = (step or self.settings.transverse_step) * self.scale(points)
        if direction is None:
            partial = jacobian(function, points, step_size)
            derivative = partial - connection_terms(gamma, values, rank, None)
            return project(pair.projector, derivative, rank + 1)
        partial = directional(function, points, direction, step_size)
        derivative = partial - connection_terms(gamma, values, rank, direction)
        return project(pair.projector, derivative, rank)

    def transverse(
        self,
        points: np.ndarray,
        which: Transverse,
        names: tuple[str, ...] | None = None,
    ) -> dict[str, np.ndarray]:
        """Return nabla_3 or nabla_4 of the frame components at the points.

        Args:
            points (np.ndarray): Points of shape (..., 4).
            which (Transverse): "3" for lbar, "4" for l.
            names (tuple[str, ...] | None): Components to differentiate; all of
                them by default.
        """
        if which not in ("3", "4"):
            raise ConfigurationError(
                f"transverse direction must be 3 or 4, got {which}"
            )
        pair = self.null_pair(points)
        direction = pair.lb if which == "3" else pair.l
        names = names or tuple(COMPONENTS)
        unknown = sorted(set(names) - set(COMPONENTS))
        if unknown:
            raise ConfigurationError(f"unknown frame components {unknown}")

        def sample(shifted: np.ndarray) -> dict[str, np.ndarray]:
            values = self.components(shifted)
            return {name: values[name] for name in names}

        step = self.settings.transverse_step * self.scale(points)
        partial = directional_fields(sample, points, direction, step)
        centre = sample(points)
        gamma = self.adapter.christoffel(points)
        result = {}
        for name in names:
            rank = COMPONENTS[name][0]
            derivative = partial[name] - connection_terms(
                gamma, centre[name], rank, direction
            )
            result[name] = project(pair.projector, derivative, rank)
        logger.debug("computed nabla_%s of %d components", which, len(names))
        return result

    def lie_derivative_metric(
        self, points: np.ndarray, which: Transverse
    ) -> np.ndarray:
        """Return the projected Lie derivative of the sphere metric along l or lbar.

        Partial derivatives only, so the result is independent of the closed-form
        connection.
        """
        pair = self.null_pair(points)
        slot = 1 if which == "3" else 0
        vector = pair.lb if which == "3" else pair.l
        step = self.settings.step * self.scale(points)

        def horizontal(shifted: np.ndarray) -> np.ndarray:
            return self.null_pair(shifted).horizontal_metric

        transport = directional(horizontal, points, vector, step)
        d_vector = jacobian(self._pair_vectors, points, step)[..., slot, :]
        lie = (
            transport
            + np.einsum("...an,...ma->...mn", pair.horizontal_metric, d_vector)
            + np.einsum("...ma,...na->...mn", pair.horizontal_metric, d_vector)
        )
        return project(pair.projector, lie, 2)
