"""Deformation tensors of the approximate conformal Killing fields.

Only T = 1/2 (l + lbar), S = 1/2 (ubar l + u lbar) and K = 1/2 (ubar^2 l +
u^2 lbar) have a spacetime extension built from the null pair. The rotations O
are also given, as the coordinate rotations "O1", "O2" and "O3" for the catalog
spacetimes, so that their deformation can be differenced.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Final

import numpy as np

from nullgeo.energy.bel_robinson import MULTIPLIERS, multiplier
from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.spacetime.cone import ConeState
from nullgeo.spacetime.differences import jacobian
from nullgeo.spacetime.frames import (
    FrameCalculus,
    NullPair,
    connection_terms,
    project,
)
from nullgeo.sphere import SphereField, dot, metric_field, trace

if TYPE_CHECKING:
    from nullgeo.energy.rotations import RotationFields

logger = logging.getLogger(__name__)

DEFORMATION_FIELDS: Final = ("T", "S", "K", "O")
NULL_PARTS: Final = ("n", "nb", "m", "mb", "j", "i")
GEODESIC_TOLERANCE: Final = 1e-6
CONSISTENCY_TOLERANCE: Final = 1e-10

VectorField = Callable[[np.ndarray], np.ndarray]

_LEVI_CIVITA = np.zeros((3, 3, 3))
for _a, _b, _c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _LEVI_CIVITA[_a, _b, _c] = 1.0
    _LEVI_CIVITA[_a, _c, _b] = -1.0


def vector_field(calculus: FrameCalculus, name: str) -> VectorField:
    """Return the contravariant field X^a(points) of a multiplier or rotation.

    Args:
        calculus (FrameCalculus): Source of the null pair and foliation.
        name (str): "T", "S", "K", "l", "lb" or a rotation "O1", "O2", "O3".

    Raises:
        ConfigurationError: If the name is unknown.
    """
    if name in ("O1", "O2", "O3"):
        axis = int(name[1]) - 1

        def rotation(points: np.ndarray) -> np.ndarray:
            spatial = np.einsum("jk,...j->...k", _LEVI_CIVITA[axis], points[..., 1:])
            return np.concatenate([np.zeros(points.shape[:-1] + (1,)), spatial], -1)

        return rotation

    def null_field(points: np.ndarray) -> np.ndarray:
        u, ubar, _, _ = calculus.adapter.foliation(points)
        return multiplier(name, u, ubar).vector(calculus.null_pair(points))

    if name not in MULTIPLIERS:
        raise ConfigurationError(
            f"unknown vector field {name!r}; choose one of "
            f"{sorted(MULTIPLIERS) + ['O1', 'O2', 'O3']}"
        )
    return null_field


def deformation_tensor(
    calculus: FrameCalculus, vector: VectorField, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Return pi = L_X g and its trace at the points from partial derivatives only."""
    step = calculus.settings.step * calculus.scale(points)
    adapter = calculus.adapter
    metric = adapter.metric(points)
    values = vector(points)
    # d_a X^e
    d_vector = jacobian(vector, points, step)
    pi = (
        np.einsum("...e,...emn->...mn", values, adapter.metric_derivative(points))
        + np.einsum("...en,...me->...mn", metric, d_vector)
        + np.einsum("...me,...ne->...mn", metric, d_vector)
    )
    trace_pi = np.einsum("...mn,...mn->...", adapter.inverse_metric(points), pi)
    return pi, trace_pi


def traceless_deformation(
    calculus: FrameCalculus, vector: VectorField, points: np.ndarray
) -> np.ndarray:
    """Return pi-hat = pi - 1/4 tr(pi) g."""
    pi, trace_pi = deformation_tensor(calculus, vector, points)
    return pi - 0.25 * trace_pi[..., None, None] * calculus.adapter.metric(points)


def two_tensor_parts(pair: NullPair, tensor: np.ndarray) -> dict[str, np.ndarray]:
    """Return n, nb, m, mb, j and i of a covariant 2-tensor."""
    l, lb = pair.l, pair.lb
    proj = pair.projector
    return {
        "n": np.einsum("...mn,...m,...n->...", tensor, l, l),
        "nb": np.einsum("...mn,...m,...n->...", tensor, lb, lb),
        "m": np.einsum("...na,...m,...mn->...a", proj, l, tensor),
        "mb": np.einsum("...na,...m,...mn->...a", proj, lb, tensor),
        "j": np.einsum("...mn,...m,...n->...", tensor, lb, l),
        "i": project(proj, tensor, 2),
    }


def three_tensor_parts(pair: NullPair, tensor: np.ndarray) -> dict[str, np.ndarray]:
    """Return the null decomposition of a covariant 3-tensor F.

    Lambda = 1/4 F_434, K = 1/4 eps^ab F_4ab, Xi_a = 1/2 F_44a, I_a = 1/2 F_34a
    and Theta_ab = F_a4b + F_b4a - (tr) gamma_ab, with the barred versions given
    by exchanging 3 and 4.
    """
    l, lb = pair.l, pair.lb
    proj = pair.projector
    upper = np.einsum(
        "...mp,...nq,...pq->...mn",
        pair.horizontal_inverse,
        pair.horizontal_inverse,
        pair.area_form,
    )
    parts = {}
    for suffix, first, second in (("", l, lb), ("b", lb, l)):
        middle = project(proj, np.einsum("...anb,...n->...ab", tensor, first), 2)
        symmetric = middle + np.swapaxes(middle, -1, -2)
        trace_middle = np.einsum("...ab,...ab->...", pair.horizontal_inverse, middle)
        parts[f"Lambda{suffix}"] = 0.25 * np.einsum(
            "...abc,...a,...b,...c->...", tensor, first, second, first
        )
        parts[f"K{suffix}"] = 0.25 * np.einsum(
            "...ab,...mab,...m->...", upper, tensor, first
        )
        parts[f"Xi{suffix}"] = 0.5 * np.einsum(
            "...nc,...abn,...a,...b->...c", proj, tensor, first, first
        )
        parts[f"I{suffix}"] = 0.5 * np.einsum(
            "...nc,...abn,...a,...b->...c", proj, tensor, second, first
        )
        parts[f"Theta{suffix}"] = (
            symmetric - trace_middle[..., None, None] * pair.horizontal_metric
        )
    return parts


def deformation_derivatives(
    calculus: FrameCalculus, vector: VectorField, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Return p_m = D^n pi-hat_nm and q_mnl at the points.

    q_mnl = D_n pi-hat_lm - D_l pi-hat_nm - 1/3 (p_l g_mn - p_n g_ml).
    """
    adapter = calculus.adapter
    step = calculus.settings.transverse_step * calculus.scale(points)

    def sample(shifted: np.ndarray) -> np.ndarray:
        return traceless_deformation(calculus, vector, shifted)

    values = sample(points)
    # D_n pi-hat_lm as (..., n, l, m)
    derivative = jacobian(sample, points, step) - connection_terms(
        adapter.christoffel(points), values, 2, None
    )
    metric = adapter.metric(points)
    p = np.einsum("...nl,...nlm->...m", adapter.inverse_metric(points), derivative)
    q = (
        np.einsum("...nlm->...mnl", derivative)
        - np.einsum("...lnm->...mnl", derivative)
        - (
            np.einsum("...l,...mn->...mnl", p, metric)
            - np.einsum("...n,...ml->...mnl", p, metric)
        )
        / 3.0
    )
    return p, q


@dataclass(frozen=True, eq=False)
class DeformationData:
    """Null decomposition of the traceless deformation tensor on a sphere.

    Attributes:
        tag (str): T, S, K or a rotation O1, O2, O3.
        trace (SphereField): tr pi.
        parts (dict[str, SphereField]): n, nb, m, mb, j and i of pi-hat.
        derived (dict[str, SphereField]): Null parts of p ("p3", "p4", "p") and of
            q (Lambda, K, Xi, I, Theta and barred versions), when sampled.
    """

    tag: str
    trace: SphereField
    parts: dict[str, SphereField]
    derived: dict[str, SphereField] = field(default_factory=dict)

    def __getitem__(self, name: str) -> SphereField:
        """Return a null part of pi-hat, p or q by name."""
        if name in self.parts:
            return self.parts[name]
        if name in self.derived:
            return self.derived[name]
        raise ConfigurationError(
            f"deformation of {self.tag} has no part {name!r}; known: "
            f"{sorted(self.parts) + sorted(self.derived)}"
        )

    def check(self, state: ConeState, tolerance: float = CONSISTENCY_TOLERANCE) -> None:
        """Verify i is symmetric and tr i = j, which holds as pi-hat is traceless.

        Raises:
            NumericalFailure: If either relation fails beyond tolerance.
        """
        i = self.parts["i"].values
        asymmetry = float(np.max(np.abs(i - np.swapaxes(i, -1, -2))))
        defect = trace(self.parts["i"], state.metric) - self.parts["j"]
        worst = float(np.max(np.abs(defect.values)))
        scale = max(float(np.max(np.abs(self.parts["j"].values))), 1.0)
        if asymmetry > tolerance * scale or worst > tolerance * scale:
            raise NumericalFailure(
                f"deformation of {self.tag} is inconsistent: asymmetry "
                f"{asymmetry:.3e}, tr i - j = {worst:.3e}"
            )


def _require_geodesic(state: ConeState) -> None:
    if not state.adapter.geodesic_foliation:
        raise ConfigurationError(
            f"deformation formulas need a geodesic foliation; extract the "
            f"{state.adapter.name} state with foliation=\"geodesic\""
        )
    for name in ("omega", "xi"):
        worst = float(np.max(np.abs(state[name].values)))
        if worst > GEODESIC_TOLERANCE:
            raise ConfigurationError(
                f"state is not geodesic: |{name}| = {worst:.3e} exceeds "
                f"{GEODESIC_TOLERANCE:.1e}"
            )


def _weights(tag: str, u: float, ubar: float) -> tuple[float, float]:
    return {"T": (1.0, 1.0), "S": (ubar, u), "K": (ubar**2, u**2)}[tag]


def deformation_tensors(
    state: ConeState,
    tag: str,
    rotations: "RotationFields | None" = None,
) -> DeformationData:
    """Return the null decomposition of pi-hat from the state's coefficients.

    Args:
        state (ConeState): Sphere of a geodesic foliation.
        tag (str): "T", "S", "K" or "O1", "O2", "O3".
        rotations (RotationFields | None): Rotation fields of the sphere, needed
            for the O tags.

    Raises:
        ConfigurationError: If the foliation is not geodesic, the tag is unknown or
            rotation fields are missing.
    """
    _require_geodesic(state)
    metric = state.metric
    gamma = metric_field(metric)
    trchi, trchib = state["trchi"], state["trchib"]
    omegab, zeta, xib = state["omegab"], state["zeta"], state["xib"]
    zero_scalar = SphereField.zeros(state.grid)
    zero_form = SphereField.zeros(state.grid, 1)

    if tag in ("T", "S", "K"):
        u, ubar = state.u, state.ubar
        outer, inner = _weights(tag, u, ubar)
        # half of l(outer) and of lbar(inner); lbar(ubar) = y brings d_outer into nb
        d_outer = {"T": 0.0, "S": 1.0, "K": 2.0 * ubar}[tag]
        d_inner = {"T": 0.0, "S": 1.0, "K": 2.0 * u}[tag]
        shift = 2.0 * (d_outer + d_inner)
        constant = SphereField.constant(state.grid, 1.0)
        expansion = trchi * outer + trchib * inner
        trace_pi = expansion + omegab * (-2.0 * inner) + constant * shift
        j = omegab * inner + expansion * 0.5 - constant * (0.5 * shift)
        i = (
            gamma
            * (omegab * (0.5 * inner) + expansion * 0.25 - constant * (0.25 * shift))
            + state["chih"] * outer
            + state["chibh"] * inner
        )
        parts = {
            "n": zero_scalar,
            "nb": state["y"] * (-2.0 * d_outer) + omegab * (-4.0 * outer),
            "m": zeta * (-2.0 * inner),
            "mb": xib * inner + zeta * (2.0 * outer),
            "j": j,
            "i": i,
        }
        return DeformationData(tag, trace_pi, parts)

    if tag not in ("O1", "O2", "O3"):
        raise ConfigurationError(
            f"unknown deformation field {tag!r}; choose T, S, K, O1, O2 or O3"
        )
    if rotations is None:
        raise ConfigurationError(f"deformation of {tag} needs rotation fields")
    index = int(tag[1]) - 1
    rotation = rotations.fields[index]
    h = rotations.h[index]
    trace_h = trace(h, metric)
    parts = {
        "n": zero_scalar,
        "nb": dot(xib, rotation, metric) * -4.0,
        "m": zero_form,
        "mb": rotations.y[index],
        "j": trace_h * 0.5,
        "i": h - gamma * (trace_h * 0.25),
    }
    return DeformationData(tag, trace_h, parts)


def deformation_oracle(
    state: ConeState, tag: str, *, derived: bool = True
) -> DeformationData:
    """Return the null decomposition of pi-hat differenced from the metric.

    Args:
        state (ConeState): Sphere whose nodes are sampled.
        tag (str): "T", "S", "K" or "O1", "O2", "O3".
        derived (bool): Also difference pi-hat for p and q.
    """
    calculus = state.calculus
    points = state.points
    vector = vector_field(calculus, tag)
    pair = calculus.null_pair(points)
    pi, trace_pi = deformation_tensor(calculus, vector, points)
    hat = pi - 0.25 * trace_pi[..., None, None] * pair.metric
    parts = {
        name: state.restrict(values, name)
        for name, values in two_tensor_parts(pair, hat).items()
    }
    extra: dict[str, SphereField] = {}
    if derived:
        p, q = deformation_derivatives(calculus, vector, points)
        sampled = {
            "p4": np.einsum("...m,...m->...", p, pair.l),
            "p3": np.einsum("...m,...m->...", p, pair.lb),
            "p": np.einsum("...am,...a->...m", pair.projector, p),
            **three_tensor_parts(pair, q),
        }
        extra = {
            name: state.restrict(values, name) for name, values in sampled.items()
        }
    logger.debug("differenced deformation of %s on %s", tag, state.grid)
    return DeformationData(tag, SphereField(state.grid, trace_pi), parts, extra)
