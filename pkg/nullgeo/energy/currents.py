"""Modified Lie derivatives of the Weyl tensor and their divergence currents."""

import logging
from dataclasses import dataclass

import numpy as np

from nullgeo.energy.deformation import (
    VectorField,
    deformation_derivatives,
    deformation_tensor,
)
from nullgeo.energy.weyl import weyl_tensor
from nullgeo.spacetime.differences import jacobian
from nullgeo.spacetime.frames import FrameCalculus, connection_terms

logger = logging.getLogger(__name__)


def _slot_action(matrix: np.ndarray, tensor: np.ndarray) -> np.ndarray:
    """Return sum over the slots of A_a^e W_..e.. with matrix[..., a, e]."""
    return (
        np.einsum("...ae,...ebcd->...abcd", matrix, tensor)
        + np.einsum("...be,...aecd->...abcd", matrix, tensor)
        + np.einsum("...ce,...abed->...abcd", matrix, tensor)
        + np.einsum("...de,...abce->...abcd", matrix, tensor)
    )


def _weyl_derivative(calculus: FrameCalculus, points: np.ndarray) -> np.ndarray:
    """Return D_e W_abcd with the derivative index first."""
    step = calculus.settings.transverse_step * calculus.scale(points)
    partial = jacobian(lambda shifted: weyl_tensor(calculus, shifted), points, step)
    return partial - connection_terms(
        calculus.adapter.christoffel(points), weyl_tensor(calculus, points), 4, None
    )


def modified_lie_derivative(
    calculus: FrameCalculus, vector: VectorField, points: np.ndarray
) -> np.ndarray:
    """Return L_X W - 1/2 pi-hat . W - 1/8 tr(pi) W of the spacetime Weyl tensor.

    The result has the algebraic symmetries of a Weyl tensor.
    """
    scale = calculus.scale(points)
    values = weyl_tensor(calculus, points)
    partial = jacobian(
        lambda shifted: weyl_tensor(calculus, shifted),
        points,
        calculus.settings.transverse_step * scale,
    )
    # d_a X^e
    d_vector = jacobian(vector, points, calculus.settings.step * scale)
    lie = np.einsum("...e,...eabcd->...abcd", vector(points), partial) + _slot_action(
        d_vector, values
    )
    pi, trace_pi = deformation_tensor(calculus, vector, points)
    metric = calculus.adapter.metric(points)
    hat = pi - 0.25 * trace_pi[..., None, None] * metric
    mixed = np.einsum("...af,...fe->...ae", hat, np.linalg.inv(metric))
    return (
        lie
        - 0.5 * _slot_action(mixed, values)
        - 0.125 * trace_pi[..., None, None, None, None] * values
    )


@dataclass(frozen=True, eq=False)
class WeylCurrent:
    """Divergence of Lieh_X W computed directly and through pi-hat, p and q.

    Attributes:
        direct (np.ndarray): D^a (Lieh_X W)_abcd by differencing.
        first (np.ndarray): pi-hat^mn D_n W_mbcd.
        second (np.ndarray): p_l W^l_bcd.
        third (np.ndarray): The three q . W contractions.
    """

    direct: np.ndarray
    first: np.ndarray
    second: np.ndarray
    third: np.ndarray

    @property
    def decomposed(self) -> np.ndarray:
        """Return 1/2 (J1 + J2 + J3)."""
        return 0.5 * (self.first + self.second + self.third)

    @property
    def mismatch(self) -> float:
        """Return max |J - 1/2 (J1 + J2 + J3)| relative to max |J|.

        The mismatch is absolute when the direct current vanishes.
        """
        scale = float(np.max(np.abs(self.direct))) or 1.0
        return float(np.max(np.abs(self.direct - self.decomposed))) / scale


def weyl_current(
    calculus: FrameCalculus, vector: VectorField, points: np.ndarray
) -> WeylCurrent:
    """Return the current of Lieh_X W at the points, computed two ways.

    Args:
        calculus (FrameCalculus): Spacetime and finite-difference steps.
        vector (VectorField): The commutator field X.
        points (np.ndarray): Points of shape (..., 4); a handful suffices as every
            level of the direct current nests another stencil.
    """
    adapter = calculus.adapter
    scale = calculus.scale(points)
    gamma = adapter.christoffel(points)
    inverse = adapter.inverse_metric(points)

    def commuted(shifted: np.ndarray) -> np.ndarray:
        return modified_lie_derivative(calculus, vector, shifted)

    partial = jacobian(commuted, points, calculus.settings.transverse_step * scale)
    derivative = partial - connection_terms(gamma, commuted(points), 4, None)
    direct = np.einsum("...ea,...eabcd->...bcd", inverse, derivative)

    values = weyl_tensor(calculus, points)
    d_weyl = _weyl_derivative(calculus, points)
    pi, trace_pi = deformation_tensor(calculus, vector, points)
    hat = pi - 0.25 * trace_pi[..., None, None] * adapter.metric(points)
    hat_up = np.einsum("...am,...mn,...nb->...ab", inverse, hat, inverse)
    p, q = deformation_derivatives(calculus, vector, points)

    first = np.einsum("...mn,...nmbcd->...bcd", hat_up, d_weyl)
    second = np.einsum("...l,...lk,...kbcd->...bcd", p, inverse, values)
    raised_01 = np.einsum("...xk,...yl,...klcd->...xycd", inverse, inverse, values)
    raised_02 = np.einsum("...xk,...yl,...kbld->...xbyd", inverse, inverse, values)
    raised_03 = np.einsum("...xk,...yl,...kbcl->...xbcy", inverse, inverse, values)
    third = (
        np.einsum("...xby,...xycd->...bcd", q, raised_01)
        + np.einsum("...xcy,...xbyd->...bcd", q, raised_02)
        + np.einsum("...xdy,...xbcy->...bcd", q, raised_03)
    )
    current = WeylCurrent(direct, first, second, third)
    logger.info("Weyl current mismatch %.3e", current.mismatch)
    return current
