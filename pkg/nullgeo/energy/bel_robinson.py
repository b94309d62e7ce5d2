"""Bel-Robinson tensor of a Weyl field and its contractions with null multipliers."""

import itertools
import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Final, Literal

import numpy as np

from nullgeo.energy.weyl import WeylField, weyl_tensor
from nullgeo.errors import ConfigurationError
from nullgeo.spacetime.differences import jacobian
from nullgeo.spacetime.frames import FrameCalculus, NullPair, connection_terms

logger = logging.getLogger(__name__)

Method = Literal["null", "index"]


@dataclass(frozen=True)
class NullVector:
    """Vector a l + b lbar given by its coefficients along the null pair.

    Attributes:
        outgoing (np.ndarray | float): Coefficient a of l.
        incoming (np.ndarray | float): Coefficient b of lbar.
    """

    outgoing: np.ndarray | float
    incoming: np.ndarray | float

    def vector(self, pair: NullPair) -> np.ndarray:
        """Return the contravariant components at the pair's points."""
        batch = pair.l.shape[:-1]
        outgoing = np.broadcast_to(np.asarray(self.outgoing, dtype=float), batch)
        incoming = np.broadcast_to(np.asarray(self.incoming, dtype=float), batch)
        return outgoing[..., None] * pair.l + incoming[..., None] * pair.lb

    @property
    def is_future_causal(self) -> bool:
        """Return whether both coefficients are non-negative."""
        return bool(
            np.all(np.asarray(self.outgoing) >= 0.0)
            and np.all(np.asarray(self.incoming) >= 0.0)
        )


MultiplierFactory = Callable[[np.ndarray | float, np.ndarray | float], NullVector]

# name -> (u, ubar) -> vector
MULTIPLIERS: Final[dict[str, MultiplierFactory]] = {
    "T": lambda u, ubar: NullVector(0.5, 0.5),
    "S": lambda u, ubar: NullVector(0.5 * np.asarray(ubar), 0.5 * np.asarray(u)),
    "K": lambda u, ubar: NullVector(
        0.5 * np.asarray(ubar) ** 2, 0.5 * np.asarray(u) ** 2
    ),
    "l": lambda u, ubar: NullVector(1.0, 0.0),
    "lb": lambda u, ubar: NullVector(0.0, 1.0),
}


def multiplier(
    name: str, u: np.ndarray | float, ubar: np.ndarray | float
) -> NullVector:
    """Return a named multiplier evaluated at the labels (u, ubar).

    Raises:
        ConfigurationError: If the name is unknown.
    """
    if name not in MULTIPLIERS:
        raise ConfigurationError(
            f"unknown multiplier {name!r}; choose one of {sorted(MULTIPLIERS)}"
        )
    return MULTIPLIERS[name](u, ubar)


def bel_robinson_tensor(weyl: WeylField) -> np.ndarray:
    """Return Q_abcd = W_apcq W_b^p_d^q + *W_apcq *W_b^p_d^q."""
    inverse = weyl.pair.inverse

    def square(tensor: np.ndarray) -> np.ndarray:
        return np.einsum(
            "...apcq,...bsdt,...ps,...qt->...abcd",
            tensor,
            tensor,
            inverse,
            inverse,
            optimize=True,
        )

    return square(weyl.tensor) + square(weyl.dual)


def null_expansion(weyl: WeylField) -> dict[int, np.ndarray]:
    """Return Q with k slots filled by l and the rest by lbar, keyed by k."""
    norms = weyl.squared_norms()
    return {
        4: 2.0 * norms["alpha"],
        3: 4.0 * norms["beta"],
        2: 4.0 * (norms["rho"] + norms["sigma"]),
        1: 4.0 * norms["betab"],
        0: 2.0 * norms["alphab"],
    }


def expansion_weights(
    vectors: Sequence[NullVector], batch: tuple[int, ...]
) -> dict[int, np.ndarray]:
    """Return the multilinear weight of every null block of Q(X1, X2, X3, X4)."""
    weights = {count: np.zeros(batch) for count in range(5)}
    for choice in itertools.product((0, 1), repeat=4):
        product = np.ones(batch)
        for vector, outgoing in zip(vectors, choice):
            product = product * np.asarray(
                vector.outgoing if outgoing else vector.incoming
            )
        weights[sum(choice)] = weights[sum(choice)] + product
    return weights


def bel_robinson_contract(
    weyl: WeylField, vectors: Sequence[NullVector], method: Method = "null"
) -> np.ndarray:
    """Return Q(W)(X1, X2, X3, X4) at every point.

    Args:
        weyl (WeylField): Weyl field to square.
        vectors (Sequence[NullVector]): The four multipliers.
        method (Method): "null" sums the null-component expansion, "index"
            contracts the full 4-tensor.

    Raises:
        ConfigurationError: If there are not four vectors or the method is unknown.
    """
    if len(vectors) != 4:
        raise ConfigurationError(f"Q needs four vectors, got {len(vectors)}")
    if method == "index":
        fields = [vector.vector(weyl.pair) for vector in vectors]
        return np.einsum(
            "...abcd,...a,...b,...c,...d->...",
            bel_robinson_tensor(weyl),
            *fields,
            optimize=True,
        )
    if method != "null":
        raise ConfigurationError(f"unknown contraction method {method!r}")
    batch = weyl.pair.metric.shape[:-2]
    expansion = null_expansion(weyl)
    weights = expansion_weights(vectors, batch)
    return sum(weights[count] * expansion[count] for count in range(5))


def bel_robinson_divergence(
    calculus: FrameCalculus, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Return D^a Q_abcd of the spacetime Weyl tensor and Q itself.

    The divergence differences Q sampled around every point with the transverse
    step of the calculus.
    """
    pair = calculus.null_pair(points)

    def tensor(shifted: np.ndarray) -> np.ndarray:
        local = calculus.null_pair(shifted)
        return bel_robinson_tensor(
            WeylField.from_tensor(local, weyl_tensor(calculus, shifted))
        )

    step = calculus.settings.transverse_step * calculus.scale(points)
    values = tensor(points)
    partial = jacobian(tensor, points, step)
    derivative = partial - connection_terms(
        calculus.adapter.christoffel(points), values, 4, None
    )
    divergence = np.einsum("...ea,...eabcd->...bcd", pair.inverse, derivative)
    logger.debug("sampled DIV Q at %d points", int(np.prod(points.shape[:-1])))
    return divergence, values
