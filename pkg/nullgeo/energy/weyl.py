"""Weyl fields held through their null components.

The 4-tensor is rebuilt from alpha, beta, rho, sigma, betab and alphab using the
dual covectors theta^3 = -1/2 l_flat and theta^4 = -1/2 lbar_flat of the null
pair. Index 3 refers to lbar and index 4 to l.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Final

import numpy as np

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.spacetime.cone import ConeState
from nullgeo.spacetime.curvature import left_dual, weyl_part
from nullgeo.spacetime.frames import (
    FrameCalculus,
    NullPair,
    norm_squared,
    null_curvature,
)
from nullgeo.sphere import SphereField

logger = logging.getLogger(__name__)

WEYL_COMPONENTS: Final = ("alpha", "beta", "rho", "sigma", "betab", "alphab")
SYMMETRY_TOLERANCE: Final = 1e-10

_RANKS: Final = {
    "alpha": 2,
    "beta": 1,
    "rho": 0,
    "sigma": 0,
    "betab": 1,
    "alphab": 2,
}

# (p, s): W(v0, v1, v2, v3) = s W(v_p0, v_p1, v_p2, v_p3)
_SYMMETRIES: Final = (
    ((0, 1, 2, 3), 1.0),
    ((1, 0, 2, 3), -1.0),
    ((0, 1, 3, 2), -1.0),
    ((1, 0, 3, 2), 1.0),
    ((2, 3, 0, 1), 1.0),
    ((3, 2, 0, 1), -1.0),
    ((2, 3, 1, 0), -1.0),
    ((3, 2, 1, 0), 1.0),
)


def _horizontal_dual(pair: NullPair, form: np.ndarray) -> np.ndarray:
    """Return *v_m = eps_mn v^n for a horizontal 1-form."""
    return np.einsum(
        "...mn,...np,...p->...m", pair.area_form, pair.horizontal_inverse, form
    )


def _generators(
    pair: NullPair, components: dict[str, np.ndarray]
) -> list[tuple[str, np.ndarray]]:
    """Return the frame blocks of W from which every other block follows.

    A pattern such as "h3h4" names the slots filled by horizontal vectors (h),
    lbar (3) and l (4); the array holds the horizontal slots in order.
    """
    eps = pair.area_form
    rho = components["rho"][..., None, None]
    pinched = np.einsum("...ab,...cd->...abcd", eps, eps)
    sigma = components["sigma"][..., None, None]
    star_beta = _horizontal_dual(pair, components["beta"])
    star_betab = _horizontal_dual(pair, components["betab"])
    return [
        ("hhhh", -rho[..., None, None] * pinched),
        ("hhh4", -np.einsum("...ab,...c->...abc", eps, star_beta)),
        ("hhh3", np.einsum("...ab,...c->...abc", eps, star_betab)),
        ("hh34", 2.0 * sigma * eps),
        ("h3h4", -rho * pair.horizontal_metric + sigma * eps),
        ("h3h3", components["alphab"]),
        ("h4h4", components["alpha"]),
        ("h434", 2.0 * components["beta"]),
        ("h334", 2.0 * components["betab"]),
        ("3434", 4.0 * components["rho"]),
    ]


def reconstruct(pair: NullPair, components: dict[str, np.ndarray]) -> np.ndarray:
    """Return the covariant 4-tensor W_abcd with the given null components."""
    covectors = {"3": -0.5 * pair.l_low, "4": -0.5 * pair.lb_low}
    letters = "abcd"
    total = np.zeros(pair.metric.shape[:-2] + (4, 4, 4, 4))
    for pattern, block in _generators(pair, components):
        seen: set[str] = set()
        for permutation, sign in _SYMMETRIES:
            image = [""] * 4
            for slot, target in enumerate(permutation):
                image[target] = pattern[slot]
            key = "".join(image)
            if key in seen:
                continue
            seen.add(key)
            horizontal = "".join(
                letters[permutation[slot]]
                for slot in range(4)
                if pattern[slot] == "h"
            )
            subscripts = ["..." + horizontal]
            operands = [block]
            for slot in range(4):
                if pattern[slot] != "h":
                    subscripts.append("..." + letters[permutation[slot]])
                    operands.append(covectors[pattern[slot]])
            total = total + sign * np.einsum(
                ",".join(subscripts) + "->...abcd", *operands
            )
    return total


def symmetry_defects(metric: np.ndarray, tensor: np.ndarray) -> dict[str, float]:
    """Return the largest violations of the algebraic Weyl symmetries.

    Each defect is relative to max |W|, or absolute when W vanishes.
    """
    inverse = np.linalg.inv(metric)
    scale = float(np.max(np.abs(tensor))) or 1.0
    defects = {
        "antisymmetry": tensor + np.einsum("...abcd->...bacd", tensor),
        "pair": tensor - np.einsum("...abcd->...cdab", tensor),
        "cyclic": tensor
        + np.einsum("...abcd->...acdb", tensor)
        + np.einsum("...abcd->...adbc", tensor),
        "trace": np.einsum("...ac,...abcd->...bd", inverse, tensor),
    }
    return {
        name: float(np.max(np.abs(values))) / scale
        for name, values in defects.items()
    }


@dataclass(frozen=True, eq=False)
class WeylField:
    """Weyl field at a batch of points through its null decomposition.

    Attributes:
        pair (NullPair): Frame of the decomposition.
        components (dict[str, np.ndarray]): alpha, beta, rho, sigma, betab and
            alphab as horizontal spacetime tensors.
        samples (np.ndarray | None): The 4-tensor it was decomposed from, if any.
    """

    pair: NullPair
    components: dict[str, np.ndarray]
    samples: np.ndarray | None = None

    def __post_init__(self) -> None:
        """Validate the component names and shapes.

        Raises:
            ConfigurationError: If a component is missing or misshapen.
        """
        missing = sorted(set(WEYL_COMPONENTS) - set(self.components))
        if missing:
            raise ConfigurationError(f"Weyl field is missing components {missing}")
        batch = self.pair.metric.shape[:-2]
        for name in WEYL_COMPONENTS:
            expected = batch + (4,) * _RANKS[name]
            if np.shape(self.components[name]) != expected:
                raise ConfigurationError(
                    f"Weyl component {name} needs shape {expected}, got "
                    f"{np.shape(self.components[name])}"
                )

    @classmethod
    def zero(cls, pair: NullPair) -> "WeylField":
        """Return the vanishing Weyl field."""
        batch = pair.metric.shape[:-2]
        return cls(
            pair,
            {name: np.zeros(batch + (4,) * _RANKS[name]) for name in WEYL_COMPONENTS},
        )

    @classmethod
    def from_tensor(cls, pair: NullPair, tensor: np.ndarray) -> "WeylField":
        """Decompose a covariant 4-tensor with the Weyl symmetries."""
        return cls(pair, null_decomposition(pair, tensor), tensor)

    def __getitem__(self, name: str) -> np.ndarray:
        """Return a null component by name."""
        if name not in self.components:
            raise ConfigurationError(f"unknown Weyl component {name!r}")
        return self.components[name]

    @cached_property
    def tensor(self) -> np.ndarray:
        """Return W_abcd, rebuilt from the components unless sampled."""
        if self.samples is not None:
            return self.samples
        return reconstruct(self.pair, self.components)

    @cached_property
    def dual(self) -> np.ndarray:
        """Return the left dual *W_abcd."""
        return left_dual(self.pair.metric, self.tensor)

    def squared_norms(self) -> dict[str, np.ndarray]:
        """Return the pointwise squared sphere norms of the components."""
        return {
            name: norm_squared(self.pair, self.components[name], _RANKS[name])
            for name in WEYL_COMPONENTS
        }

    def check(self, tolerance: float = SYMMETRY_TOLERANCE) -> None:
        """Verify the reconstructed tensor has the algebraic Weyl symmetries.

        Raises:
            NumericalFailure: If a symmetry defect exceeds the tolerance.
        """
        rebuilt = reconstruct(self.pair, self.components)
        for name, defect in symmetry_defects(self.pair.metric, rebuilt).items():
            if defect > tolerance:
                raise NumericalFailure(
                    f"Weyl {name} defect {defect:.3e} exceeds {tolerance:.1e}"
                )

    def restrict(self, state: ConeState) -> dict[str, SphereField]:
        """Return the components as sphere fields on the state's grid."""
        if self.pair.metric.shape[:-2] != state.grid.shape:
            raise ConfigurationError(
                f"Weyl field of batch {self.pair.metric.shape[:-2]} does not live on "
                f"{state.grid}"
            )
        return {
            name: state.restrict(self.components[name], name)
            for name in WEYL_COMPONENTS
        }


def null_decomposition(pair: NullPair, tensor: np.ndarray) -> dict[str, np.ndarray]:
    """Return the null components of a covariant 4-tensor."""
    return null_curvature(pair, tensor)


def weyl_tensor(
    calculus: FrameCalculus, points: np.ndarray, step: np.ndarray | None = None
) -> np.ndarray:
    """Return the Weyl part of the adapter's Riemann tensor at the points."""
    step = calculus.settings.step * calculus.scale(points) if step is None else step
    metric = calculus.adapter.metric(points)
    return weyl_part(metric, calculus.adapter.riemann(points, step))


def weyl_field(calculus: FrameCalculus, points: np.ndarray) -> WeylField:
    """Return the Weyl field of the adapter's spacetime at the points."""
    pair = calculus.null_pair(points)
    tensor = weyl_tensor(calculus, points)
    logger.debug(
        "sampled Weyl tensor of %s at %d points",
        calculus.adapter.name,
        int(np.prod(points.shape[:-1])),
    )
    return WeylField.from_tensor(pair, tensor)
