"""Rotation fields of a sphere built from Cartesian functions x^1, x^2, x^3."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Final

import numpy as np

from nullgeo.errors import ConfigurationError
from nullgeo.sphere import (
    SphereField,
    SphereGrid,
    SphereMetric,
    covariant_derivative,
    metric_field,
    pointwise_norm_squared,
    second_derivative,
)
from nullgeo.structure.reports import ResidualReport, build_report

logger = logging.getLogger(__name__)

NORMALISATION_TOLERANCE: Final = 1e-8

# O^(l) = x^j dx^k - x^k dx^j for (l, j, k) cyclic
_AXES: Final = ((1, 2), (2, 0), (0, 1))


@dataclass(frozen=True, eq=False)
class RotationFields:
    """The three rotation 1-forms of a sphere and their deformation coefficients.

    Attributes:
        metric (SphereMetric): Sphere metric.
        fields (tuple[SphereField, ...]): O^(1), O^(2), O^(3) as 1-forms.
        h (tuple[SphereField, ...]): H_ab = D_a O_b + D_b O_a.
        y (tuple[SphereField, ...]): Y_a = g(D_3 O, e_a) + g(D_a O, lbar); zero
            for rotations Lie transported along lbar.
        p (tuple[SphereField, ...]): P_abc = D_a D_b O_c
            - r^-2 (O_b g_ac - O_c g_ab).
    """

    metric: SphereMetric
    fields: tuple[SphereField, ...]
    h: tuple[SphereField, ...]
    y: tuple[SphereField, ...]
    p: tuple[SphereField, ...]

    @property
    def radius(self) -> float:
        """Return the area radius r."""
        return self.metric.area_radius

    def relative_norms(self) -> list[np.ndarray]:
        """Return |O^(l)| / r at every node."""
        return [
            np.sqrt(pointwise_norm_squared(rotation, self.metric)) / self.radius
            for rotation in self.fields
        ]


def cartesian_functions(grid: SphereGrid) -> list[SphereField]:
    """Return the coordinate functions of the unit normal on the grid."""
    return [SphereField(grid, grid.normal[..., axis]) for axis in range(3)]


def rotation_fields(
    metric: SphereMetric, cartesian: Sequence[SphereField]
) -> RotationFields:
    """Return the rotations O^(l) = eps_ljk x^j D x^k with x^i scaled to radius r.

    Args:
        metric (SphereMetric): Sphere metric.
        cartesian (Sequence[SphereField]): Three functions with sum of squares 1.

    Raises:
        ConfigurationError: If there are not three functions or they are not
            normalised.
    """
    if len(cartesian) != 3:
        raise ConfigurationError(
            f"need three Cartesian functions, got {len(cartesian)}"
        )
    squares = sum(function.values**2 for function in cartesian)
    defect = float(np.max(np.abs(squares - 1.0)))
    if defect > NORMALISATION_TOLERANCE:
        raise ConfigurationError(
            f"Cartesian functions are not normalised: |sum x^2 - 1| = {defect:.3e}"
        )
    radius = metric.area_radius
    x = [function * radius for function in cartesian]
    gradients = [covariant_derivative(function, metric) for function in x]
    gamma = metric_field(metric).values
    fields, h, y, p = [], [], [], []
    for first, second in _AXES:
        rotation = gradients[second] * x[first] - gradients[first] * x[second]
        derivative = covariant_derivative(rotation, metric).values
        hessian = second_derivative(rotation, metric).values
        o = rotation.values
        killing = (
            np.einsum("...b,...ac->...abc", o, gamma)
            - np.einsum("...c,...ab->...abc", o, gamma)
        ) / radius**2
        fields.append(rotation)
        h.append(
            SphereField(
                metric.grid,
                derivative + np.swapaxes(derivative, -1, -2),
                2,
                symmetric=True,
            )
        )
        y.append(SphereField.zeros(metric.grid, 1))
        p.append(SphereField(metric.grid, hessian - killing, 3))
    logger.debug("built rotation fields on %s", metric.grid)
    return RotationFields(metric, tuple(fields), tuple(h), tuple(y), tuple(p))


def commutator_identity(rotations: RotationFields, index: int) -> ResidualReport:
    """Return the residual of P_abc - P_bac = (K - r^-2)(O_b g_ac - O_a g_bc).

    The antisymmetric part of P measures how far the Gauss curvature is from the
    round value, through the Ricci identity on 1-forms.
    """
    if index not in (1, 2, 3):
        raise ConfigurationError(f"rotation index must be 1, 2 or 3, got {index}")
    metric = rotations.metric
    o = rotations.fields[index - 1].values
    p = rotations.p[index - 1].values
    gamma = metric.matrix
    defect = metric.gauss_curvature - rotations.radius**-2
    frame = np.einsum("...b,...ac->...abc", o, gamma) - np.einsum(
        "...a,...bc->...abc", o, gamma
    )
    residual = p - np.swapaxes(p, -3, -2) - defect[..., None, None, None] * frame
    return build_report(
        "rotation_commutator",
        SphereField(metric.grid, residual, 3),
        metric,
        {"rotation": index, "radius": rotations.radius},
    )
