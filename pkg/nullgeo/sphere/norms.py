from typing import Literal

import numpy as np

from nullgeo.errors import ConfigurationError
from nullgeo.sphere.algebra import pointwise_norm_squared
from nullgeo.sphere.field import SphereField
from nullgeo.sphere.metric import SphereMetric

NormKind = Literal["L2", "L4", "Linf", "Hhalf"]


def norm(field: SphereField, metric: SphereMetric, which: NormKind = "L2") -> float:
    """Return a norm of a field on (S, g).

    The fractional norm is scale homogeneous: the field is rescaled to the unit
    sphere (components multiplied by r^rank), the multiplier (1 + l(l + 1))^(1/2)
    is applied to the squared harmonic coefficients of every ambient component,
    and the result is multiplied by r^(1/2).

    Args:
        field (SphereField): Field of any rank.
        metric (SphereMetric): Metric used for the pointwise norm and the area.
        which (NormKind): One of ``L2``, ``L4``, ``Linf`` or ``Hhalf``.

    Returns:
        float: The requested norm.
    """
    if which == "Hhalf":
        return _fractional_norm(field, metric)
    squared = pointwise_norm_squared(field, metric)
    if which == "L2":
        return float(np.sqrt(np.sum(squared * metric.area_element)))
    if which == "L4":
        return float(np.sum(squared**2 * metric.area_element) ** 0.25)
    if which == "Linf":
        return float(np.sqrt(np.max(squared)))
    raise ConfigurationError(f"unknown norm {which!r}")


def _fractional_norm(field: SphereField, metric: SphereMetric) -> float:
    grid = metric.grid
    radius = metric.area_radius
    unit_values = field.values * (grid.radius**field.rank)
    coefficients = grid.analyse(unit_values)
    degree = grid.degrees.reshape(grid.degrees.shape + (1,) * field.rank)
    weight = np.sqrt(1.0 + degree * (degree + 1))
    total = np.sum(weight * np.abs(coefficients) ** 2)
    return float(np.sqrt(radius * total))
