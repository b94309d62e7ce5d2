"""Brute-force curvature oracle from Richardson-extrapolated central differences.

Only metric values are sampled, so the oracle checks closed-form connections and
curvature independently. It works in any dimension and serves the 3-metrics of
slices as well as spacetime metrics.
"""

import logging
from collections.abc import Callable
from typing import Literal

import numpy as np

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.spacetime.adapters import MetricAdapter
from nullgeo.spacetime.curvature import (
    christoffel,
    christoffel_derivative,
    kretschmann,
    lower_riemann,
    ricci,
    riemann,
)
from nullgeo.spacetime.differences import central, richardson

logger = logging.getLogger(__name__)

Quantity = Literal["Christoffel", "Riemann", "Ricci", "Kretschmann"]
DEFAULT_STEP = 5e-3


def _metric_function(
    metric: MetricAdapter | Callable[[np.ndarray], np.ndarray],
) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(metric, MetricAdapter):
        return metric.metric
    return metric


def metric_derivatives(
    metric: MetricAdapter | Callable[[np.ndarray], np.ndarray],
    points: np.ndarray,
    step: float = DEFAULT_STEP,
) -> tuple[np.ndarray, np.ndarray]:
    """Return extrapolated first and second metric derivatives at the points.

    Raises:
        ConfigurationError: If the step is not positive.
        NumericalFailure: If the halved step underflows at the points.
    """
    if not step > 0.0:
        raise ConfigurationError(f"oracle step must be positive, got {step}")
    points = np.asarray(points, dtype=float)
    magnitude = float(np.max(np.abs(points))) if points.size else 0.0
    if magnitude + 0.25 * step == magnitude:
        raise NumericalFailure(
            f"oracle step {step:.3e} underflows at coordinates of size {magnitude:.3e}"
        )
    function = _metric_function(metric)
    coarse = central(function, points, step)
    fine = central(function, points, 0.5 * step)
    return richardson(coarse[0], fine[0]), richardson(coarse[1], fine[1])


def fd_oracle(
    metric: MetricAdapter | Callable[[np.ndarray], np.ndarray],
    points: np.ndarray,
    quantity: Quantity,
    step: float = DEFAULT_STEP,
) -> np.ndarray:
    """Evaluate a curvature quantity from finite differences of the metric alone.

    Args:
        metric (MetricAdapter | Callable[[np.ndarray], np.ndarray]): Adapter or
            function mapping points (..., d) to metric values (..., d, d).
        points (np.ndarray): Sample points.
        quantity (Quantity): Christoffel (Gamma^r_mn), Riemann (lowered R_rsmn),
            Ricci or Kretschmann.
        step (float): Coarse step; the fine step is half of it.

    Returns:
        np.ndarray: The requested tensor at every point.

    Raises:
        ConfigurationError: If the quantity is unknown or the step invalid.
        NumericalFailure: If the step underflows.
    """
    if quantity not in ("Christoffel", "Riemann", "Ricci", "Kretschmann"):
        raise ConfigurationError(f"unknown oracle quantity {quantity!r}")
    points = np.asarray(points, dtype=float)
    values = _metric_function(metric)(points)
    inverse = np.linalg.inv(values)
    first, second = metric_derivatives(metric, points, step)

    gamma = christoffel(inverse, first)
    if quantity == "Christoffel":
        return gamma
    mixed = riemann(gamma, christoffel_derivative(inverse, first, second))
    logger.debug("oracle %s at %d points, step %.1e", quantity, values.size, step)
    if quantity == "Ricci":
        return ricci(mixed)
    if quantity == "Kretschmann":
        return kretschmann(values, mixed)
    return lower_riemann(values, mixed)
