"""Finite-difference stencils for pointwise fields on batches of spacetime points.

Functions map points of shape (..., d) to an array of shape (...,) + trailing or
to a dict of such arrays; stencils preserve that structure. Steps are per point.
"""

from collections.abc import Callable, Sequence

import numpy as np

from nullgeo.errors import ConfigurationError, NumericalFailure

FIVE_POINT = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))


def _scaled(value: np.ndarray, scale: np.ndarray) -> np.ndarray:
    return value / scale.reshape(scale.shape + (1,) * (value.ndim - scale.ndim))


def check_step(points: np.ndarray, step: np.ndarray | float) -> np.ndarray:
    """Return the step broadcast to the batch shape, rejecting unusable steps.

    Raises:
        ConfigurationError: If a step is not positive.
        NumericalFailure: If a step no longer changes the coordinates.
    """
    step = np.broadcast_to(np.asarray(step, dtype=float), points.shape[:-1])
    if np.any(~(step > 0.0)):
        raise ConfigurationError(f"finite-difference step must be positive, got {step}")
    magnitude = np.max(np.abs(points), axis=-1)
    if np.any(magnitude + 0.5 * step == magnitude):
        raise NumericalFailure(
            f"finite-difference step {np.min(step):.3e} underflows at coordinates "
            f"of size {np.max(magnitude):.3e}"
        )
    return step


def _offsets(
    points: np.ndarray, direction: np.ndarray, step: np.ndarray | float
) -> tuple[np.ndarray, list[np.ndarray]]:
    step = check_step(points, step)
    offset = step[..., None] * direction
    return step, [points + shift * offset for shift, _ in FIVE_POINT]


def directional(
    function: Callable[[np.ndarray], np.ndarray],
    points: np.ndarray,
    direction: np.ndarray,
    step: np.ndarray | float,
) -> np.ndarray:
    """Return d/ds f(x + s v) at s = 0 by the fourth-order five-point stencil."""
    step, shifted = _offsets(points, direction, step)
    total = sum(
        weight * function(sample)
        for (_, weight), sample in zip(FIVE_POINT, shifted)
    )
    return _scaled(np.asarray(total), 12.0 * step)


def directional_fields(
    function: Callable[[np.ndarray], dict[str, np.ndarray]],
    points: np.ndarray,
    direction: np.ndarray,
    step: np.ndarray | float,
) -> dict[str, np.ndarray]:
    """Apply the five-point stencil to every field returned by ``function``."""
    step, shifted = _offsets(points, direction, step)
    samples = [function(sample) for sample in shifted]
    result = {}
    for key in samples[0]:
        total = sum(
            weight * sample[key] for (_, weight), sample in zip(FIVE_POINT, samples)
        )
        result[key] = _scaled(np.asarray(total), 12.0 * step)
    return result


def jacobian(
    function: Callable[[np.ndarray], np.ndarray],
    points: np.ndarray,
    step: np.ndarray | float,
) -> np.ndarray:
    """Return all coordinate derivatives, derivative index after the batch axes."""
    dimension = points.shape[-1]
    batch = points.ndim - 1
    derivatives = [
        directional(function, points, np.eye(dimension)[axis], step)
        for axis in range(dimension)
    ]
    return np.stack(derivatives, axis=batch)


def central(
    function: Callable[[np.ndarray], np.ndarray], points: np.ndarray, step: float
) -> tuple[np.ndarray, np.ndarray]:
    """Return second-order central first and second derivatives.

    The first derivative has shape batch + (d,) + trailing and the second
    derivative batch + (d, d) + trailing.
    """
    dimension = points.shape[-1]
    batch = points.ndim - 1
    basis = np.eye(dimension) * step
    centre = function(points)
    plus = [function(points + basis[a]) for a in range(dimension)]
    minus = [function(points - basis[a]) for a in range(dimension)]

    first = np.stack(
        [(plus[a] - minus[a]) / (2.0 * step) for a in range(dimension)], axis=batch
    )
    rows = []
    for a in range(dimension):
        row = []
        for b in range(dimension):
            if a == b:
                row.append((plus[a] - 2.0 * centre + minus[a]) / step**2)
                continue
            row.append(
                (
                    function(points + basis[a] + basis[b])
                    - function(points + basis[a] - basis[b])
                    - function(points - basis[a] + basis[b])
                    + function(points - basis[a] - basis[b])
                )
                / (4.0 * step**2)
            )
        rows.append(np.stack(row, axis=batch))
    second = np.stack(rows, axis=batch)
    return first, second


def richardson(coarse: np.ndarray, fine: np.ndarray) -> np.ndarray:
    """Eliminate the h^2 error term of a second-order estimate at steps h, h/2."""
    return (4.0 * fine - coarse) / 3.0


def fit_slope(abscissa: Sequence[float], values: Sequence[float]) -> float:
    """Return the least-squares log-log slope of values against abscissa.

    Raises:
        NumericalFailure: If fewer than two positive samples are available.
    """
    x = np.asarray(abscissa, dtype=float)
    y = np.asarray(values, dtype=float)
    usable = (x > 0) & (y > 0) & np.isfinite(y)
    if np.count_nonzero(usable) < 2:
        raise NumericalFailure("slope fit needs at least two positive samples")
    return float(np.polyfit(np.log(x[usable]), np.log(y[usable]), 1)[0])
