"""Covariant derivatives and the derived first and second order operators."""

from collections.abc import Callable

import numpy as np

from nullgeo.errors import ConfigurationError
from nullgeo.sphere.algebra import area_form_raised
from nullgeo.sphere.field import SphereField
from nullgeo.sphere.grid import SphereGrid
from nullgeo.sphere.metric import SphereMetric


def _check_metric(field: SphereField, metric: SphereMetric) -> None:
    if field.grid.shape != metric.grid.shape or field.grid.radius != metric.radius:
        raise ConfigurationError(
            f"field on {field.grid} cannot be differentiated with a metric on "
            f"{metric.grid}"
        )


def covariant_derivative(field: SphereField, metric: SphereMetric) -> SphereField:
    """Return the Levi-Civita derivative of a field, derivative index first.

    On the round metric the derivative is spectral; a perturbed metric adds the
    Christoffel difference contracted into every tensor index.

    Args:
        field (SphereField): Field of any rank.
        metric (SphereMetric): Metric defining the connection.

    Returns:
        SphereField: The derivative, of rank field.rank + 1.
    """
    _check_metric(field, metric)
    grid = metric.grid
    derivative = grid.round_gradient(field.values, field.rank)
    if not metric.is_round:
        connection = metric.christoffel
        for position in range(field.rank):
            moved = np.moveaxis(field.values, 2 + position, -1)
            correction = np.einsum("jkdca,jk...d->jkca...", connection, moved)
            derivative = derivative - np.moveaxis(correction, 3, 3 + position)
    return SphereField(grid, derivative, field.rank + 1)


def second_derivative(field: SphereField, metric: SphereMetric) -> SphereField:
    """Return the second covariant derivative, both derivative indices first."""
    return covariant_derivative(covariant_derivative(field, metric), metric)


def divergence(field: SphereField, metric: SphereMetric) -> SphereField:
    """Return g^{ab} D_a F_b... contracted on the first tensor index."""
    if field.rank not in (1, 2):
        raise ConfigurationError(f"divergence needs rank 1 or 2, got {field.rank}")
    derivative = covariant_derivative(field, metric).values
    if field.rank == 1:
        return SphereField(
            metric.grid, np.einsum("...ab,...ab->...", metric.inverse, derivative)
        )
    values = np.einsum("...ac,...acb->...b", metric.inverse, derivative)
    return SphereField(metric.grid, values, 1)


def curl(field: SphereField, metric: SphereMetric) -> SphereField:
    """Return e^{ab} D_a F_b for a 1-form, or e^{ab} D_a F_bc for a 2-tensor."""
    if field.rank not in (1, 2):
        raise ConfigurationError(f"curl needs rank 1 or 2, got {field.rank}")
    derivative = covariant_derivative(field, metric).values
    upper = area_form_raised(metric)
    if field.rank == 1:
        values = np.einsum("...ab,...ab->...", upper, derivative)
        return SphereField(metric.grid, values)
    values = np.einsum("...ab,...abc->...c", upper, derivative)
    return SphereField(metric.grid, values, 1)


def laplacian(field: SphereField, metric: SphereMetric) -> SphereField:
    """Return the rough Laplacian g^{ab} D_a D_b of a field."""
    _check_metric(field, metric)
    if field.rank == 0 and metric.is_round:
        values = metric.grid.laplacian(field.values) / metric.radius**2
        return SphereField(metric.grid, values)
    hessian = second_derivative(field, metric).values
    values = np.einsum("jkab,jkab...->jk...", metric.inverse, hessian)
    return SphereField(metric.grid, values, field.rank)


def symmetric_traceless_derivative(
    form: SphereField, metric: SphereMetric
) -> SphereField:
    """Return D (x) xi = D_a xi_b + D_b xi_a - (div xi) g_ab."""
    if form.rank != 1:
        raise ConfigurationError(f"D (x) xi needs a 1-form, got rank {form.rank}")
    derivative = covariant_derivative(form, metric).values
    div = np.einsum("...ab,...ab->...", metric.inverse, derivative)
    values = derivative + np.swapaxes(derivative, -1, -2)
    values = values - div[..., None, None] * metric.matrix
    return SphereField(metric.grid, values, 2, symmetric=True, traceless=True)


def finite_difference_gradient(
    function: Callable[[np.ndarray, np.ndarray], np.ndarray],
    grid: SphereGrid,
    step: float = 1e-3,
) -> np.ndarray:
    """Return the round gradient of a callable f(theta, phi) by central differences.

    A fourth-order stencil in both coordinates is used at every grid node; the
    result is expressed in ambient components like every other derivative.
    """
    theta = grid.theta[:, None] * np.ones((1, grid.n_phi))
    phi = np.ones((grid.theta.size, 1)) * grid.phi[None, :]

    def stencil(shift: Callable[[float], np.ndarray]) -> np.ndarray:
        return (
            -shift(2 * step) + 8 * shift(step) - 8 * shift(-step) + shift(-2 * step)
        ) / (12 * step)

    d_theta = stencil(lambda delta: function(theta + delta, phi))
    d_phi = stencil(lambda delta: function(theta, phi + delta))
    return (
        d_theta[..., None] * grid.theta_hat
        + (d_phi / np.sin(theta))[..., None] * grid.phi_hat
    ) / grid.radius
