"""Pointwise tensor algebra of S-tangent fields with respect to a sphere metric.

Conventions follow the null decomposition literature: for 1-forms a, b and
symmetric 2-tensors F, G

    a . b = g^{ab} a_a b_b,      (F . b)_a = F_ab g^{bc} b_c,
    F . G = g^{ac} g^{bd} F_ab G_cd,   (F x G)_ab = F_ac g^{cd} G_db,
    *a_a = e_ab g^{bc} a_c,      *F_ab = e_ac g^{cd} F_db,
    a ^ b = e^{ab} a_a b_b,      F ^ G = e^{ab} F_ac g^{cd} G_db,
    a (x) b = a b + b a - (a . b) g.
"""

from dataclasses import replace

import numpy as np

from nullgeo.errors import ConfigurationError
from nullgeo.sphere.field import SphereField
from nullgeo.sphere.metric import SphereMetric


def _require_rank(field: SphereField, *ranks: int) -> None:
    if field.rank not in ranks:
        raise ConfigurationError(
            f"rank mismatch: expected rank in {ranks}, got rank {field.rank}"
        )


def raise_index(values: np.ndarray, metric: SphereMetric, position: int) -> np.ndarray:
    """Raise the tensor index at ``position`` (counted after the grid axes)."""
    moved = np.moveaxis(values, 2 + position, -1)
    raised = np.einsum("jkab,jk...b->jk...a", metric.inverse, moved)
    return np.moveaxis(raised, -1, 2 + position)


def metric_field(metric: SphereMetric) -> SphereField:
    """Return the metric g itself as a symmetric rank-2 field."""
    return SphereField(metric.grid, metric.matrix.copy(), 2, symmetric=True)


def pointwise_norm_squared(field: SphereField, metric: SphereMetric) -> np.ndarray:
    """Return |F|^2 with every index contracted by the inverse metric."""
    raised = field.values
    for position in range(field.rank):
        raised = raise_index(raised, metric, position)
    product = raised * np.conj(field.values)
    return np.real(product.reshape(metric.grid.shape + (-1,)).sum(axis=-1))


def dot(first: SphereField, second: SphereField, metric: SphereMetric) -> SphereField:
    """Return the full contraction of two fields of equal rank."""
    if first.rank != second.rank:
        raise ConfigurationError(
            f"rank mismatch: cannot contract rank {first.rank} with {second.rank}"
        )
    raised = first.values
    for position in range(first.rank):
        raised = raise_index(raised, metric, position)
    product = raised * second.values
    return SphereField(
        metric.grid, product.reshape(metric.grid.shape + (-1,)).sum(axis=-1)
    )


def contract(
    tensor: SphereField, form: SphereField, metric: SphereMetric
) -> SphereField:
    """Return (F . b)_a = F_ab g^{bc} b_c for a 2-tensor F and a 1-form b."""
    _require_rank(tensor, 2)
    _require_rank(form, 1)
    raised = raise_index(form.values, metric, 0)
    values = np.einsum("...ab,...b->...a", tensor.values, raised)
    return SphereField(metric.grid, values, 1)


def compose(
    first: SphereField, second: SphereField, metric: SphereMetric
) -> SphereField:
    """Return (F x G)_ab = F_ac g^{cd} G_db."""
    _require_rank(first, 2)
    _require_rank(second, 2)
    values = np.einsum(
        "...ac,...cd,...db->...ab", first.values, metric.inverse, second.values
    )
    return SphereField(metric.grid, values, 2)


def outer(first: SphereField, second: SphereField) -> SphereField:
    """Return the tensor product of two fields."""
    shape = first.grid.shape
    left = first.values.reshape(shape + (3,) * first.rank + (1,) * second.rank)
    right = second.values.reshape(shape + (1,) * first.rank + (3,) * second.rank)
    return SphereField(first.grid, left * right, first.rank + second.rank)


def trace(tensor: SphereField, metric: SphereMetric) -> SphereField:
    """Return tr F = g^{ab} F_ab."""
    _require_rank(tensor, 2)
    return SphereField(
        metric.grid, np.einsum("...ab,...ab->...", metric.inverse, tensor.values)
    )


def symmetrise(tensor: SphereField) -> SphereField:
    """Return the symmetric part of a 2-tensor."""
    _require_rank(tensor, 2)
    values = 0.5 * (tensor.values + np.swapaxes(tensor.values, -1, -2))
    return replace(tensor, values=values, symmetric=True, coefficients=None)


def traceless_part(tensor: SphereField, metric: SphereMetric) -> SphereField:
    """Return the symmetric trace-free part F - 1/2 (tr F) g."""
    symmetric = symmetrise(tensor)
    half_trace = 0.5 * trace(symmetric, metric).values
    values = symmetric.values - half_trace[..., None, None] * metric.matrix
    return SphereField(metric.grid, values, 2, symmetric=True, traceless=True)


def hodge_dual(field: SphereField, metric: SphereMetric) -> SphereField:
    """Return the left Hodge dual of a 1-form or a 2-tensor."""
    _require_rank(field, 1, 2)
    mixed = np.einsum("...ac,...cd->...ad", metric.area_form, metric.inverse)
    if field.rank == 1:
        values = np.einsum("...ad,...d->...a", mixed, field.values)
        return SphereField(metric.grid, values, 1)
    values = np.einsum("...ad,...db->...ab", mixed, field.values)
    return SphereField(
        metric.grid,
        values,
        2,
        symmetric=field.symmetric and field.traceless,
        traceless=field.symmetric and field.traceless,
    )


def area_form_raised(metric: SphereMetric) -> np.ndarray:
    """Return e^{ab} = g^{ac} g^{bd} e_cd."""
    return np.einsum(
        "...ac,...bd,...cd->...ab", metric.inverse, metric.inverse, metric.area_form
    )


def wedge(first: SphereField, second: SphereField, metric: SphereMetric) -> SphereField:
    """Return a ^ b for 1-forms or F ^ G for 2-tensors."""
    if first.rank != second.rank:
        raise ConfigurationError(
            f"rank mismatch: cannot wedge rank {first.rank} with {second.rank}"
        )
    _require_rank(first, 1, 2)
    upper = area_form_raised(metric)
    if first.rank == 1:
        values = np.einsum("...a,...ab,...b->...", first.values, upper, second.values)
    else:
        values = np.einsum(
            "...ab,...ac,...cd,...db->...",
            upper,
            first.values,
            metric.inverse,
            second.values,
        )
    return SphereField(metric.grid, values)


def symmetric_traceless_product(
    first: SphereField, second: SphereField, metric: SphereMetric
) -> SphereField:
    """Return a (x) b = a b + b a - (a . b) g for two 1-forms."""
    _require_rank(first, 1)
    _require_rank(second, 1)
    product = np.einsum("...a,...b->...ab", first.values, second.values)
    inner = dot(first, second, metric).values
    values = product + np.swapaxes(product, -1, -2)
    values = values - inner[..., None, None] * metric.matrix
    return SphereField(metric.grid, values, 2, symmetric=True, traceless=True)
