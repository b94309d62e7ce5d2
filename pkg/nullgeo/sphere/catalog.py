"""Reproducible band-limited test fields used by property checks and the CLI."""

import numpy as np

from nullgeo.sphere.algebra import hodge_dual
from nullgeo.sphere.calculus import covariant_derivative, symmetric_traceless_derivative
from nullgeo.sphere.field import SphereField
from nullgeo.sphere.grid import SphereGrid
from nullgeo.sphere.metric import SphereMetric


def random_coefficients(
    grid: SphereGrid,
    rng: np.random.Generator,
    max_degree: int,
    min_degree: int = 0,
) -> np.ndarray:
    """Return coefficients of a real scalar field with degrees in a range."""
    lmax = grid.band_limit
    max_degree = min(max_degree, lmax)
    coefficients = np.zeros((lmax + 1, 2 * lmax + 1), complex)
    for degree in range(min_degree, max_degree + 1):
        coefficients[degree, lmax] = rng.normal()
        for order in range(1, degree + 1):
            value = complex(rng.normal(), rng.normal()) / np.sqrt(2.0)
            coefficients[degree, lmax + order] = value
            coefficients[degree, lmax - order] = (-1) ** order * np.conj(value)
    return coefficients


def random_scalar(
    grid: SphereGrid,
    rng: np.random.Generator,
    max_degree: int = 4,
    min_degree: int = 0,
) -> SphereField:
    """Return a random real scalar field of bounded degree."""
    coefficients = random_coefficients(grid, rng, max_degree, min_degree)
    return SphereField.from_coefficients(grid, coefficients)


def random_one_form(
    metric: SphereMetric,
    rng: np.random.Generator,
    max_degree: int = 4,
    min_degree: int = 1,
) -> SphereField:
    """Return grad a + *grad b for random scalar potentials a and b."""
    grid = metric.grid
    exact = random_scalar(grid, rng, max_degree, min_degree)
    closed = random_scalar(grid, rng, max_degree, min_degree)
    return covariant_derivative(exact, metric) + hodge_dual(
        covariant_derivative(closed, metric), metric
    )


def random_traceless(
    metric: SphereMetric, rng: np.random.Generator, max_degree: int = 4
) -> SphereField:
    """Return a random symmetric traceless 2-tensor D (x) W with W of degree >= 2."""
    form = random_one_form(metric, rng, max_degree, min_degree=2)
    return symmetric_traceless_derivative(form, metric)


def field_catalog(
    metric: SphereMetric, count: int = 20, seed: int = 0, max_degree: int = 4
) -> list[SphereField]:
    """Return a fixed catalog of scalars, 1-forms and traceless 2-tensors."""
    rng = np.random.default_rng(seed)
    catalog = []
    for index in range(count):
        kind = index % 3
        if kind == 0:
            catalog.append(random_scalar(metric.grid, rng, max_degree))
        elif kind == 1:
            catalog.append(random_one_form(metric, rng, max_degree))
        else:
            catalog.append(random_traceless(metric, rng, max_degree))
    return catalog
