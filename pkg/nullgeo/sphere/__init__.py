from nullgeo.sphere.algebra import (
    compose,
    contract,
    dot,
    hodge_dual,
    metric_field,
    outer,
    pointwise_norm_squared,
    symmetric_traceless_product,
    symmetrise,
    trace,
    traceless_part,
    wedge,
)
from nullgeo.sphere.calculus import (
    covariant_derivative,
    curl,
    divergence,
    finite_difference_gradient,
    laplacian,
    second_derivative,
    symmetric_traceless_derivative,
)
from nullgeo.sphere.field import SphereField, average, integrate, transform
from nullgeo.sphere.grid import SphereGrid
from nullgeo.sphere.io import (
    evaluate,
    load_coefficients,
    load_grid_csv,
    save_coefficients,
    save_grid_csv,
    two_patch_sample,
)
from nullgeo.sphere.metric import SphereMetric
from nullgeo.sphere.norms import norm

__all__ = [
    "SphereField",
    "SphereGrid",
    "SphereMetric",
    "average",
    "compose",
    "contract",
    "covariant_derivative",
    "curl",
    "divergence",
    "dot",
    "evaluate",
    "finite_difference_gradient",
    "hodge_dual",
    "integrate",
    "laplacian",
    "load_coefficients",
    "load_grid_csv",
    "metric_field",
    "norm",
    "outer",
    "pointwise_norm_squared",
    "save_coefficients",
    "save_grid_csv",
    "second_derivative",
    "symmetric_traceless_derivative",
    "symmetric_traceless_product",
    "symmetrise",
    "trace",
    "traceless_part",
    "transform",
    "two_patch_sample",
    "wedge",
]
