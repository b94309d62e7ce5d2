"""Residual reports and the metric-bound operator set used to assemble them."""

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime.cone import ConeState
from nullgeo.sphere import (
    SphereField,
    SphereMetric,
    contract,
    covariant_derivative,
    curl,
    divergence,
    dot,
    hodge_dual,
    norm,
    pointwise_norm_squared,
    symmetric_traceless_derivative,
    symmetric_traceless_product,
    wedge,
)
from nullgeo.structure.catalog import Equation, equation

logger = logging.getLogger(__name__)

REPORTED_NORMS = ("L2", "Linf", "Hhalf")


@dataclass(frozen=True, eq=False)
class ResidualReport:
    """Residual LHS - RHS of one identity on one sphere.

    Attributes:
        equation (Equation): The identity.
        residual (SphereField): Pointwise residual.
        norms (dict[str, float]): L2, Linf and fractional norms of the residual.
        parameters (dict[str, Any]): Resolution and location of the evaluation.
        expected_order (str): ``spectral`` for identities with angular
            derivatives only, ``fd4`` for those with transverse derivatives.
    """

    equation: Equation
    residual: SphereField
    norms: dict[str, float]
    parameters: dict[str, Any] = field(default_factory=dict)
    expected_order: str = "spectral"

    def __post_init__(self) -> None:
        """Validate the norms."""
        for name, value in self.norms.items():
            if not value >= 0.0:
                raise ConfigurationError(
                    f"norm {name} of {self.equation.id} must be non-negative, "
                    f"got {value}"
                )

    @property
    def id(self) -> str:
        """Return the equation id."""
        return self.equation.id

    def passes(self, tolerance: float, which: str = "Linf") -> bool:
        """Return whether the chosen norm is within the tolerance."""
        return self.norms[which] <= tolerance

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-serialisable summary without the pointwise residual."""
        return {
            "equation": self.equation.id,
            "family": self.equation.family,
            "norms": dict(self.norms),
            "parameters": dict(self.parameters),
            "expected_order": self.expected_order,
        }


def build_report(
    equation_id: str,
    residual: SphereField,
    metric: SphereMetric,
    parameters: dict[str, Any] | None = None,
) -> ResidualReport:
    """Measure a residual and wrap it in a report.

    Raises:
        ConfigurationError: If the equation id is not registered.
    """
    entry = equation(equation_id)
    norms = {which: norm(residual, metric, which) for which in REPORTED_NORMS}
    if not all(np.isfinite(value) for value in norms.values()):
        logger.warning("residual of %s is not finite", equation_id)
    return ResidualReport(
        entry,
        residual,
        norms,
        dict(parameters or {}),
        "fd4" if entry.transverse else "spectral",
    )


def state_parameters(state: ConeState) -> dict[str, Any]:
    """Return the parameters recorded with every report of a cone state."""
    return {
        "adapter": state.adapter.name,
        "u": state.u,
        "ubar": state.ubar,
        "radius": state.radius,
        "band_limit": state.grid.band_limit,
        "step": state.settings.step,
        "transverse_step": state.settings.transverse_step,
    }


class Operators:
    """Sphere operators bound to one metric, so identities read like formulas."""

    def __init__(self, metric: SphereMetric) -> None:
        """Initialise the operator set.

        Args:
            metric (SphereMetric): Metric of the sphere the fields live on.
        """
        self.metric = metric

    def grad(self, field: SphereField) -> SphereField:
        """Return D of a field."""
        return covariant_derivative(field, self.metric)

    def div(self, field: SphereField) -> SphereField:
        """Return the divergence."""
        return divergence(field, self.metric)

    def curl(self, field: SphereField) -> SphereField:
        """Return the curl of a 1-form."""
        return curl(field, self.metric)

    def sym_grad(self, form: SphereField) -> SphereField:
        """Return D (x) of a 1-form."""
        return symmetric_traceless_derivative(form, self.metric)

    def dot(self, first: SphereField, second: SphereField) -> SphereField:
        """Return the full contraction."""
        return dot(first, second, self.metric)

    def contract(self, tensor: SphereField, form: SphereField) -> SphereField:
        """Return F . b."""
        return contract(tensor, form, self.metric)

    def wedge(self, first: SphereField, second: SphereField) -> SphereField:
        """Return the wedge product."""
        return wedge(first, second, self.metric)

    def dual(self, field: SphereField) -> SphereField:
        """Return the left Hodge dual."""
        return hodge_dual(field, self.metric)

    def product(self, first: SphereField, second: SphereField) -> SphereField:
        """Return the symmetric traceless product of two 1-forms."""
        return symmetric_traceless_product(first, second, self.metric)

    def square(self, field: SphereField) -> SphereField:
        """Return |F|^2 as a scalar field."""
        return SphereField(field.grid, pointwise_norm_squared(field, self.metric))
