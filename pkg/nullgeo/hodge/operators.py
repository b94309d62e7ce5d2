"""Hodge systems D1, D1*, D2, D2* and the Laplacian on sphere fields.

    D1 U = (div U, curl U),        D1*(f, g) = -grad f + *grad g,
    D2 F = div F,                  D2* U = -1/2 grad (x) U.

On the round sphere every operator is inverted exactly through the scalar
potentials of a 1-form, U = grad a + *grad b. Perturbed metrics are inverted by
a fixed-point iteration preconditioned with the round inverse.
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.sphere import (
    SphereField,
    SphereMetric,
    average,
    covariant_derivative,
    curl,
    divergence,
    dot,
    hodge_dual,
    integrate,
    laplacian,
    norm,
    symmetric_traceless_derivative,
)

logger = logging.getLogger(__name__)

OperatorTag = Literal["D1", "D1star", "D2", "D2star", "Laplacian"]
OPERATORS: tuple[str, ...] = ("D1", "D1star", "D2", "D2star", "Laplacian")

Pair = tuple[SphereField, SphereField]
HodgeField = SphereField | Pair


@dataclass(frozen=True)
class HodgeSystem:
    """A Hodge-type operator on a fixed sphere metric with solver settings."""

    metric: SphereMetric
    operator: OperatorTag
    max_iterations: int = 50
    tolerance: float = 1e-10
    cokernel_tolerance: float = 1e-8

    def __post_init__(self) -> None:
        """Validate the operator tag and the solver settings."""
        if self.operator not in OPERATORS:
            raise ConfigurationError(
                f"unknown operator {self.operator!r}, expected one of {OPERATORS}"
            )
        if not self.tolerance > 0:
            raise ConfigurationError(
                f"tolerance must be positive, got {self.tolerance}"
            )
        if self.max_iterations < 1:
            raise ConfigurationError(
                f"max_iterations must be positive, got {self.max_iterations}"
            )


@dataclass
class SolveReport:
    """Summary of one solve, serialisable as JSON."""

    operator: str
    iterations: int
    residual: float
    cokernel_projection: float = 0.0
    ratios: list[float] = field(default_factory=list)

    def to_json(self) -> str:
        """Return the report as a JSON document."""
        return json.dumps(asdict(self))


@dataclass
class EstimateReport:
    """Ratios LHS / RHS of an elliptic estimate over a catalog of fields."""

    operator: str
    order: int
    ratios: list[float]

    @property
    def max_ratio(self) -> float:
        """Return the largest ratio of the catalog."""
        return max(self.ratios) if self.ratios else 0.0

    def to_json(self) -> str:
        """Return the report as a JSON document."""
        return json.dumps(
            {
                "operator": self.operator,
                "order": self.order,
                "ratios": self.ratios,
                "max_ratio": self.max_ratio,
            }
        )


# Vector space operations on fields and scalar pairs.


def _is_pair(value: HodgeField) -> bool:
    return isinstance(value, tuple)


def _combine(first: HodgeField, second: HodgeField, scale: float = 1.0) -> HodgeField:
    if isinstance(first, tuple) and isinstance(second, tuple):
        return (first[0] + scale * second[0], first[1] + scale * second[1])
    if isinstance(first, SphereField) and isinstance(second, SphereField):
        return first + scale * second
    raise ConfigurationError("cannot combine a field with a scalar pair")


def _l2(value: HodgeField, metric: SphereMetric) -> float:
    if isinstance(value, tuple):
        return float(np.hypot(norm(value[0], metric), norm(value[1], metric)))
    return norm(value, metric)


def inner_product(first: HodgeField, second: HodgeField, metric: SphereMetric) -> float:
    """Return the L2 inner product of two fields or two scalar pairs."""
    if isinstance(first, tuple) and isinstance(second, tuple):
        return inner_product(first[0], second[0], metric) + inner_product(
            first[1], second[1], metric
        )
    if isinstance(first, SphereField) and isinstance(second, SphereField):
        return float(np.real(integrate(dot(first, second, metric), metric)))
    raise ConfigurationError("cannot pair a field with a scalar pair")


def _expect(value: HodgeField, operator: str, rank: int | None) -> None:
    if rank is None:
        if not (_is_pair(value) and len(value) == 2):
            raise ConfigurationError(f"{operator} expects a pair of scalar fields")
        assert isinstance(value, tuple)
        if value[0].rank != 0 or value[1].rank != 0:
            raise ConfigurationError(
                f"rank mismatch: {operator} expects scalars, got ranks "
                f"({value[0].rank}, {value[1].rank})"
            )
        return
    if not isinstance(value, SphereField) or value.rank != rank:
        got = "a pair" if _is_pair(value) else f"rank {getattr(value, 'rank', '?')}"
        raise ConfigurationError(
            f"rank mismatch: {operator} expects a rank-{rank} field, got {got}"
        )


DOMAIN_RANK: dict[str, int | None] = {
    "D1": 1,
    "D1star": None,
    "D2": 2,
    "D2star": 1,
    "Laplacian": 0,
}
RANGE_RANK: dict[str, int | None] = {
    "D1": None,
    "D1star": 1,
    "D2": 1,
    "D2star": 2,
    "Laplacian": 0,
}


def _forward(operator: str, value: HodgeField, metric: SphereMetric) -> HodgeField:
    if operator == "D1":
        assert isinstance(value, SphereField)
        return (divergence(value, metric), curl(value, metric))
    if operator == "D1star":
        assert isinstance(value, tuple)
        scalar, dual = value
        return -covariant_derivative(scalar, metric) + hodge_dual(
            covariant_derivative(dual, metric), metric
        )
    if operator == "D2":
        assert isinstance(value, SphereField)
        return divergence(value, metric)
    if operator == "D2star":
        assert isinstance(value, SphereField)
        return -0.5 * symmetric_traceless_derivative(value, metric)
    assert isinstance(value, SphereField)
    return laplacian(value, metric)


def apply(system: HodgeSystem, value: HodgeField) -> HodgeField:
    """Apply the operator of a Hodge system.

    Args:
        system (HodgeSystem): Operator and metric.
        value (HodgeField): 1-form for D1 and D2*, scalar pair for D1*, symmetric
            traceless 2-tensor for D2, scalar for the Laplacian.

    Returns:
        HodgeField: The exact image on the system metric.

    Raises:
        ConfigurationError: If the input does not belong to the operator domain.
    """
    _expect(value, system.operator, DOMAIN_RANK[system.operator])
    return _forward(system.operator, value, system.metric)


class RoundInverse:
    """Exact inverses of the Hodge operators on the round reference sphere."""

    def __init__(self, metric: SphereMetric) -> None:
        """Initialise the inverse on the round metric of the given grid.

        Args:
            metric (SphereMetric): Metric whose grid supplies the round sphere.
        """
        self.grid = metric.grid
        self.metric = SphereMetric.round(metric.grid)
        degree = self.grid.degrees
        self._eigen = degree * (degree + 1) / self.grid.radius**2

    def _multiply(self, values: np.ndarray, multiplier: np.ndarray) -> np.ndarray:
        coefficients = self.grid.analyse(values)
        return self.grid.synthesise(multiplier * coefficients).real

    def inverse_laplacian(self, values: np.ndarray) -> np.ndarray:
        """Return the mean-zero solution of the round Poisson equation."""
        with np.errstate(divide="ignore"):
            multiplier = np.where(self._eigen > 0, -1.0 / self._eigen, 0.0)
        return self._multiply(values, multiplier)

    def conformal_inverse(self, values: np.ndarray) -> np.ndarray:
        """Return the potentials divided by the D2 D2* eigenvalue (l >= 2 only)."""
        shifted = 0.5 * (self._eigen - 2.0 / self.grid.radius**2)
        with np.errstate(divide="ignore"):
            multiplier = np.where(self.grid.degrees >= 2, 1.0 / shifted, 0.0)
        return self._multiply(values, multiplier)

    def low_modes(self, values: np.ndarray, degree: int) -> np.ndarray:
        """Return the projection of a scalar onto harmonics of one degree."""
        return self._multiply(values, (self.grid.degrees == degree).astype(float))

    def potentials(self, form: SphereField) -> tuple[np.ndarray, np.ndarray]:
        """Return (a, b) with form = grad a + *grad b on the round sphere."""
        div = divergence(form, self.metric).values
        rot = curl(form, self.metric).values
        return self.inverse_laplacian(div), -self.inverse_laplacian(rot)

    def form(self, exact: np.ndarray, coexact: np.ndarray) -> SphereField:
        """Return grad a + *grad b on the round sphere."""
        grid = self.grid
        gradient = covariant_derivative(SphereField(grid, exact), self.metric)
        rotated = covariant_derivative(SphereField(grid, coexact), self.metric)
        return gradient + hodge_dual(rotated, self.metric)

    def conformal_killing_part(self, form: SphereField) -> SphereField:
        """Return the degree-one (conformal Killing) part of a 1-form."""
        exact, coexact = self.potentials(form)
        return self.form(self.low_modes(exact, 1), self.low_modes(coexact, 1))

    def solve(self, operator: str, source: HodgeField) -> HodgeField:
        """Return the round-sphere solution of operator(x) = source."""
        grid = self.grid
        if operator == "Laplacian":
            assert isinstance(source, SphereField)
            return SphereField(grid, self.inverse_laplacian(source.values))
        if operator == "D1":
            assert isinstance(source, tuple)
            exact = self.inverse_laplacian(source[0].values)
            coexact = -self.inverse_laplacian(source[1].values)
            return self.form(exact, coexact)
        if operator == "D1star":
            assert isinstance(source, SphereField)
            exact, coexact = self.potentials(source)
            return (SphereField(grid, -exact), SphereField(grid, coexact))
        if operator == "D2":
            assert isinstance(source, SphereField)
            exact, coexact = self.potentials(source)
            potential = self.form(
                self.conformal_inverse(exact), self.conformal_inverse(coexact)
            )
            return -0.5 * symmetric_traceless_derivative(potential, self.metric)
        assert isinstance(source, SphereField)
        exact, coexact = self.potentials(divergence(source, self.metric))
        return self.form(self.conformal_inverse(exact), self.conformal_inverse(coexact))


def _cokernel_part(
    system: HodgeSystem, source: HodgeField, inverse: RoundInverse
) -> HodgeField | None:
    metric = system.metric
    if system.operator == "Laplacian":
        assert isinstance(source, SphereField)
        mean = average(source, metric)
        return SphereField.constant(metric.grid, float(np.real(mean)))
    if system.operator == "D1":
        assert isinstance(source, tuple)
        means = [float(np.real(average(part, metric))) for part in source]
        return (
            SphereField.constant(metric.grid, means[0]),
            SphereField.constant(metric.grid, means[1]),
        )
    if system.operator == "D2":
        assert isinstance(source, SphereField)
        return inverse.conformal_killing_part(source)
    return None


def solve_with_report(
    system: HodgeSystem, source: HodgeField
) -> tuple[HodgeField, SolveReport]:
    """Solve operator(x) = source and return the solution with a report.

    Sources with a component along the cokernel (constants for the Laplacian and
    D1, conformal Killing 1-forms for D2) are rejected when that component
    exceeds the cokernel tolerance and projected out otherwise.

    Raises:
        ConfigurationError: If the source has the wrong rank or is not solvable.
        NumericalFailure: If the iteration does not converge.
    """
    operator = system.operator
    metric = system.metric
    _expect(source, operator, RANGE_RANK[operator])
    inverse = RoundInverse(metric)

    projection = 0.0
    cokernel = _cokernel_part(system, source, inverse)
    if cokernel is not None:
        scale = max(_l2(source, metric), 1e-300)
        projection = _l2(cokernel, metric) / scale
        if projection > system.cokernel_tolerance:
            raise ConfigurationError(
                f"source of {operator} is not solvable: relative cokernel component "
                f"{projection:.3e} exceeds {system.cokernel_tolerance:.1e}"
            )
        if projection > 1e-12:
            logger.warning(
                "projecting out cokernel component %.3e of %s source",
                projection,
                operator,
            )
        source = _combine(source, cokernel, -1.0)

    solution = inverse.solve(operator, source)
    residual = _combine(source, _forward(operator, solution, metric), -1.0)
    residual_norm = _l2(residual, metric)
    iterations = 0
    while not metric.is_round and residual_norm >= system.tolerance:
        if iterations >= system.max_iterations:
            raise NumericalFailure(
                f"{operator} solve did not converge in {system.max_iterations} "
                f"iterations, residual {residual_norm:.3e}"
            )
        solution = _combine(solution, inverse.solve(operator, residual))
        residual = _combine(source, _forward(operator, solution, metric), -1.0)
        residual_norm = _l2(residual, metric)
        iterations += 1
        logger.debug(
            "%s iteration %d residual %.3e", operator, iterations, residual_norm
        )

    solution = _select_gauge(operator, solution, metric)
    logger.info(
        "%s solve finished after %d iterations, residual %.3e",
        operator,
        iterations,
        residual_norm,
    )
    report = SolveReport(operator, iterations, residual_norm, projection)
    return solution, report


def _select_gauge(
    operator: str, solution: HodgeField, metric: SphereMetric
) -> HodgeField:
    def centred(scalar: SphereField) -> SphereField:
        mean = float(np.real(average(scalar, metric)))
        return scalar - SphereField.constant(metric.grid, mean)

    if operator == "Laplacian":
        assert isinstance(solution, SphereField)
        return centred(solution)
    if operator == "D1star":
        assert isinstance(solution, tuple)
        return (centred(solution[0]), centred(solution[1]))
    return solution


def solve(system: HodgeSystem, source: HodgeField) -> HodgeField:
    """Return the kernel-orthogonal solution of operator(x) = source.

    Args:
        system (HodgeSystem): Operator, metric and solver settings.
        source (HodgeField): Right-hand side in the operator range.

    Returns:
        HodgeField: The solution.
    """
    solution, _ = solve_with_report(system, source)
    return solution


def _remove_kernel(
    operator: str, value: HodgeField, metric: SphereMetric
) -> HodgeField:
    if operator in ("Laplacian", "D1star"):
        return _select_gauge(operator, value, metric)
    if operator == "D2star":
        assert isinstance(value, SphereField)
        return value - RoundInverse(metric).conformal_killing_part(value)
    return value


def _derivative_norms(
    value: HodgeField, metric: SphereMetric, count: int
) -> list[float]:
    parts = list(value) if isinstance(value, tuple) else [value]
    squares = np.zeros(count)
    for part in parts:
        current = part
        for order in range(count):
            squares[order] += norm(current, metric) ** 2
            if order + 1 < count:
                current = covariant_derivative(current, metric)
    return list(np.sqrt(squares))


def verify_elliptic_estimate(
    system: HodgeSystem, catalog: list[HodgeField], order: int = 0
) -> EstimateReport:
    """Measure the ratios of the classical elliptic estimates over a catalog.

    For first order operators the ratio is

        (sum_{j <= order + 1} |r^(j - 1) grad^j U|^2)^(1/2)
            / (sum_{j <= order} |r^j grad^j (D U)|^2)^(1/2),

    and the Laplacian uses j <= order + 2 with weights r^(j - 2). Kernel parts are
    removed first; a field with vanishing left-hand side has ratio 0.

    Raises:
        ConfigurationError: If the catalog is empty.
    """
    if not catalog:
        raise ConfigurationError("elliptic estimate needs a nonempty catalog")
    metric = system.metric
    radius = metric.area_radius
    shift = 2 if system.operator == "Laplacian" else 1
    ratios = []
    for value in catalog:
        _expect(value, system.operator, DOMAIN_RANK[system.operator])
        value = _remove_kernel(system.operator, value, metric)
        image = _forward(system.operator, value, metric)
        lhs_terms = _derivative_norms(value, metric, order + shift + 1)
        rhs_terms = _derivative_norms(image, metric, order + 1)
        lhs = np.sqrt(
            sum((radius ** (j - shift) * t) ** 2 for j, t in enumerate(lhs_terms))
        )
        rhs = np.sqrt(sum((radius**j * t) ** 2 for j, t in enumerate(rhs_terms)))
        if lhs < 1e-13:
            ratios.append(0.0)
        elif rhs < 1e-300:
            ratios.append(float("inf"))
        else:
            ratios.append(float(lhs / rhs))
    report = EstimateReport(system.operator, order, ratios)
    logger.info("%s estimate max ratio %.3f", system.operator, report.max_ratio)
    return report
