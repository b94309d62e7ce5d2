"""Tensor fields on a sphere grid with dual grid and spectral representations."""

from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from nullgeo.errors import ConfigurationError
from nullgeo.sphere.grid import SphereGrid
from nullgeo.sphere.metric import SphereMetric

Direction = Literal["to_spectral", "to_grid"]


@dataclass(frozen=True, eq=False)
class SphereField:
    """S-tangent tensor field of rank 0, 1 or 2 (rank 3 for derivatives).

    Values have shape grid.shape + (3,) * rank and hold ambient components in the
    orthonormal frame of the reference round metric. Spectral coefficients, when
    populated, have shape (L + 1, 2L + 1) + (3,) * rank.
    """

    grid: SphereGrid
    values: np.ndarray
    rank: int = 0
    symmetric: bool = False
    traceless: bool = False
    coefficients: np.ndarray | None = None

    def __post_init__(self) -> None:
        """Validate the shape of the values against the grid."""
        expected = self.grid.shape + (3,) * self.rank
        if np.shape(self.values) != expected:
            raise ConfigurationError(
                f"rank-{self.rank} field needs values of shape {expected}, "
                f"got {np.shape(self.values)}"
            )

    @classmethod
    def zeros(cls, grid: SphereGrid, rank: int = 0) -> "SphereField":
        """Return the zero field of the given rank."""
        return cls(grid, np.zeros(grid.shape + (3,) * rank), rank)

    @classmethod
    def constant(cls, grid: SphereGrid, value: float) -> "SphereField":
        """Return a constant scalar field."""
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def harmonic(cls, grid: SphereGrid, degree: int, order: int) -> "SphereField":
        """Return the real scalar field built from Y_lm.

        Non-negative orders give sqrt(2) Re Y_lm (Y_l0 for m = 0), negative orders
        give sqrt(2) Im Y_l|m|, so the family is orthonormal on the unit sphere.
        """
        values = grid.harmonic(degree, abs(order))
        if order == 0:
            return cls(grid, values.real)
        if order > 0:
            return cls(grid, np.sqrt(2.0) * values.real)
        return cls(grid, np.sqrt(2.0) * values.imag)

    @classmethod
    def from_coefficients(
        cls, grid: SphereGrid, coefficients: np.ndarray, rank: int = 0
    ) -> "SphereField":
        """Return the real field synthesised from harmonic coefficients."""
        values = grid.synthesise(coefficients).real
        return cls(grid, values, rank, coefficients=np.asarray(coefficients))

    @property
    def is_real(self) -> bool:
        """Return whether the grid values are real."""
        return bool(np.isrealobj(self.values))

    def with_values(self, values: np.ndarray) -> "SphereField":
        """Return a field of the same type with new values."""
        return replace(self, values=values, coefficients=None)

    def spin_components(self) -> dict[int, np.ndarray]:
        """Return components on the null dyad m = (theta_hat + i phi_hat) / sqrt 2.

        Keys are spin weights from -rank to rank. A rank-2 field has the spin 0
        component F(m, conj m); its odd spin components vanish.
        """
        grid = self.grid
        dyad = (grid.theta_hat + 1j * grid.phi_hat) / np.sqrt(2.0)
        if self.rank == 0:
            return {0: np.asarray(self.values, dtype=complex)}
        if self.rank == 1:
            plus = np.einsum("...a,...a->...", self.values, dyad)
            minus = np.einsum("...a,...a->...", self.values, dyad.conj())
            return {1: plus, -1: minus}
        if self.rank == 2:
            contract = "...ab,...a,...b->..."
            zero = np.zeros(grid.shape, complex)
            return {
                2: np.einsum(contract, self.values, dyad, dyad),
                1: zero,
                0: np.einsum(contract, self.values, dyad, dyad.conj()),
                -1: zero,
                -2: np.einsum(contract, self.values, dyad.conj(), dyad.conj()),
            }
        raise ConfigurationError(f"spin components undefined for rank {self.rank}")

    def __add__(self, other: "SphereField") -> "SphereField":
        """Return the sum of two fields of the same rank."""
        _check_compatible(self, other)
        return SphereField(
            self.grid,
            self.values + other.values,
            self.rank,
            self.symmetric and other.symmetric,
            self.traceless and other.traceless,
        )

    def __sub__(self, other: "SphereField") -> "SphereField":
        """Return the difference of two fields of the same rank."""
        return self + (-other)

    def __neg__(self) -> "SphereField":
        """Return the negated field."""
        return replace(
            self,
            values=-self.values,
            coefficients=None if self.coefficients is None else -self.coefficients,
        )

    def __mul__(self, other: "float | SphereField") -> "SphereField":
        """Return the field scaled by a number or by a scalar field."""
        if isinstance(other, SphereField):
            if other.rank != 0:
                raise ConfigurationError("only scalar fields can multiply a field")
            _check_grid(self, other)
            scale = other.values.reshape(other.values.shape + (1,) * self.rank)
            return replace(self, values=self.values * scale, coefficients=None)
        coefficients = None if self.coefficients is None else self.coefficients * other
        return replace(self, values=self.values * other, coefficients=coefficients)

    __rmul__ = __mul__

    def __truediv__(self, other: float) -> "SphereField":
        """Return the field divided by a number."""
        return self * (1.0 / other)


def _check_grid(first: SphereField, second: SphereField) -> None:
    if first.grid is not second.grid and (
        first.grid.band_limit != second.grid.band_limit
        or first.grid.radius != second.grid.radius
    ):
        raise ConfigurationError(
            f"fields live on different grids: {first.grid}, {second.grid}"
        )


def _check_compatible(first: SphereField, second: SphereField) -> None:
    _check_grid(first, second)
    if first.rank != second.rank:
        raise ConfigurationError(
            f"rank mismatch: cannot combine rank {first.rank} and rank {second.rank}"
        )


def transform(field: SphereField, direction: Direction) -> SphereField:
    """Populate the spectral or the grid representation of a field.

    Args:
        field (SphereField): Field to transform.
        direction (Direction): ``to_spectral`` analyses the grid values,
            ``to_grid`` synthesises the values from the stored coefficients.

    Returns:
        SphereField: Field with both representations populated.

    Raises:
        ConfigurationError: If the spin weight exceeds the band limit, the direction
            is unknown or no coefficients are available for synthesis.
    """
    if field.rank > field.grid.band_limit:
        raise ConfigurationError(
            f"spin weight {field.rank} exceeds band limit {field.grid.band_limit}"
        )
    if direction == "to_spectral":
        return replace(field, coefficients=field.grid.analyse(field.values))
    if direction == "to_grid":
        if field.coefficients is None:
            raise ConfigurationError("field has no spectral coefficients to synthesise")
        values = field.grid.synthesise(field.coefficients)
        if field.is_real:
            values = values.real
        return replace(field, values=values)
    raise ConfigurationError(f"unknown transform direction {direction!r}")


def integrate(field: SphereField, metric: SphereMetric) -> float | complex:
    """Return the integral of a scalar field over (S, g)."""
    if field.rank != 0:
        raise ConfigurationError(
            f"integrate expects a scalar field, got rank {field.rank}"
        )
    total = np.sum(field.values * metric.area_element)
    return float(total) if np.isrealobj(total) else complex(total)


def average(field: SphereField, metric: SphereMetric) -> float | complex:
    """Return the average of a scalar field over (S, g)."""
    return integrate(field, metric) / metric.area
