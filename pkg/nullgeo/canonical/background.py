"""Geodesic-foliation data of a vertex cone consumed by the canonical solver.

A background describes the incoming cone from its vertex through the geodesic
affine parameter s: the induced metric g'(s) of the spheres s = const, the
connection and curvature components of the geodesic null pair, the source
fields F1..F4 of the canonical condition rewritten in terms of s, and the
expansion trchib'(s). Every quantity is evaluated pointwise at a function s on
the sphere S_u, whose reference grid has radius u / 2.

With ds(lb') = 2 the metric obeys d g' / ds = chib', and the sources follow
from the geodesic fields as

    F1 = -Div' zeta' - rho',
    F2 = -1/2 nab'_3 zeta' - 1/2 trchib' zeta' + 1/2 Div' chib' - betab',
    F3 = 1/4 nab'_3 chib' + 1/4 trchib' chib' - 1/4 |chib'|^2 g' - 1/4 alphab',
    F4 = 1/2 chib' - s^-1 g'.
"""

import json
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime.adapters import MetricAdapter, Minkowski
from nullgeo.sphere import (
    SphereField,
    SphereGrid,
    SphereMetric,
    average,
    covariant_derivative,
    dot,
    metric_field,
    norm,
    outer,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Sources:
    """The fields F1..F4 of a background on one sphere.

    Attributes:
        f1 (SphereField): Scalar, bounded at the vertex.
        f2 (SphereField): 1-form, bounded at the vertex.
        f3 (SphereField): Symmetric 2-tensor of size s^-2.
        f4 (SphereField): Symmetric 2-tensor of size s.
    """

    f1: SphereField
    f2: SphereField
    f3: SphereField
    f4: SphereField


@dataclass(frozen=True, eq=False)
class GeodesicFields:
    """Components of the geodesic null pair (l', lb') on one sphere s = const.

    Attributes:
        zeta (SphereField): Torsion 1-form zeta'.
        rho (SphereField): Curvature scalar rho'.
        chib (SphereField): Incoming null second fundamental form chib'.
        betab (SphereField): Curvature 1-form betab'.
        alphab (SphereField): Symmetric traceless curvature alphab'.
    """

    zeta: SphereField
    rho: SphereField
    chib: SphereField
    betab: SphereField
    alphab: SphereField


class ConeBackground(ABC):
    """Base class for cone backgrounds near the vertex.

    Subclasses implement the induced metric, the geodesic fields, the sources
    and the expansion as functions of the affine parameter s. The sources and
    the expansion must be the ones the geodesic fields and the metric imply.
    """

    name: str = "background"
    defaults: dict[str, Any] = {}

    def __init__(self, **params: Any) -> None:
        """Initialise the background.

        Args:
            **params: Parameters overriding the class defaults.

        Raises:
            ConfigurationError: If a parameter is unknown or out of range.
        """
        unknown = sorted(set(params) - set(self.defaults))
        if unknown:
            raise ConfigurationError(
                f"{self.name} does not accept parameters {unknown}; "
                f"known parameters are {sorted(self.defaults)}"
            )
        self.params = {**self.defaults, **params}
        self._validate()

    def __repr__(self) -> str:
        """Return the background name and parameters."""
        settings = ", ".join(f"{key}={value!r}" for key, value in self.params.items())
        return f"{type(self).__name__}({settings})"

    def _validate(self) -> None:
        """Check parameter ranges."""

    @property
    def extent(self) -> float:
        """Return the largest u for which the background is defined."""
        return float(self.params.get("extent", np.inf))

    @abstractmethod
    def metric(
        self, grid: SphereGrid, u: float, deviation: np.ndarray
    ) -> SphereMetric:
        """Return g'(s) on S_u for s = u + deviation.

        The grid has radius u / 2, so the round reference is 1/4 u^2 gamma.
        """

    @abstractmethod
    def geodesic_fields(self, metric: SphereMetric, s: np.ndarray) -> GeodesicFields:
        """Return the geodesic-pair components at the parameter s."""

    @abstractmethod
    def sources(self, metric: SphereMetric, s: np.ndarray) -> Sources:
        """Return F1..F4 at the parameter s on the sphere of the metric."""

    @abstractmethod
    def expansion(self, grid: SphereGrid, s: np.ndarray) -> np.ndarray:
        """Return trchib'(s) at every node."""

    def source(
        self,
        metric: SphereMetric,
        s: np.ndarray,
        gradient: SphereField,
        hessian: SphereField,
    ) -> SphereField:
        """Return F = F1 + F2 . Ds + F3 . Ds Ds + F4 . D^2 s."""
        fields = self.sources(metric, s)
        return (
            fields.f1
            + dot(fields.f2, gradient, metric)
            + dot(fields.f3, outer(gradient, gradient), metric)
            + dot(fields.f4, hessian, metric)
        )

    def bound_constant(self, grid: SphereGrid, labels: np.ndarray) -> float:
        """Return the smallest A with the vertex bounds on the geodesic spheres.

        The bounds are |F1|, |F2| <= A, |F3| <= A s^-2, |F4| <= A s and
        |trchib' - mean trchib'| <= A s, sampled at s = u for every label.
        """
        constant = 0.0
        for u in labels:
            sphere = grid.with_radius(0.5 * u)
            s = np.full(sphere.shape, float(u))
            metric = self.metric(sphere, float(u), np.zeros(sphere.shape))
            fields = self.sources(metric, s)
            expansion = SphereField(sphere, self.expansion(sphere, s))
            mean = float(np.real(average(expansion, metric)))
            spread = float(np.max(np.abs(expansion.values - mean)))
            constant = max(
                constant,
                norm(fields.f1, metric, "Linf"),
                norm(fields.f2, metric, "Linf"),
                u**2 * norm(fields.f3, metric, "Linf"),
                norm(fields.f4, metric, "Linf") / u,
                spread / u,
            )
        return constant


def _geodesic_metric(
    grid: SphereGrid, u: float, deviation: np.ndarray, bump: np.ndarray | float
) -> SphereMetric:
    """Return 1/4 s^2 (1 + bump) gamma relative to the reference 1/4 u^2 gamma."""
    ratio = deviation / u
    values = ratio * (2.0 + ratio) + (1.0 + ratio) ** 2 * bump
    return SphereMetric.from_scalar_perturbation(grid, values)


class MinkowskiBackground(ConeBackground):
    """Light cone of a point of Minkowski space with its affine foliation.

    The spheres are round of radius s / 2 and chib' = (2 / s) g' is the only
    nonvanishing component, so that F1, F2 and F4 vanish and F3 = -s^-2 g'.
    """

    name = "minkowski"

    def metric(
        self, grid: SphereGrid, u: float, deviation: np.ndarray
    ) -> SphereMetric:
        """Return the round metric 1/4 s^2 gamma."""
        return _geodesic_metric(grid, u, deviation, 0.0)

    def geodesic_fields(self, metric: SphereMetric, s: np.ndarray) -> GeodesicFields:
        """Return the flat components."""
        grid = metric.grid
        chib = metric_field(metric) * SphereField(grid, 2.0 / s)
        form = SphereField.zeros(grid, 1)
        return GeodesicFields(
            form, SphereField.zeros(grid), chib, form, SphereField.zeros(grid, 2)
        )

    def sources(self, metric: SphereMetric, s: np.ndarray) -> Sources:
        """Return the flat sources."""
        grid = metric.grid
        f3 = metric_field(metric) * SphereField(grid, -1.0 / s**2)
        zero = SphereField.zeros(grid, 2)
        return Sources(SphereField.zeros(grid), SphereField.zeros(grid, 1), f3, zero)

    def expansion(self, grid: SphereGrid, s: np.ndarray) -> np.ndarray:
        """Return 4 / s."""
        return 4.0 / s


class SyntheticBackground(ConeBackground):
    """Flat cone perturbed by harmonic data Y of a chosen degree and order.

    The spheres are conformal to the round ones,
    g'(s) = 1/4 s^2 (1 + metric s^2 Y) exp(expansion s^2 Y / 4) gamma, so that
    chib' = d g' / ds = phi g' with

        phi = 2 / s + 2 metric s Y / (1 + metric s^2 Y) + expansion s Y / 2.

    The curvature is rho' = -epsilon Y with alphab' = 0 and zeta' = 0, and betab'
    is chosen so that F2 = drift (s / 2) DY. The sources are then F1 = epsilon Y,
    F3 = 1/2 (d phi / ds) g' and F4 = (phi / 2 - 1 / s) g', and trchib' = 2 phi.
    """

    name = "synthetic"
    defaults: dict[str, Any] = {
        "epsilon": 1e-3,
        "drift": 0.0,
        "metric": 0.0,
        "expansion": 0.0,
        "degree": 2,
        "order": 0,
        "extent": 1.0,
    }

    def _validate(self) -> None:
        """Check the harmonic and the extent."""
        degree, order = self.params["degree"], self.params["order"]
        if not (isinstance(degree, int) and isinstance(order, int)):
            raise ConfigurationError(
                f"harmonic degree and order must be integers, got {degree}, {order}"
            )
        if degree < 1 or abs(order) > degree:
            raise ConfigurationError(
                f"synthetic sources need a non-constant harmonic, got ({degree}, "
                f"{order})"
            )
        if not self.params["extent"] > 0.0:
            raise ConfigurationError(
                f"extent must be positive, got {self.params['extent']}"
            )
        for key in ("epsilon", "drift", "metric", "expansion"):
            if not np.isfinite(self.params[key]):
                raise ConfigurationError(
                    f"{key} must be finite, got {self.params[key]}"
                )

    def harmonic(self, grid: SphereGrid) -> SphereField:
        """Return the real harmonic Y on the grid."""
        return SphereField.harmonic(grid, self.params["degree"], self.params["order"])

    def _profile(
        self, grid: SphereGrid, s: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return phi with its s derivative and its derivative in Y at fixed s."""
        harmonic = self.harmonic(grid).values
        bump, stretch = self.params["metric"], self.params["expansion"]
        conformal = 1.0 + bump * s**2 * harmonic
        phi = (
            2.0 / s
            + 2.0 * bump * s * harmonic / conformal
            + 0.5 * stretch * s * harmonic
        )
        along = (
            -2.0 / s**2
            + 2.0 * bump * harmonic * (2.0 - conformal) / conformal**2
            + 0.5 * stretch * harmonic
        )
        across = 2.0 * bump * s / conformal**2 + 0.5 * stretch * s
        return phi, along, across

    def metric(
        self, grid: SphereGrid, u: float, deviation: np.ndarray
    ) -> SphereMetric:
        """Return 1/4 s^2 (1 + metric s^2 Y) exp(expansion s^2 Y / 4) gamma."""
        s = u + deviation
        harmonic = self.harmonic(grid).values
        conformal = (1.0 + self.params["metric"] * s**2 * harmonic) * np.exp(
            0.25 * self.params["expansion"] * s**2 * harmonic
        )
        return _geodesic_metric(grid, u, deviation, conformal - 1.0)

    def geodesic_fields(self, metric: SphereMetric, s: np.ndarray) -> GeodesicFields:
        """Return the harmonic components."""
        grid = metric.grid
        harmonic = self.harmonic(grid)
        phi, _, across = self._profile(grid, s)
        betab = covariant_derivative(harmonic, metric) * SphereField(
            grid, 0.5 * across - 0.5 * self.params["drift"] * s
        )
        return GeodesicFields(
            SphereField.zeros(grid, 1),
            harmonic * -self.params["epsilon"],
            metric_field(metric) * SphereField(grid, phi),
            betab,
            SphereField.zeros(grid, 2),
        )

    def sources(self, metric: SphereMetric, s: np.ndarray) -> Sources:
        """Return the harmonic sources."""
        grid = metric.grid
        harmonic = self.harmonic(grid)
        g = metric_field(metric)
        phi, along, _ = self._profile(grid, s)
        f1 = harmonic * self.params["epsilon"]
        f2 = covariant_derivative(harmonic, metric) * SphereField(
            grid, 0.5 * self.params["drift"] * s
        )
        f3 = g * SphereField(grid, 0.5 * along)
        f4 = g * SphereField(grid, 0.5 * phi - 1.0 / s)
        return Sources(f1, f2, f3, f4)

    def expansion(self, grid: SphereGrid, s: np.ndarray) -> np.ndarray:
        """Return 2 phi."""
        return 2.0 * self._profile(grid, s)[0]

    @classmethod
    def from_file(cls, path: str | Path) -> "SyntheticBackground":
        """Load the parameters from a JSON object.

        Raises:
            ConfigurationError: If the file is unreadable or not an object.
        """
        try:
            document = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as error:
            raise ConfigurationError(
                f"cannot read synthetic background {path}: {error}"
            ) from error
        if not isinstance(document, dict):
            raise ConfigurationError(
                f"synthetic background {path} must hold a JSON object"
            )
        logger.info("loaded synthetic background from %s", path)
        return cls(**document)


BACKGROUNDS: dict[str, type[ConeBackground]] = {
    MinkowskiBackground.name: MinkowskiBackground,
    SyntheticBackground.name: SyntheticBackground,
}


def background_from_adapter(adapter: MetricAdapter) -> ConeBackground:
    """Return the background of a vertex cone of a metric-backed spacetime.

    Raises:
        ConfigurationError: If no extractor exists for the adapter.
    """
    if not isinstance(adapter, Minkowski):
        raise ConfigurationError(
            f"no canonical background extractor for {adapter.name!r}; "
            "use a synthetic background"
        )
    return MinkowskiBackground()


def load_background(locator: str) -> ConeBackground:
    """Return a background from ``minkowski`` or ``synthetic:<file>``.

    Raises:
        ConfigurationError: If the background name is not recognised.
    """
    if locator == MinkowskiBackground.name:
        return MinkowskiBackground()
    kind, _, path = locator.partition(":")
    if kind == SyntheticBackground.name:
        return SyntheticBackground.from_file(path) if path else SyntheticBackground()
    raise ConfigurationError(
        f"unknown background {locator!r}; use 'minkowski' or 'synthetic:<file>'"
    )
