"""Banach-Picard iteration for the canonical foliation of a cone near its vertex.

The unknowns are the geodesic parameter s(u, omega) of the canonical spheres and
the null lapse Omega = (ds/du). Starting from s_0 = u and Omega_0 = 1 one step
integrates s_{n+1} = int_0^u Omega_n, solves the mean-zero Laplace equation

    lap log Omega_{n+1} = s^-1 lap s + F(s, Ds, D^2 s) - average

on g'(s_{n+1}(u)) and transports the average of log Omega_{n+1} from the vertex.
The deviation s - u is stored instead of s so that the u^-4 weighted norms see
no cancellation near the vertex.
"""

import logging
from collections.abc import Callable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Final, TypeVar

import numpy as np
from scipy import integrate as quadrature
from scipy import interpolate as interpolation
from tqdm import tqdm

from nullgeo.canonical.background import ConeBackground
from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.hodge import HodgeSystem, solve_with_report
from nullgeo.spacetime.differences import fit_slope
from nullgeo.sphere import (
    SphereField,
    SphereGrid,
    SphereMetric,
    average,
    contract,
    covariant_derivative,
    divergence,
    dot,
    laplacian,
    norm,
    outer,
)
from nullgeo.structure.reports import ResidualReport, build_report

logger = logging.getLogger(__name__)

GAMMA_WINDOW: Final = (1.0 / 3.0, 0.5)
EXPECTED_RATES: Final = {"deviation": 3.0, "lapse": 2.0}
RATE_TOLERANCE: Final = 0.2
FLAT_FLOOR: Final = 1e-14
# norm weights u^-4 (s - u) and u^-3 log Omega
WEIGHTS: Final = {"deviation": 4, "lapse": 3}

T = TypeVar("T")


@dataclass(frozen=True)
class CanonicalSettings:
    """Discretisation and solver settings of the canonical iteration.

    Attributes:
        band_limit (int): Band limit of the sphere grids.
        nodes (int): Number of geometric u nodes in [vertex_ratio delta, delta].
        vertex_ratio (float): Smallest u relative to delta.
        max_iterations (int): Largest number of Picard steps.
        solver_tolerance (float): Laplace residual relative to the source.
        bound_limit (float): Largest admissible vertex bound constant A.
        workers (int): Threads sharing the u slices of one step.
    """

    band_limit: int = 8
    nodes: int = 32
    vertex_ratio: float = 1e-3
    max_iterations: int = 60
    solver_tolerance: float = 1e-10
    bound_limit: float = 1e3
    workers: int = 1

    def __post_init__(self) -> None:
        """Validate the settings."""
        if self.band_limit < 2 or self.nodes < 3:
            raise ConfigurationError(
                f"canonical solver needs band limit >= 2 and at least 3 nodes, got "
                f"{self.band_limit} and {self.nodes}"
            )
        if not 0.0 < self.vertex_ratio < 1.0:
            raise ConfigurationError(
                f"vertex ratio must lie in (0, 1), got {self.vertex_ratio}"
            )
        if self.max_iterations < 1 or self.workers < 1:
            raise ConfigurationError(
                f"max_iterations and workers must be positive, got "
                f"{self.max_iterations} and {self.workers}"
            )
        if not (self.solver_tolerance > 0.0 and self.bound_limit > 0.0):
            raise ConfigurationError(
                "solver tolerance and bound limit must be positive"
            )


class ConeGrid:
    """Geometric u nodes with a sphere grid of radius u / 2 at every node."""

    def __init__(self, delta: float, settings: CanonicalSettings) -> None:
        """Initialise the nodes u_j = delta q^j.

        Raises:
            ConfigurationError: If delta is not positive.
        """
        if not delta > 0.0:
            raise ConfigurationError(f"delta must be positive, got {delta}")
        self.delta = float(delta)
        ratios = np.geomspace(settings.vertex_ratio, 1.0, settings.nodes)
        self.labels = self.delta * ratios
        base = SphereGrid(settings.band_limit)
        self.spheres = [base.with_radius(0.5 * u) for u in self.labels]
        self.shape = (self.labels.size,) + base.shape

    @cached_property
    def references(self) -> list[SphereMetric]:
        """Return the round reference metrics 1/4 u^2 gamma."""
        return [SphereMetric.round(sphere) for sphere in self.spheres]

    def from_vertex(self, integrand: np.ndarray) -> np.ndarray:
        """Return int_0^u of a quantity vanishing at the vertex, node by node.

        Simpson's rule on the nodes prefixed with u = 0 is exact for the
        quadratic vertex behaviour of the integrands.
        """
        labels = np.concatenate([[0.0], self.labels])
        values = np.concatenate([np.zeros((1,) + integrand.shape[1:]), integrand])
        return quadrature.cumulative_simpson(values, x=labels, axis=0)

    def __iter__(self) -> Iterator[tuple[float, SphereGrid]]:
        """Iterate over the (u, sphere grid) pairs."""
        return iter(zip(self.labels.tolist(), self.spheres))


@dataclass(frozen=True, eq=False)
class FoliationIterate:
    """One iterate (s_n, Omega_n) on the u nodes.

    Attributes:
        index (int): Iteration number n.
        grid (ConeGrid): Nodes and sphere grids.
        deviation (np.ndarray): s_n - u, shape (nodes, theta, phi).
        log_lapse (np.ndarray): log Omega_n with the same shape.
        contraction (float | None): N_{n-1}, the weighted distance to the
            previous iterate; None for the first iterate.
    """

    index: int
    grid: ConeGrid
    deviation: np.ndarray
    log_lapse: np.ndarray
    contraction: float | None = None

    @classmethod
    def initial(cls, grid: ConeGrid) -> "FoliationIterate":
        """Return s_0 = u, Omega_0 = 1."""
        return cls(0, grid, np.zeros(grid.shape), np.zeros(grid.shape))

    @property
    def parameter(self) -> np.ndarray:
        """Return s_n at every node."""
        return self.grid.labels[:, None, None] + self.deviation

    @property
    def lapse(self) -> np.ndarray:
        """Return Omega_n at every node."""
        return np.exp(self.log_lapse)

    @cached_property
    def norms(self) -> dict[str, float]:
        """Return M^s_n and M^Omega_n."""
        return {
            "deviation": weighted_norm(self.grid, self.deviation, WEIGHTS["deviation"]),
            "lapse": weighted_norm(self.grid, self.log_lapse, WEIGHTS["lapse"]),
        }

    def check(self) -> None:
        """Check s_n is positive and strictly increasing in u and Omega_n finite.

        Raises:
            NumericalFailure: If an invariant fails.
        """
        parameter = self.parameter
        if not (np.all(np.isfinite(parameter)) and np.all(np.isfinite(self.log_lapse))):
            raise NumericalFailure(f"iterate {self.index} is not finite")
        if np.min(parameter) <= 0.0:
            raise NumericalFailure(
                f"iterate {self.index} has non-positive s: min {np.min(parameter):.3e}"
            )
        if np.any(np.diff(parameter, axis=0) <= 0.0):
            raise NumericalFailure(f"s_{self.index} is not increasing in u")


def sobolev_norm(function: SphereField, metric: SphereMetric, scale: float) -> float:
    """Return (sum over i <= 2 of ||(scale D)^i f||_L2^2)^(1/2)."""
    first = covariant_derivative(function, metric)
    second = covariant_derivative(first, metric)
    return float(
        np.sqrt(
            norm(function, metric) ** 2
            + (scale * norm(first, metric)) ** 2
            + (scale**2 * norm(second, metric)) ** 2
        )
    )


def weighted_norm(grid: ConeGrid, values: np.ndarray, weight: int) -> float:
    """Return max over u of u^-weight ||(u D)^{<=2} f||_L2 on 1/4 u^2 gamma."""
    return max(
        sobolev_norm(SphereField(sphere, values[j]), grid.references[j], u) / u**weight
        for j, (u, sphere) in enumerate(grid)
    )


def _map(function: Callable[[int], T], count: int, workers: int) -> list[T]:
    if workers == 1:
        return [function(index) for index in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(function, range(count)))


def _condition_source(
    background: ConeBackground, metric: SphereMetric, u: float, deviation: np.ndarray
) -> SphereField:
    """Return s^-1 lap s + F(s, Ds, D^2 s) on the metric g'(s(u))."""
    grid = metric.grid
    s = u + deviation
    offset = SphereField(grid, deviation)
    gradient = covariant_derivative(offset, metric)
    hessian = covariant_derivative(gradient, metric)
    return laplacian(offset, metric) * SphereField(grid, 1.0 / s) + background.source(
        metric, s, gradient, hessian
    )


def _centred(field: SphereField, metric: SphereMetric) -> SphereField:
    mean = float(np.real(average(field, metric)))
    return field - SphereField.constant(metric.grid, mean)


def _mean_transport(
    background: ConeBackground,
    grid: ConeGrid,
    metrics: list[SphereMetric],
    parameter: np.ndarray,
    log_lapse: np.ndarray,
) -> np.ndarray:
    """Return int_0^u of 1/2 mean((trchib - mean trchib) log Omega) at every node.

    trchib = Omega trchib'(s) is the expansion of the canonical incoming null
    vector and d / du at fixed angle is 1/2 lb.
    """
    integrand = np.empty(grid.labels.size)
    for j, (_, sphere) in enumerate(grid):
        expansion = SphereField(
            sphere,
            np.exp(log_lapse[j]) * background.expansion(sphere, parameter[j]),
        )
        product = _centred(expansion, metrics[j]) * SphereField(sphere, log_lapse[j])
        integrand[j] = 0.5 * float(np.real(average(product, metrics[j])))
    return grid.from_vertex(integrand)


def picard_step(
    background: ConeBackground,
    iterate: FoliationIterate,
    settings: CanonicalSettings | None = None,
) -> FoliationIterate:
    """Return the next iterate (s_{n+1}, Omega_{n+1}).

    Raises:
        NumericalFailure: If s_{n+1} is not positive and increasing or a Laplace
            solve does not converge.
    """
    settings = settings or CanonicalSettings()
    grid = iterate.grid
    deviation = grid.from_vertex(np.expm1(iterate.log_lapse))
    candidate = FoliationIterate(iterate.index + 1, grid, deviation, iterate.log_lapse)
    candidate.check()
    metrics = [
        background.metric(sphere, u, deviation[j]) for j, (u, sphere) in enumerate(grid)
    ]

    def solve_slice(j: int) -> np.ndarray:
        u = float(grid.labels[j])
        metric = metrics[j]
        source = _condition_source(background, metric, u, deviation[j])
        source = _centred(source, metric)
        scale = norm(source, metric)
        if scale == 0.0:
            return np.zeros(metric.grid.shape)
        system = HodgeSystem(
            metric, "Laplacian", tolerance=settings.solver_tolerance * scale
        )
        solution, report = solve_with_report(system, source)
        assert isinstance(solution, SphereField)
        logger.debug(
            "u = %.3e: Laplace solve %d iterations, residual %.3e",
            u,
            report.iterations,
            report.residual,
        )
        return np.real(solution.values)

    oscillation = np.stack(_map(solve_slice, grid.labels.size, settings.workers))
    mean = _mean_transport(
        background, grid, metrics, iterate.parameter, iterate.log_lapse
    )
    log_lapse = oscillation + mean[:, None, None]
    contraction = max(
        weighted_norm(grid, deviation - iterate.deviation, WEIGHTS["deviation"]),
        weighted_norm(grid, log_lapse - iterate.log_lapse, WEIGHTS["lapse"]),
    )
    result = FoliationIterate(
        iterate.index + 1, grid, deviation, log_lapse, contraction
    )
    result.check()
    return result


@dataclass(frozen=True, eq=False)
class CanonicalFoliation:
    """Converged canonical foliation with its iteration diagnostics.

    Attributes:
        background (ConeBackground): Source background.
        delta (float): Outer label of the vertex neighbourhood.
        gamma (float): Contraction parameter in (1/3, 1/2).
        tolerance (float): Stopping threshold on N.
        iterate (FoliationIterate): Final iterate.
        history (list[dict[str, float]]): n, M^s, M^Omega and N of every step.
        bound_constant (float): Measured vertex bound constant A.
        rates (dict[str, float | None]): Fitted exponents of sup |s - u| and
            sup |log Omega| in u; None where they vanish to round-off.
        parameters (dict[str, Any]): Settings of the run.
    """

    background: ConeBackground
    delta: float
    gamma: float
    tolerance: float
    iterate: FoliationIterate
    history: list[dict[str, float]]
    bound_constant: float
    rates: dict[str, float | None] = field(default_factory=dict)
    parameters: dict[str, Any] = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        """Return the number of Picard steps taken."""
        return self.iterate.index

    @property
    def contractions(self) -> list[float]:
        """Return N_n of every step."""
        return [row["N"] for row in self.history]

    @property
    def ratios(self) -> list[float]:
        """Return N_{n+1} / N_n wherever N_n is nonzero."""
        values = self.contractions
        return [
            after / before
            for before, after in zip(values, values[1:])
            if before > 0.0
        ]

    @property
    def bounded(self) -> bool:
        """Return whether M^s_n <= gamma C with C the largest measured M^Omega_n."""
        constant = max(row["M_Omega"] for row in self.history)
        return all(row["M_s"] <= self.gamma * constant for row in self.history)

    def rates_match(self, tolerance: float = RATE_TOLERANCE) -> dict[str, bool]:
        """Return whether every fitted rate is within tolerance of its limit."""
        return {
            name: rate is not None and abs(rate - EXPECTED_RATES[name]) <= tolerance
            for name, rate in self.rates.items()
        }

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-serialisable summary."""
        last = self.history[-1] if self.history else {"M_s": 0.0, "M_Omega": 0.0}
        return {
            "background": repr(self.background),
            "n_iters": self.iterations,
            "M_s": last["M_s"],
            "M_Omega": last["M_Omega"],
            "N_history": self.contractions,
            "ratios": self.ratios,
            "bounded": self.bounded,
            "bound_constant": self.bound_constant,
            "rate_fits": dict(self.rates),
            "parameters": dict(self.parameters),
        }


def stability_threshold(bound: float, gamma: float) -> float:
    """Return the nominal largest delta of the contraction argument.

    The numerical constant of the elliptic estimates is taken to be 1, so the
    value is indicative and only logged.
    """
    constant = 2.0 * bound / (1.0 - 2.0 * gamma)
    return float(np.sqrt((1.0 - 2.0 * gamma) / (4.0 * bound + constant)))


def _fit_rates(iterate: FoliationIterate) -> dict[str, float | None]:
    labels = iterate.grid.labels
    rates: dict[str, float | None] = {}
    fields = {"deviation": iterate.deviation, "lapse": iterate.log_lapse}
    for name, values in fields.items():
        sup = np.max(np.abs(values), axis=(1, 2))
        if np.max(sup) < FLAT_FLOOR:
            rates[name] = None
            continue
        rates[name] = fit_slope(labels, sup)
    return rates


def solve_canonical(
    background: ConeBackground,
    delta: float = 0.1,
    gamma: float = 0.45,
    tolerance: float = 1e-10,
    settings: CanonicalSettings | None = None,
    progress: bool = False,
) -> CanonicalFoliation:
    """Iterate the Picard map until N_n < tolerance.

    Args:
        background (ConeBackground): Geodesic-foliation data of the cone.
        delta (float): Outer label of the vertex neighbourhood.
        gamma (float): Contraction parameter, strictly between 1/3 and 1/2.
        tolerance (float): Stopping threshold on N, in (0, 1).
        settings (CanonicalSettings | None): Discretisation and solver settings.
        progress (bool): Whether to show a progress bar over the steps.

    Raises:
        ConfigurationError: If gamma, delta or the tolerance is out of range,
            delta exceeds the background or the vertex bounds fail.
        NumericalFailure: If N increases twice in a row or the iteration does
            not reach the tolerance.
    """
    settings = settings or CanonicalSettings()
    low, high = GAMMA_WINDOW
    if not low < gamma < high:
        raise ConfigurationError(f"gamma must lie in (1/3, 1/2), got {gamma}")
    if not 0.0 < tolerance < 1.0:
        raise ConfigurationError(f"tolerance must lie in (0, 1), got {tolerance}")
    if not 0.0 < delta <= background.extent:
        raise ConfigurationError(
            f"delta = {delta} is outside the background extent (0, "
            f"{background.extent}]"
        )
    grid = ConeGrid(delta, settings)
    bound = background.bound_constant(SphereGrid(settings.band_limit), grid.labels)
    if not bound <= settings.bound_limit:
        raise ConfigurationError(
            f"vertex bounds fail: measured constant A = {bound:.3e} exceeds "
            f"{settings.bound_limit:.1e}"
        )
    threshold = stability_threshold(bound, gamma)
    if delta > threshold:
        logger.warning(
            "delta = %g exceeds the nominal stability threshold %.3e", delta, threshold
        )

    iterate = FoliationIterate.initial(grid)
    history: list[dict[str, float]] = []
    increases = 0
    steps = tqdm(range(settings.max_iterations), desc="picard", disable=not progress)
    for _ in steps:
        previous = history[-1]["N"] if history else None
        iterate = picard_step(background, iterate, settings)
        assert iterate.contraction is not None
        norms = iterate.norms
        history.append(
            {
                "n": iterate.index,
                "M_s": norms["deviation"],
                "M_Omega": norms["lapse"],
                "N": iterate.contraction,
            }
        )
        logger.debug(
            "step %d: N = %.3e, M_s = %.3e, M_Omega = %.3e",
            iterate.index,
            iterate.contraction,
            norms["deviation"],
            norms["lapse"],
        )
        if iterate.contraction < tolerance:
            break
        increases = increases + 1 if previous and iterate.contraction > previous else 0
        if increases >= 2:
            raise NumericalFailure(
                f"contraction failed: N increased twice in a row to "
                f"{iterate.contraction:.3e} at step {iterate.index}"
            )
    else:
        raise NumericalFailure(
            f"Picard iteration did not reach {tolerance:.1e} in "
            f"{settings.max_iterations} steps, N = {history[-1]['N']:.3e}"
        )

    foliation = CanonicalFoliation(
        background,
        float(delta),
        float(gamma),
        float(tolerance),
        iterate,
        history,
        bound,
        _fit_rates(iterate),
        {
            "band_limit": settings.band_limit,
            "nodes": settings.nodes,
            "vertex_ratio": settings.vertex_ratio,
            "stability_threshold": threshold,
        },
    )
    logger.info(
        "canonical foliation converged in %d steps, N = %.3e",
        foliation.iterations,
        iterate.contraction,
    )
    if not foliation.bounded:
        logger.warning("M^s exceeds gamma times the measured M^Omega constant")
    return foliation


def verify_canonical_conditions(
    foliation: CanonicalFoliation, background: ConeBackground | None = None
) -> dict[str, list[ResidualReport]]:
    """Return the residuals of both canonical conditions sphere by sphere.

    The parameter s is recomputed from the converged lapse. The canonical pair
    differs from the geodesic one by the lapse Omega, f = -Omega^-1 Ds and
    fbar = 0, so on every canonical sphere

        zeta = zeta' + D log Omega - 1/2 chib' . Ds,
        rho = rho' + betab' . Ds + 1/4 alphab'(Ds, Ds),

    with the geodesic fields taken at s. Div zeta + rho - rhobar is evaluated
    with the sphere operators of the induced metric. The averaged omegab is
    reported as the average of d log Omega / du at fixed angle, differentiated
    through an interpolating spline of degree up to five across the u nodes.
    """
    background = background or foliation.background
    iterate = foliation.iterate
    grid = iterate.grid
    deviation = grid.from_vertex(np.expm1(iterate.log_lapse))
    parameter = grid.labels[:, None, None] + deviation
    spline = interpolation.make_interp_spline(
        grid.labels, iterate.log_lapse, k=min(5, grid.labels.size - 1), axis=0
    )
    transport = spline.derivative()(grid.labels)
    condition, lapse = [], []
    for j, (u, sphere) in enumerate(grid):
        metric = background.metric(sphere, u, deviation[j])
        fields = background.geodesic_fields(metric, parameter[j])
        slope = covariant_derivative(SphereField(sphere, parameter[j]), metric)
        log_lapse = SphereField(sphere, iterate.log_lapse[j])
        zeta = (
            fields.zeta
            + covariant_derivative(log_lapse, metric)
            - contract(fields.chib, slope, metric) * 0.5
        )
        rho = (
            fields.rho
            + dot(fields.betab, slope, metric)
            + dot(fields.alphab, outer(slope, slope), metric) * 0.25
        )
        residual = _centred(divergence(zeta, metric) + rho, metric)
        condition.append(
            build_report("canonical_condition", residual, metric, {"u": u})
        )
        mean = float(np.real(average(SphereField(sphere, transport[j]), metric)))
        lapse.append(
            build_report(
                "canonical_mean_lapse",
                SphereField.constant(sphere, mean),
                metric,
                {"u": u},
            )
        )
    return {"canonical_condition": condition, "canonical_mean_lapse": lapse}
