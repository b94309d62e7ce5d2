"""Subcommands of the batch driver and the dispatch from a RunConfig."""

import logging
import sys
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Final

import numpy as np
from tqdm import tqdm

from nullgeo.canonical import (
    CanonicalSettings,
    load_background,
    solve_canonical,
    verify_canonical_conditions,
)
from nullgeo.cli.config import RunConfig
from nullgeo.cli.reports import (
    build_document,
    convergence_table,
    render,
    require_sweep,
    write_report,
    write_table,
)
from nullgeo.energy import (
    cartesian_functions,
    cone_flux,
    mass_momentum,
    rotation_fields,
)
from nullgeo.errors import (
    AssertionFailure,
    ConfigurationError,
    NullGeoError,
    NumericalFailure,
)
from nullgeo.harmonic import (
    DirichletSettings,
    DiskMesh,
    bochner_certificate,
    diffeomorphism_check,
    load_disk_metric,
    solve_dirichlet,
)
from nullgeo.hodge import HodgeSystem, verify_elliptic_estimate
from nullgeo.spacetime import (
    ConeState,
    MetricAdapter,
    builtin_adapter,
    extract_cone_state,
    with_foliation,
)
from nullgeo.sphere import SphereMetric
from nullgeo.sphere.catalog import field_catalog
from nullgeo.structure import (
    COMMUTATOR_IDS,
    ResidualReport,
    eval_averaged_equations,
    eval_bianchi_residuals,
    eval_commutation,
    eval_geodesic_relations,
    eval_structure_residuals,
    integrate_cone,
    transport_convergence,
)
from nullgeo.transition import LAWS, transition_slopes

logger = logging.getLogger(__name__)

EXIT_CODES: Final[dict[type[NullGeoError], int]] = {
    AssertionFailure: 1,
    ConfigurationError: 2,
    NumericalFailure: 3,
}
SWEEP_COMMANDS: Final = ("verify-identities", "evolve-cone")
GEODESIC_FAMILIES: Final = ("averaged", "geodesic")
ELLIPTIC_CATALOG: Final = 20
ELLIPTIC_BOUND: Final = 2.0
RK4_SLOPE: Final = -4.0
ROUNDOFF_FLOOR: Final = 1e-12
EVOLUTION_SPAN: Final = 2.0
TRANSITION_WINDOW: Final = 0.2
CONDITION_SLACK: Final = 10.0
MEAN_LAPSE_FLOOR: Final = 1e-8
CONTRACTION_LIMIT: Final = 0.9
GRAM_CONSTANT: Final = 10.0
DETERMINANT_FLOOR: Final = 0.8
ENERGY_TOLERANCE: Final = 1e-6
REFINED_TOLERANCE: Final = 1e-3
REFINED_FLOOR: Final = 1e-4


@dataclass
class Outcome:
    """Result of one subcommand.

    Attributes:
        body (dict[str, Any]): Deterministic part of the JSON report.
        rows (list[dict[str, Any]]): Rows of the optional CSV table.
        failing (list[str]): Identifiers of asserted checks that failed.
    """

    body: dict[str, Any]
    rows: list[dict[str, Any]] = field(default_factory=list)
    failing: list[str] = field(default_factory=list)


def _require_single(config: RunConfig) -> None:
    if config.sweep and config.command not in SWEEP_COMMANDS:
        raise ConfigurationError(
            f"resolution.sweep: {config.command} has no resolution sweep; use one "
            f"of {list(SWEEP_COMMANDS)}"
        )


def _adapter(config: RunConfig) -> MetricAdapter:
    adapter = builtin_adapter(config.adapter, config.adapter_params)
    return with_foliation(adapter, config.foliation)  # type: ignore[arg-type]


def _sphere_summary(state: ConeState) -> dict[str, Any]:
    return {"u": state.u, "ubar": state.ubar, "radius": state.radius}


def _families(config: RunConfig, geodesic: bool) -> list[str]:
    if config.catalog != "all":
        return [] if config.catalog == "elliptic" else [config.catalog]
    families = ["structure", "bianchi", "commutation"]
    if geodesic:
        families.extend(GEODESIC_FAMILIES)
    else:
        logger.info("skipping %s: foliation is not geodesic", GEODESIC_FAMILIES)
    return families


def _family_reports(
    state: ConeState, family: str, sample: str
) -> list[ResidualReport]:
    if family == "structure":
        return eval_structure_residuals(state)
    if family == "bianchi":
        return eval_bianchi_residuals(state)
    if family == "commutation":
        return [eval_commutation(state, sample, which) for which in COMMUTATOR_IDS]
    if family == "averaged":
        return eval_averaged_equations(state)
    return eval_geodesic_relations(state)


def identity_reports(state: ConeState, config: RunConfig) -> list[ResidualReport]:
    """Evaluate the configured identity families on a cone state.

    Families are evaluated concurrently on up to ``config.threads`` workers.
    """
    families = _families(config, state.adapter.geodesic_foliation)
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        batches = pool.map(
            lambda family: _family_reports(state, family, config.sample), families
        )
        return [report for batch in batches for report in batch]


def elliptic_ratios(metric: SphereMetric, seed: int) -> dict[str, float]:
    """Return the largest D1 and D2 estimate ratios over a seeded catalog."""
    fields = field_catalog(metric, ELLIPTIC_CATALOG, seed)
    by_rank = {
        "D1": [value for value in fields if value.rank == 1],
        "D2": [value for value in fields if value.rank == 2],
    }
    return {
        operator: verify_elliptic_estimate(HodgeSystem(metric, operator), catalog)
        .max_ratio
        for operator, catalog in by_rank.items()
    }


def verify_identities(config: RunConfig, progress: bool = False) -> Outcome:
    """Evaluate the residual catalogs on one sphere or over a band-limit sweep."""
    adapter = _adapter(config)
    u, ubar = config.sphere
    tolerance = config.setting("tolerance")
    if config.sweep:
        errors: dict[str, list[float]] = {}
        sweep = require_sweep(config.sweep)
        for band_limit in tqdm(sweep, desc="band limits", disable=not progress):
            state = extract_cone_state(adapter, u, ubar, band_limit)
            for report in identity_reports(state, config):
                errors.setdefault(report.id, []).append(report.norms["Linf"])
        table = convergence_table(
            config.sweep, errors, floor=tolerance, path=config.csv
        )
        body = {
            "adapter": adapter.name,
            "sphere": {"u": u, "ubar": ubar},
            "band_limits": list(config.sweep),
            "tolerance": tolerance,
            "convergence": {row.name: row.to_dict() for row in table},
        }
        return Outcome(body, failing=[row.name for row in table if not row.passed])

    band_limit = config.setting("band_limit")
    state = extract_cone_state(adapter, u, ubar, band_limit)
    reports = identity_reports(state, config)
    failing = [report.id for report in reports if not report.passes(tolerance)]
    body: dict[str, Any] = {
        "adapter": adapter.name,
        "sphere": _sphere_summary(state),
        "band_limit": band_limit,
        "tolerance": tolerance,
        "reports": [report.to_dict() for report in reports],
    }
    if config.catalog in ("all", "elliptic"):
        ratios = elliptic_ratios(state.metric, config.seed)
        body["elliptic"] = {"seed": config.seed, "max_ratio": ratios}
        failing.extend(
            f"elliptic_{name}"
            for name, ratio in ratios.items()
            if ratio > ELLIPTIC_BOUND
        )
    rows = [
        {"equation": report.id, "family": report.equation.family, **report.norms}
        for report in reports
    ]
    return Outcome(body, rows, failing)


def evolve_cone(config: RunConfig, progress: bool = False) -> Outcome:
    """Integrate the outgoing transport equations and compare with extraction."""
    adapter = _adapter(config)
    u, ubar = config.sphere
    end = config.ubar_end if config.ubar_end is not None else ubar + EVOLUTION_SPAN
    band_limit = config.setting("band_limit")
    if config.sweep:
        require_sweep(config.sweep)
        errors, order = transport_convergence(
            adapter, u, ubar, end, config.sweep, config.component, band_limit=band_limit
        )
        table = convergence_table(
            config.sweep,
            {config.component: errors},
            expected=RK4_SLOPE,
            floor=ROUNDOFF_FLOOR,
            path=config.csv,
        )
        body = {
            "adapter": adapter.name,
            "interval": [ubar, end],
            "steps": list(config.sweep),
            "order": order,
            "convergence": {row.name: row.to_dict() for row in table},
        }
        return Outcome(body, failing=[row.name for row in table if not row.passed])

    tolerance = config.setting("tolerance")
    result = integrate_cone(
        adapter, u, ubar, end, steps=config.setting("steps"), band_limit=band_limit
    )
    if config.component not in result.errors:
        raise ConfigurationError(
            f"transport.component: unknown component {config.component!r}; "
            f"choose one of {sorted(result.errors)}"
        )
    failing = [] if result.errors[config.component] <= tolerance else [config.component]
    body = {
        "adapter": adapter.name,
        "interval": [ubar, end],
        "steps": result.steps,
        "band_limit": band_limit,
        "tolerance": tolerance,
        "sphere": _sphere_summary(result.state),
        "errors": dict(result.errors),
    }
    rows = [
        {"component": name, "error": error} for name, error in result.errors.items()
    ]
    return Outcome(body, rows, failing)


def frame_transform(config: RunConfig, progress: bool = False) -> Outcome:
    """Fit the order of the transformation-law mismatch in the frame change size."""
    if len(config.sizes) < 2:
        raise ConfigurationError(
            f"transition.sizes: need at least two sizes, got {list(config.sizes)}"
        )
    adapter = _adapter(config)
    u, ubar = config.sphere
    slopes = transition_slopes(
        adapter,
        u,
        ubar,
        config.sizes,
        error_terms=config.error_terms,
        band_limit=config.setting("band_limit"),
    )
    expected = 3.0 if config.error_terms else 2.0
    failing = [
        name
        for name in LAWS
        if not abs(slopes[name] - expected) <= TRANSITION_WINDOW
    ]
    body = {
        "adapter": adapter.name,
        "sphere": {"u": u, "ubar": ubar},
        "sizes": list(config.sizes),
        "error_terms": config.error_terms,
        "expected_slope": expected,
        "slopes": slopes,
    }
    rows = [{"law": name, "slope": slope} for name, slope in slopes.items()]
    return Outcome(body, rows, failing)


def compute_fluxes(config: RunConfig, progress: bool = False) -> Outcome:
    """Integrate the Bel-Robinson flux through a segment of an incoming cone."""
    adapter = _adapter(config)
    u, ubar = config.sphere
    labels = list(config.labels) or [u - 1.0, u - 0.5, u]
    tolerance = config.setting("tolerance")
    band_limit = config.setting("band_limit")
    flux = cone_flux(
        adapter,
        ubar,
        labels,
        config.multipliers,
        commutator=config.commutator,
        band_limit=band_limit,
        progress=progress,
    )
    failing = [
        f"bel_robinson_index@u={report.parameters['u']}"
        for report in flux.spheres
        if report.defect > tolerance
    ]
    state = extract_cone_state(
        adapter, labels[-1], ubar, band_limit, transverse=False
    )
    rotations = rotation_fields(state.metric, cartesian_functions(state.grid))
    charges = mass_momentum(state, rotations)
    body = {
        "adapter": adapter.name,
        "ubar": ubar,
        "labels": labels,
        "multipliers": list(config.multipliers),
        "commutator": config.commutator,
        "total": flux.total,
        "spheres": [
            {**report.to_dict(), "defect": report.defect} for report in flux.spheres
        ],
        "charges": {
            "sphere": _sphere_summary(state),
            "hawking_mass": charges.hawking_mass,
            "bondi_loss": charges.bondi_loss,
            "angular_momentum": charges.momentum,
        },
    }
    return Outcome(body, flux.rows(), failing)


def canonical(config: RunConfig, progress: bool = False) -> Outcome:
    """Solve for the canonical foliation and check both conditions."""
    _require_single(config)
    tolerance = config.setting("tolerance")
    background = load_background(config.background)
    settings = CanonicalSettings(
        band_limit=config.setting("band_limit"),
        nodes=config.nodes,
        workers=config.threads,
    )
    foliation = solve_canonical(
        background, config.delta, config.gamma, tolerance, settings, progress
    )
    conditions = verify_canonical_conditions(foliation)
    limits = {
        "canonical_condition": ("L2", CONDITION_SLACK * tolerance),
        "canonical_mean_lapse": (
            "Linf",
            max(CONDITION_SLACK * tolerance, MEAN_LAPSE_FLOOR),
        ),
    }
    failing = [
        f"{family}@u={report.parameters['u']}"
        for family, reports in conditions.items()
        for report in reports
        if not report.passes(limits[family][1], limits[family][0])
    ]
    failing += [
        f"contraction@n={index}"
        for index, ratio in enumerate(foliation.ratios, start=2)
        if not ratio <= CONTRACTION_LIMIT
    ]
    matches = foliation.rates_match()
    failing += [
        f"rate:{name}"
        for name, rate in foliation.rates.items()
        if rate is not None and not matches[name]
    ]
    body = {
        **foliation.to_dict(),
        "rates_match": foliation.rates_match(),
        "residuals": {
            family: [report.to_dict() for report in reports]
            for family, reports in conditions.items()
        },
    }
    return Outcome(body, [dict(row) for row in foliation.history], failing)


def harmonic_disk(config: RunConfig, progress: bool = False) -> Outcome:
    """Solve for harmonic coordinates on a disk and optionally certify them."""
    _require_single(config)
    metric = load_disk_metric(config.metric)
    band_limit = config.setting("band_limit")
    mesh = DiskMesh(metric, radial=config.radial, band_limit=band_limit)
    settings = DirichletSettings(
        tolerance=config.setting("tolerance"), workers=config.threads
    )
    solution = solve_dirichlet(mesh, settings=settings)
    boundary = solution.boundary
    failing = [] if solution.satisfies_maximum_principle else ["maximum_principle"]
    gram_limit = GRAM_CONSTANT * max(metric.size, settings.tolerance)
    if not solution.gram_deviation <= gram_limit:
        failing.append("gram_max_dev")
    body: dict[str, Any] = {
        "metric": metric.name,
        "parameters": dict(metric.params),
        "resolution": mesh.resolution,
        "gram_max_dev": solution.gram_deviation,
        "max_modulus": solution.max_modulus,
        "residuals": list(solution.residuals),
        "iterations": list(solution.iterations),
        "boundary": {
            "centre": boundary.centre,
            "iterations": boundary.iterations,
            "centring_defect": boundary.centring_defect,
            "unit_sum": boundary.sum_of_squares_report().norms,
            "laplace": [
                report.norms for report in solution.boundary_laplace_reports()
            ],
        },
    }
    rows = [
        {"coordinate": index, "residual": residual, "iterations": count}
        for index, (residual, count) in enumerate(
            zip(solution.residuals, solution.iterations, strict=True), start=1
        )
    ]
    if config.certify:
        certificate = bochner_certificate(solution)
        scan = diffeomorphism_check(solution)
        body["bochner_terms"] = dict(certificate.refined.terms)
        body["identities"] = {
            name: summary
            for name, summary in certificate.to_dict().items()
            if name != "estimates"
        }
        body["estimates"] = dict(certificate.estimates)
        body["det_min"] = scan.det_min
        body["diffeomorphism"] = scan.to_dict()
        if certificate.energy.relative() > ENERGY_TOLERANCE:
            failing.append("energy_identity")
        if certificate.refined.relative(REFINED_FLOOR) > REFINED_TOLERANCE:
            failing.append("refined_bochner")
        if scan.flagged:
            failing.append("diffeomorphism")
        if not scan.det_min > DETERMINANT_FLOOR:
            failing.append("det_min")
        rows = [
            {
                "identity": balance.name,
                "lhs": balance.lhs,
                "rhs": balance.rhs,
                "mismatch": balance.mismatch,
            }
            for balance in (
                certificate.energy,
                certificate.bochner,
                certificate.refined,
            )
        ]
    return Outcome(body, rows, failing)


COMMANDS: Final[dict[str, Callable[[RunConfig, bool], Outcome]]] = {
    "verify-identities": verify_identities,
    "evolve-cone": evolve_cone,
    "frame-transform": frame_transform,
    "compute-fluxes": compute_fluxes,
    "solve-canonical": canonical,
    "solve-harmonic-disk": harmonic_disk,
}


def execute(config: RunConfig, progress: bool = False) -> dict[str, Any]:
    """Run the configured subcommand and write its report and table.

    The report goes to ``config.report``, or to stdout when no path is given.

    Returns:
        dict[str, Any]: The report document.

    Raises:
        AssertionFailure: If an asserted tolerance fails; the report is written
            first.
    """
    logger.info("running %s with %d thread(s)", config.command, config.threads)
    outcome = COMMANDS[config.command](config, progress)
    body = {**outcome.body, "failing": outcome.failing, "passed": not outcome.failing}
    document = build_document(config, body)
    if config.report is not None:
        write_report(config.report, document)
    else:
        print(render(document))
    if config.csv is not None and outcome.rows:
        write_table(config.csv, outcome.rows)
    if outcome.failing:
        raise AssertionFailure(
            f"{config.command}: {len(outcome.failing)} check(s) failed",
            outcome.failing,
        )
    return document


def run(config: RunConfig, progress: bool = False) -> int:
    """Run a configuration and return the process exit status."""
    try:
        execute(config, progress)
    except NullGeoError as error:
        code = next(
            (code for kind, code in EXIT_CODES.items() if isinstance(error, kind)),
            1,
        )
        print(f"nullgeo: {error}", file=sys.stderr)
        if isinstance(error, AssertionFailure):
            print("failing: " + ", ".join(error.failing), file=sys.stderr)
        return code
    return 0
