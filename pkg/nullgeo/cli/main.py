"""Command-line entry point ``nullgeo <command> [flags]``."""

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from typing import Any

from nullgeo.cli.commands import run
from nullgeo.cli.config import CATALOGS, SAMPLE_FIELDS, RunConfig
from nullgeo.errors import ConfigurationError
from nullgeo.spacetime.optical import FOLIATIONS


def _list_of(kind: Callable[[str], Any]) -> Callable[[str], list[Any]]:
    def parse(text: str) -> list[Any]:
        try:
            return [kind(item) for item in text.split(",") if item]
        except ValueError as error:
            raise argparse.ArgumentTypeError(str(error)) from error

    return parse


def parse_resolution(text: str) -> tuple[int, int]:
    """Parse ``KxL`` into the radial node count and the band limit."""
    radial, separator, band = text.lower().partition("x")
    try:
        if not separator:
            raise ValueError(text)
        return int(radial), int(band)
    except ValueError as error:
        raise argparse.ArgumentTypeError(
            f"resolution must read KxL, got {text!r}"
        ) from error


def parse_segment(text: str) -> list[float]:
    """Parse ``u=A..B[:N]`` into N + 1 evenly spaced labels, N = 4 by default."""
    _, _, span = text.partition("=")
    span, _, count = (span or text).partition(":")
    start, separator, end = span.partition("..")
    try:
        if not separator:
            raise ValueError(text)
        first, last, intervals = float(start), float(end), int(count or 4)
    except ValueError as error:
        raise argparse.ArgumentTypeError(
            f"segment must read u=A..B[:N], got {text!r}"
        ) from error
    if intervals < 1:
        raise argparse.ArgumentTypeError(f"segment needs N >= 1, got {intervals}")
    return [first + (last - first) * k / intervals for k in range(intervals + 1)]


def _json_object(text: str) -> dict[str, Any]:
    try:
        value = json.loads(text)
    except json.JSONDecodeError as error:
        raise argparse.ArgumentTypeError(f"invalid JSON: {error}") from error
    if not isinstance(value, dict):
        raise argparse.ArgumentTypeError("expected a JSON object")
    return value


def _common() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", help="JSON configuration document")
    parser.add_argument("--out", help="report path; stdout when omitted")
    parser.add_argument("--csv", help="table path")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--tol", type=float, help="asserted tolerance")
    parser.add_argument("--band-limit", type=int)
    parser.add_argument(
        "--sweep", type=_list_of(int), help="comma separated resolutions"
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )
    parser.add_argument("--progress", action="store_true", help="show progress bars")
    return parser


def _sphere(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--u", type=float)
    parser.add_argument("--ubar", type=float)
    parser.add_argument(
        "--foliation", choices=FOLIATIONS, help="sphere labels of the adapter"
    )
    parser.add_argument(
        "--params", type=_json_object, help="adapter parameters as JSON"
    )


def build_parser() -> argparse.ArgumentParser:
    """Return the parser of every subcommand."""
    parser = argparse.ArgumentParser(
        prog="nullgeo",
        description="Numerical verification of null-foliation geometry.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    common = [_common()]

    verify = commands.add_parser(
        "verify-identities", parents=common, help="evaluate residual catalogs"
    )
    verify.add_argument("--adapter")
    _sphere(verify)
    verify.add_argument("--catalog", choices=CATALOGS)
    verify.add_argument("--sample", choices=SAMPLE_FIELDS)

    evolve = commands.add_parser(
        "evolve-cone", parents=common, help="integrate the transport equations"
    )
    evolve.add_argument("--adapter")
    _sphere(evolve)
    evolve.add_argument("--ubar-end", type=float)
    evolve.add_argument("--steps", type=int)
    evolve.add_argument("--component")

    transform = commands.add_parser(
        "frame-transform", parents=common, help="fit transformation-law slopes"
    )
    transform.add_argument("--metric", dest="adapter")
    _sphere(transform)
    transform.add_argument("--sizes", type=_list_of(float))
    transform.add_argument(
        "--no-error-terms", dest="error_terms", action="store_false", default=None
    )

    fluxes = commands.add_parser(
        "compute-fluxes", parents=common, help="Bel-Robinson fluxes on a cone"
    )
    fluxes.add_argument("--metric", dest="adapter")
    _sphere(fluxes)
    fluxes.add_argument("--segment", type=parse_segment, dest="labels")
    fluxes.add_argument("--multipliers", type=_list_of(str))
    fluxes.add_argument("--commutator")

    canonical = commands.add_parser(
        "solve-canonical", parents=common, help="canonical foliation near a vertex"
    )
    canonical.add_argument("--background")
    canonical.add_argument("--delta", type=float)
    canonical.add_argument("--gamma", type=float)
    canonical.add_argument("--nodes", type=int)

    harmonic = commands.add_parser(
        "solve-harmonic-disk", parents=common, help="harmonic coordinates on a disk"
    )
    harmonic.add_argument("--metric")
    harmonic.add_argument("--resolution", type=parse_resolution)
    harmonic.add_argument("--certify", action="store_true", default=None)
    return parser


# Flag destinations and the dotted configuration paths they override.
OVERRIDES = {
    "command": "command",
    "out": "output.report",
    "csv": "output.csv",
    "seed": "seed",
    "tol": "tolerance",
    "band_limit": "resolution.band_limit",
    "sweep": "resolution.sweep",
    "u": "sphere.u",
    "ubar": "sphere.ubar",
    "ubar_end": "sphere.ubar_end",
    "labels": "sphere.labels",
    "foliation": "sphere.foliation",
    "params": "adapter.params",
    "catalog": "identities.catalog",
    "sample": "identities.sample",
    "steps": "resolution.steps",
    "component": "transport.component",
    "sizes": "transition.sizes",
    "error_terms": "transition.error_terms",
    "multipliers": "fluxes.multipliers",
    "commutator": "fluxes.commutator",
    "background": "canonical.background",
    "delta": "canonical.delta",
    "gamma": "canonical.gamma",
    "nodes": "resolution.nodes",
    "certify": "harmonic.certify",
}


def overrides(args: argparse.Namespace) -> dict[str, Any]:
    """Return the dotted-path overrides given on the command line."""
    values = vars(args)
    result = {path: values.get(name) for name, path in OVERRIDES.items()}
    if values.get("adapter") is not None:
        result["adapter.name"] = values["adapter"]
    if args.command == "solve-harmonic-disk":
        result["harmonic.metric"] = values.get("metric")
        if values.get("resolution") is not None:
            radial, band_limit = values["resolution"]
            result["resolution.radial"] = radial
            result["resolution.band_limit"] = band_limit
    return result


def main(argv: Sequence[str] | None = None) -> int:
    """Parse the command line, run the command and return the exit status."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = RunConfig.load(args.config, overrides(args))
    except ConfigurationError as error:
        print(f"nullgeo: {error}", file=sys.stderr)
        return 2
    return run(config, progress=args.progress)


if __name__ == "__main__":
    sys.exit(main())
