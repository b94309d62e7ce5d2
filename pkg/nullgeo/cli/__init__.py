from nullgeo.cli.commands import COMMANDS, Outcome, execute, run
from nullgeo.cli.config import SCHEMA, RunConfig, canonical_json
from nullgeo.cli.reports import (
    ConvergenceRow,
    build_document,
    convergence_table,
    write_report,
    write_table,
)

__all__ = [
    "COMMANDS",
    "SCHEMA",
    "ConvergenceRow",
    "Outcome",
    "RunConfig",
    "build_document",
    "canonical_json",
    "convergence_table",
    "execute",
    "run",
    "write_report",
    "write_table",
]
