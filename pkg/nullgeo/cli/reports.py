"""Report documents, CSV tables and convergence tables of CLI runs."""

import csv
import json
import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Final

import numpy as np
import scipy

from nullgeo.cli.config import RunConfig
from nullgeo.errors import ConfigurationError, NumericalFailure
from nullgeo.spacetime.differences import fit_slope

logger = logging.getLogger(__name__)

SLOPE_WINDOW: Final = 0.3
SPECTRAL_SLOPE: Final = -4.0
MIN_SWEEP: Final = 3


def package_versions() -> dict[str, str]:
    """Return the versions of nullgeo and its numerical dependencies."""
    try:
        own = version("nullgeo")
    except PackageNotFoundError:
        own = "unknown"
    return {"nullgeo": own, "numpy": np.__version__, "scipy": scipy.__version__}


def to_plain(value: Any) -> Any:
    """Convert numpy scalars, arrays and tuples to JSON types; NaN becomes None."""
    if isinstance(value, Mapping):
        return {str(key): to_plain(item) for key, item in value.items()}
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, list | tuple):
        return [to_plain(item) for item in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, float | np.floating):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def build_document(config: RunConfig, body: dict[str, Any]) -> dict[str, Any]:
    """Wrap a command body with the configuration, its hash and the versions.

    Only the metadata block depends on when the run happened.
    """
    return {
        "metadata": {"timestamp": datetime.now(timezone.utc).isoformat()},
        "command": config.command,
        "config": config.to_document(),
        "config_hash": config.digest,
        "versions": package_versions(),
        "body": to_plain(body),
    }


def render(document: dict[str, Any]) -> str:
    """Return a report document as indented, key-sorted JSON."""
    return json.dumps(to_plain(document), indent=2, sort_keys=True, allow_nan=False)


def write_report(path: str | Path, document: dict[str, Any]) -> Path:
    """Write a report document as indented, key-sorted JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render(document) + "\n")
    logger.info("wrote report %s", path)
    return path


def write_table(path: str | Path, rows: Sequence[Mapping[str, Any]]) -> Path:
    """Write rows as CSV with the union of their keys as header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header: list[str] = []
    for row in rows:
        header.extend(key for key in row if key not in header)
    with path.open("w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=header, restval="")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: to_plain(item) for key, item in row.items()})
    logger.info("wrote %d rows to %s", len(rows), path)
    return path


@dataclass(frozen=True)
class ConvergenceRow:
    """Errors of one quantity over a resolution sweep and their fitted order.

    Attributes:
        name (str): Quantity, usually an equation id.
        errors (list[float]): Error at each resolution.
        slope (float | None): Log-log slope of error against resolution.
        expected (float | None): Target slope, or None for spectral decay.
        monotone (bool): Whether the errors decrease with resolution.
        passed (bool): Whether the order meets the target.
    """

    name: str
    errors: list[float]
    slope: float | None
    expected: float | None
    monotone: bool
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-ready summary."""
        return {
            "errors": list(self.errors),
            "slope": self.slope,
            "expected": self.expected,
            "monotone": self.monotone,
            "passed": self.passed,
        }


def require_sweep(resolutions: Sequence[int]) -> list[int]:
    """Return the resolutions of a sweep as integers.

    Raises:
        ConfigurationError: If fewer than three resolutions are given.
    """
    resolutions = [int(value) for value in resolutions]
    if len(resolutions) < MIN_SWEEP:
        raise ConfigurationError(
            f"sweep required: convergence table needs at least {MIN_SWEEP} "
            f"resolutions, got {resolutions}"
        )
    return resolutions


def convergence_table(
    resolutions: Sequence[int],
    errors: Mapping[str, Sequence[float]],
    expected: float | None = None,
    floor: float = 0.0,
    path: str | Path | None = None,
) -> list[ConvergenceRow]:
    """Fit the order of every quantity over a resolution sweep.

    With ``expected`` the slope must lie within SLOPE_WINDOW of it; without, the
    decay must be spectral, steeper than SPECTRAL_SLOPE. Quantities whose errors
    all lie below ``floor`` pass regardless of slope.

    Raises:
        ConfigurationError: If fewer than three resolutions are given or an
            error list does not match them.
    """
    resolutions = require_sweep(resolutions)
    table = []
    for name, values in errors.items():
        values = [float(value) for value in values]
        if len(values) != len(resolutions):
            raise ConfigurationError(
                f"{name} has {len(values)} errors for {len(resolutions)} resolutions"
            )
        try:
            slope = fit_slope(resolutions, values)
        except NumericalFailure:
            slope = None
        monotone = all(b <= a for a, b in zip(values, values[1:], strict=False))
        if not monotone:
            logger.warning("errors of %s do not decrease: %s", name, values)
        if max(values) <= floor:
            passed = True
        elif slope is None:
            passed = False
        elif expected is None:
            passed = slope < SPECTRAL_SLOPE
        else:
            passed = abs(slope - expected) <= SLOPE_WINDOW
        table.append(ConvergenceRow(name, values, slope, expected, monotone, passed))
    if path is not None:
        rows = [
            {
                "name": row.name,
                "resolution": resolution,
                "error": error,
                "slope": row.slope,
                "expected": "spectral" if expected is None else expected,
                "monotone": row.monotone,
                "passed": row.passed,
            }
            for row in table
            for resolution, error in zip(resolutions, row.errors, strict=True)
        ]
        write_table(path, rows)
    return table
