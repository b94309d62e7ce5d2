"""Serialisation of sphere fields and sampling on the two coordinate charts."""

import itertools
import json
import logging
from pathlib import Path

import numpy as np
from scipy.special import sph_harm_y

from nullgeo.errors import ConfigurationError
from nullgeo.sphere.field import SphereField, transform
from nullgeo.sphere.grid import SphereGrid

logger = logging.getLogger(__name__)

CHART_MARGIN = np.pi / 8


def evaluate(
    coefficients: np.ndarray, theta: np.ndarray, phi: np.ndarray
) -> np.ndarray:
    """Evaluate a harmonic expansion at arbitrary points.

    Args:
        coefficients (np.ndarray): Coefficients of shape (L + 1, 2L + 1, ...).
        theta (np.ndarray): Colatitudes.
        phi (np.ndarray): Longitudes, broadcastable against ``theta``.

    Returns:
        np.ndarray: Complex values of shape broadcast(theta, phi) + trailing shape.
    """
    coefficients = np.asarray(coefficients)
    lmax = coefficients.shape[0] - 1
    theta, phi = np.broadcast_arrays(np.asarray(theta), np.asarray(phi))
    trailing = coefficients.shape[2:]
    result = np.zeros(theta.shape + trailing, complex)
    for degree in range(lmax + 1):
        orders = np.arange(-degree, degree + 1)
        basis = sph_harm_y(degree, orders, theta[..., None], phi[..., None])
        block = coefficients[degree, orders + lmax]
        result += np.tensordot(basis, block, axes=([-1], [0]))
    return result


def two_patch_sample(
    field: SphereField, resolution: int = 16
) -> dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Sample a field on two overlapping charts with colatitude in [pi/8, 7pi/8].

    The ``north`` chart uses the standard polar axis e_z; the ``east`` chart uses
    the polar axis e_x with longitudes measured from e_y. Values are returned in
    ambient components.

    Returns:
        dict: Chart name to (chart colatitudes, chart longitudes, values).
    """
    coefficients = np.asarray(transform(field, "to_spectral").coefficients)
    chart_theta = np.linspace(CHART_MARGIN, np.pi - CHART_MARGIN, resolution)
    chart_phi = np.linspace(0.0, 2.0 * np.pi, 2 * resolution, endpoint=False)
    grid_theta, grid_phi = np.meshgrid(chart_theta, chart_phi, indexing="ij")

    samples = {}
    for chart in ("north", "east"):
        if chart == "north":
            theta, phi = grid_theta, grid_phi
        else:
            x = np.cos(grid_theta)
            y = np.sin(grid_theta) * np.cos(grid_phi)
            z = np.sin(grid_theta) * np.sin(grid_phi)
            theta = np.arccos(np.clip(z, -1.0, 1.0))
            phi = np.mod(np.arctan2(y, x), 2.0 * np.pi)
        values = evaluate(coefficients, theta, phi)
        if field.is_real:
            values = values.real
        samples[chart] = (grid_theta, grid_phi, values)
    return samples


def save_coefficients(field: SphereField, path: str | Path) -> None:
    """Write the spectral coefficients of a field as JSON.

    Entries are keyed by the ambient component multi-index, the degree l and the
    order m; scalar fields use the empty component.
    """
    spectral = transform(field, "to_spectral")
    coefficients = np.asarray(spectral.coefficients)
    lmax = field.grid.band_limit
    entries = []
    for component in itertools.product(range(3), repeat=field.rank):
        block = coefficients[(slice(None), slice(None)) + component]
        for degree in range(lmax + 1):
            for order in range(-degree, degree + 1):
                value = complex(block[degree, order + lmax])
                entries.append(
                    {
                        "component": list(component),
                        "l": degree,
                        "m": order,
                        "re": value.real,
                        "im": value.imag,
                    }
                )
    document = {
        "band_limit": lmax,
        "radius": field.grid.radius,
        "rank": field.rank,
        "symmetric": field.symmetric,
        "traceless": field.traceless,
        "real": field.is_real,
        "coefficients": entries,
    }
    Path(path).write_text(json.dumps(document, indent=2))
    logger.debug("wrote %d coefficients to %s", len(entries), path)


def load_coefficients(path: str | Path) -> SphereField:
    """Read a field written by :func:`save_coefficients`."""
    try:
        document = json.loads(Path(path).read_text())
        lmax = int(document["band_limit"])
        rank = int(document["rank"])
        grid = SphereGrid(lmax, float(document["radius"]))
        coefficients = np.zeros((lmax + 1, 2 * lmax + 1) + (3,) * rank, complex)
        for entry in document["coefficients"]:
            index = (entry["l"], entry["m"] + lmax) + tuple(entry["component"])
            coefficients[index] = complex(entry["re"], entry["im"])
    except (KeyError, TypeError, ValueError, IndexError) as error:
        raise ConfigurationError(
            f"malformed coefficient file {path}: {error}"
        ) from error

    values = grid.synthesise(coefficients)
    if document.get("real", True):
        values = values.real
    return SphereField(
        grid,
        values,
        rank,
        bool(document.get("symmetric", False)),
        bool(document.get("traceless", False)),
        coefficients,
    )


def save_grid_csv(field: SphereField, path: str | Path) -> None:
    """Write the grid values of a real field as CSV rows (theta, phi, value...)."""
    grid = field.grid
    theta, phi = np.meshgrid(grid.theta, grid.phi, indexing="ij")
    flat = np.real(field.values).reshape(grid.node_count, -1)
    columns = ["theta", "phi"] + [
        "v" + "".join(str(i) for i in component) if component else "value"
        for component in itertools.product(range(3), repeat=field.rank)
    ]
    table = np.column_stack([theta.ravel(), phi.ravel(), flat])
    np.savetxt(path, table, delimiter=",", header=",".join(columns), comments="")


def load_grid_csv(path: str | Path, grid: SphereGrid, rank: int = 0) -> SphereField:
    """Read a field written by :func:`save_grid_csv` back onto ``grid``."""
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    expected = 2 + 3**rank
    if table.shape != (grid.node_count, expected):
        raise ConfigurationError(
            f"grid dump {path} has shape {table.shape}, expected "
            f"{(grid.node_count, expected)}"
        )
    values = table[:, 2:].reshape(grid.shape + (3,) * rank)
    return SphereField(grid, values, rank)
