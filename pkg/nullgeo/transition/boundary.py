"""Relations between slice and null data on a timelike interface through a sphere.

The slice normal is T = 1/2 (nu^-1 lbar + nu l) and the normal of the sphere in
the slice is N = 1/2 (-nu^-1 lbar + nu l). The interface is swept by the spheres
with u = c ubar + const; the lapse relation needs t - (u + ubar) / 2 to be
constant along it.
"""

import logging

import numpy as np

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime.cone import ConeState
from nullgeo.spacetime.slice import SliceState
from nullgeo.sphere import SphereField, covariant_derivative
from nullgeo.structure.reports import ResidualReport, build_report, state_parameters

logger = logging.getLogger(__name__)

GRID_TOLERANCE = 1e-10


def _check_common_sphere(cone: ConeState, slice_state: SliceState) -> None:
    if repr(cone.adapter) != repr(slice_state.adapter):
        raise ConfigurationError(
            f"cone of {cone.adapter!r} and slice of {slice_state.adapter!r} come "
            f"from different spacetimes"
        )
    first, second = cone.grid, slice_state.grid
    if first.shape != second.shape or abs(first.radius - second.radius) > (
        GRID_TOLERANCE * max(first.radius, 1.0)
    ):
        raise ConfigurationError(
            f"cone on {first} and slice on {second} do not share an interface sphere"
        )


def boundary_transition(
    cone: ConeState, slice_state: SliceState, speed: float = 1.0
) -> dict[str, ResidualReport]:
    """Return the residuals of the interface relations on a common sphere.

    Args:
        cone (ConeState): Null data of the sphere.
        slice_state (SliceState): Slice through the same sphere.
        speed (float): Interface slope c with u = c ubar + const.

    Returns:
        dict[str, ResidualReport]: Reports keyed by kappa, epsilon, delta and
            lapse.

    Raises:
        ConfigurationError: If the states live on different spheres, or
            c^-1 - y / 2 is not positive.
    """
    _check_common_sphere(cone, slice_state)
    if not speed > 0.0:
        raise ConfigurationError(f"interface slope must be positive, got {speed}")
    grid = cone.grid
    boundary = slice_state.boundary
    nu = boundary.nu.values
    y = cone["y"].values
    interface = 1.0 / speed - 0.5 * y
    if np.any(interface <= 0.0):
        raise ConfigurationError(
            f"interface slope {speed} is not timelike: c^-1 - y/2 reaches "
            f"{float(np.min(interface)):.3e}"
        )

    weight = nu[..., None, None]
    kappa = -0.5 * (cone["chib"].values / weight + weight * cone["chi"].values)
    log_nu = SphereField(grid, np.log(nu))
    epsilon = cone["zeta"].values - covariant_derivative(log_nu, cone.metric).values
    delta = (
        0.5 * boundary.d3_log_nu.values / nu
        - 0.5 * nu * boundary.d4_log_nu.values
        + cone["omegab"].values / nu
        + nu * cone["omega"].values
    )
    lapse = speed / (speed + 1.0) * (nu + interface / nu)

    residuals = {
        "kappa": SphereField(grid, boundary.kappa.values - kappa, 2),
        "epsilon": SphereField(grid, boundary.epsilon.values - epsilon, 1),
        "delta": SphereField(grid, boundary.delta.values - delta),
        "lapse": SphereField(grid, slice_state.lapse.values - lapse),
    }
    parameters = {
        **state_parameters(cone),
        "speed": speed,
        "level": slice_state.level,
    }
    reports = {
        name: build_report(f"boundary_{name}", residual, cone.metric, parameters)
        for name, residual in residuals.items()
    }
    logger.info(
        "interface relations on S(%g, %g): %s",
        cone.u,
        cone.ubar,
        ", ".join(f"{name} {r.norms['Linf']:.2e}" for name, r in reports.items()),
    )
    return reports
