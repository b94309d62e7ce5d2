"""Batched Levi-Civita connection and curvature algebra in any dimension.

Derivative indices come first: dg[..., a, m, n] = d_a g_mn and
dgamma[..., a, r, m, n] = d_a Gamma^r_mn. The Riemann tensor follows the
convention R^r_smn = d_m Gamma^r_ns - d_n Gamma^r_ms + Gamma^r_mk Gamma^k_ns
- Gamma^r_nk Gamma^k_ms.
"""

import itertools
from functools import cache

import numpy as np


def lowered_christoffel(dg: np.ndarray) -> np.ndarray:
    """Return Gamma_smn = 1/2 (d_m g_sn + d_n g_sm - d_s g_mn)."""
    return 0.5 * (
        np.einsum("...msn->...smn", dg)
        + np.einsum("...nsm->...smn", dg)
        - dg
    )


def christoffel(inverse: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Return Gamma^r_mn from the inverse metric and the metric derivative."""
    return np.einsum("...rs,...smn->...rmn", inverse, lowered_christoffel(dg))


def christoffel_derivative(
    inverse: np.ndarray, dg: np.ndarray, ddg: np.ndarray
) -> np.ndarray:
    """Return d_a Gamma^r_mn from the first and second metric derivatives."""
    d_inverse = -np.einsum("...rp,...apq,...qs->...ars", inverse, dg, inverse)
    d_lowered = 0.5 * (
        np.einsum("...amsn->...asmn", ddg)
        + np.einsum("...ansm->...asmn", ddg)
        - ddg
    )
    return np.einsum(
        "...ars,...smn->...armn", d_inverse, lowered_christoffel(dg)
    ) + np.einsum("...rs,...asmn->...armn", inverse, d_lowered)


def riemann(gamma: np.ndarray, dgamma: np.ndarray) -> np.ndarray:
    """Return R^r_smn from the connection and its derivative."""
    return (
        np.einsum("...mrns->...rsmn", dgamma)
        - np.einsum("...nrms->...rsmn", dgamma)
        + np.einsum("...rmk,...kns->...rsmn", gamma, gamma)
        - np.einsum("...rnk,...kms->...rsmn", gamma, gamma)
    )


def lower_riemann(metric: np.ndarray, mixed: np.ndarray) -> np.ndarray:
    """Return R_rsmn = g_rk R^k_smn."""
    return np.einsum("...rk,...ksmn->...rsmn", metric, mixed)


def ricci(mixed: np.ndarray) -> np.ndarray:
    """Return R_sn = R^m_smn."""
    return np.einsum("...msmn->...sn", mixed)


def kretschmann(metric: np.ndarray, mixed: np.ndarray) -> np.ndarray:
    """Return R_abcd R^abcd."""
    inverse = np.linalg.inv(metric)
    lowered = lower_riemann(metric, mixed)
    raised = np.einsum(
        "...ap,...bq,...cr,...ds,...pqrs->...abcd",
        inverse,
        inverse,
        inverse,
        inverse,
        lowered,
        optimize=True,
    )
    return np.einsum("...abcd,...abcd->...", lowered, raised)


@cache
def permutation_symbol(dimension: int) -> np.ndarray:
    """Return the totally antisymmetric symbol with [0 1 ... d-1] = 1."""
    symbol = np.zeros((dimension,) * dimension)
    for permutation in itertools.permutations(range(dimension)):
        inversions = sum(
            1
            for i in range(dimension)
            for j in range(i + 1, dimension)
            if permutation[i] > permutation[j]
        )
        symbol[permutation] = -1.0 if inversions % 2 else 1.0
    symbol.setflags(write=False)
    return symbol


def volume_form(metric: np.ndarray) -> np.ndarray:
    """Return e_{0 1 ... d-1} = sqrt|det g| times the permutation symbol."""
    dimension = metric.shape[-1]
    density = np.sqrt(np.abs(np.linalg.det(metric)))
    return density.reshape(density.shape + (1,) * dimension) * permutation_symbol(
        dimension
    )


def left_dual(metric: np.ndarray, lowered: np.ndarray) -> np.ndarray:
    """Return the left Hodge dual *R_abcd = 1/2 e_abpq R^pq_cd."""
    inverse = np.linalg.inv(metric)
    raised = np.einsum("...pm,...qn,...mncd->...pqcd", inverse, inverse, lowered)
    return 0.5 * np.einsum("...abpq,...pqcd->...abcd", volume_form(metric), raised)


def weyl_part(metric: np.ndarray, lowered: np.ndarray) -> np.ndarray:
    """Return the trace-free part C_abcd of a covariant Riemann tensor.

    Valid in dimension three and higher; in dimension three the result vanishes.
    """
    dimension = metric.shape[-1]
    inverse = np.linalg.inv(metric)
    ricci_low = np.einsum("...ac,...abcd->...bd", inverse, lowered)
    scalar = np.einsum("...bd,...bd->...", inverse, ricci_low)

    def kulkarni(first: np.ndarray, second: np.ndarray) -> np.ndarray:
        return (
            np.einsum("...ac,...bd->...abcd", first, second)
            - np.einsum("...ad,...bc->...abcd", first, second)
            - np.einsum("...bc,...ad->...abcd", first, second)
            + np.einsum("...bd,...ac->...abcd", first, second)
        )

    trace_free = lowered - kulkarni(metric, ricci_low) / (dimension - 2)
    factor = scalar / ((dimension - 1) * (dimension - 2))
    return trace_free + 0.5 * factor[..., None, None, None, None] * kulkarni(
        metric, metric
    )
