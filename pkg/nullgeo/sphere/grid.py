"""Gauss-Legendre by uniform-longitude quadrature grid on the 2-sphere."""

import logging
from functools import cached_property

import numpy as np
from scipy.special import sph_harm_y

from nullgeo.errors import ConfigurationError

logger = logging.getLogger(__name__)

LEVI_CIVITA = np.zeros((3, 3, 3))
LEVI_CIVITA[0, 1, 2] = LEVI_CIVITA[1, 2, 0] = LEVI_CIVITA[2, 0, 1] = 1.0
LEVI_CIVITA[0, 2, 1] = LEVI_CIVITA[2, 1, 0] = LEVI_CIVITA[1, 0, 2] = -1.0


class SphereGrid:
    """Quadrature grid of band limit L on a round sphere of radius r.

    Colatitudes are the L+1 Gauss-Legendre nodes and longitudes are 2L+2 equally
    spaced samples, so products of harmonics up to total degree 2L+1 are
    integrated exactly. S-tangent tensors are stored as ambient R^3 components
    relative to the orthonormal frame of r^2 times the unit round metric.
    """

    def __init__(self, band_limit: int, radius: float = 1.0) -> None:
        """Initialise the grid.

        Args:
            band_limit (int): Largest harmonic degree L represented exactly.
            radius (float): Radius of the reference round metric.
        """
        if band_limit < 1:
            raise ConfigurationError(f"band_limit must be positive, got {band_limit}")
        if not radius > 0:
            raise ConfigurationError(f"radius must be positive, got {radius}")

        self.band_limit = int(band_limit)
        self.radius = float(radius)

        nodes, weights = np.polynomial.legendre.leggauss(self.band_limit + 1)
        self.theta = np.arccos(nodes[::-1])
        self.weights = weights[::-1]
        self.n_phi = 2 * self.band_limit + 2
        self.phi = 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi

    def __repr__(self) -> str:
        """Return a short description of the grid."""
        return f"SphereGrid(band_limit={self.band_limit}, radius={self.radius})"

    @property
    def shape(self) -> tuple[int, int]:
        """Return the (colatitude, longitude) node counts."""
        return (self.theta.size, self.n_phi)

    @property
    def node_count(self) -> int:
        """Return the total number of quadrature nodes."""
        return self.theta.size * self.n_phi

    def with_radius(self, radius: float) -> "SphereGrid":
        """Return a grid with the same nodes and a different reference radius."""
        return SphereGrid(self.band_limit, radius)

    @cached_property
    def degrees(self) -> np.ndarray:
        """Return the harmonic degree l of every (l, m) coefficient slot."""
        size = self.band_limit + 1
        return np.repeat(np.arange(size)[:, None], 2 * self.band_limit + 1, axis=1)

    @cached_property
    def orders(self) -> np.ndarray:
        """Return the harmonic order m of every (l, m) coefficient slot."""
        size = self.band_limit + 1
        orders = np.arange(-self.band_limit, self.band_limit + 1)
        return np.repeat(orders[None, :], size, axis=0)

    @cached_property
    def legendre(self) -> np.ndarray:
        """Return Y_lm(theta_j, 0) tabulated as (theta, l, m + L)."""
        lmax = self.band_limit
        table = np.zeros((self.theta.size, lmax + 1, 2 * lmax + 1))
        for degree in range(lmax + 1):
            orders = np.arange(-degree, degree + 1)
            values = sph_harm_y(degree, orders[None, :], self.theta[:, None], 0.0)
            table[:, degree, orders + lmax] = np.real(values)
        return table

    @cached_property
    def quadrature(self) -> np.ndarray:
        """Return the unit-sphere quadrature weight of every node."""
        return np.repeat(self.weights[:, None], self.n_phi, axis=1) * (
            2.0 * np.pi / self.n_phi
        )

    @cached_property
    def normal(self) -> np.ndarray:
        """Return the outward unit normal x of every node."""
        sin_t = np.sin(self.theta)[:, None]
        cos_t = np.cos(self.theta)[:, None]
        cos_p = np.cos(self.phi)[None, :]
        sin_p = np.sin(self.phi)[None, :]
        return np.stack(
            np.broadcast_arrays(sin_t * cos_p, sin_t * sin_p, cos_t), axis=-1
        )

    @cached_property
    def theta_hat(self) -> np.ndarray:
        """Return the unit colatitude direction of every node."""
        sin_t = np.sin(self.theta)[:, None]
        cos_t = np.cos(self.theta)[:, None]
        cos_p = np.cos(self.phi)[None, :]
        sin_p = np.sin(self.phi)[None, :]
        return np.stack(
            np.broadcast_arrays(cos_t * cos_p, cos_t * sin_p, -sin_t), axis=-1
        )

    @cached_property
    def phi_hat(self) -> np.ndarray:
        """Return the unit longitude direction of every node."""
        cos_p = np.cos(self.phi)[None, :]
        sin_p = np.sin(self.phi)[None, :]
        zeros = np.zeros((self.theta.size, 1))
        return np.stack(np.broadcast_arrays(-sin_p, cos_p, zeros), axis=-1)

    @cached_property
    def projector(self) -> np.ndarray:
        """Return the tangential projector I - x x^T of every node."""
        x = self.normal
        return np.eye(3) - np.einsum("...a,...b->...ab", x, x)

    @cached_property
    def area_form(self) -> np.ndarray:
        """Return the unit round area form eps_jk = x_i eps_ijk of every node."""
        return np.einsum("...i,ijk->...jk", self.normal, LEVI_CIVITA)

    def harmonic(self, degree: int, order: int) -> np.ndarray:
        """Sample the complex spherical harmonic Y_lm on the nodes."""
        if abs(order) > degree or degree > self.band_limit:
            raise ConfigurationError(
                f"harmonic ({degree}, {order}) is not resolved at L={self.band_limit}"
            )
        return sph_harm_y(degree, order, self.theta[:, None], self.phi[None, :])

    def analyse(self, values: np.ndarray) -> np.ndarray:
        """Return harmonic coefficients (l, m + L, ...) of sampled values."""
        values = np.asarray(values)
        if values.shape[:2] != self.shape:
            raise ConfigurationError(
                f"values of shape {values.shape} do not live on grid {self.shape}"
            )
        lmax = self.band_limit
        spectrum = np.fft.fft(values, axis=1) * (2.0 * np.pi / self.n_phi)
        orders = np.arange(-lmax, lmax + 1) % self.n_phi
        weighted = self.legendre * self.weights[:, None, None]
        return np.einsum("jlm,jm...->lm...", weighted, spectrum[:, orders])

    def synthesise(self, coeffs: np.ndarray) -> np.ndarray:
        """Return complex node values of harmonic coefficients (l, m + L, ...)."""
        coeffs = np.asarray(coeffs)
        lmax = self.band_limit
        partial = np.einsum("jlm,lm...->jm...", self.legendre, coeffs)
        full = np.zeros((self.theta.size, self.n_phi) + coeffs.shape[2:], complex)
        full[:, np.arange(-lmax, lmax + 1) % self.n_phi] = partial
        return np.fft.ifft(full, axis=1) * self.n_phi

    def angular_momentum(self, coeffs: np.ndarray) -> np.ndarray:
        """Return coefficients of x cross grad f, stacked on a leading axis.

        The operator is i L with L = -i x cross grad the angular momentum, applied
        through the Condon-Shortley ladder relations.
        """
        coeffs = np.asarray(coeffs)
        extra = (1,) * (coeffs.ndim - 2)
        degree = self.degrees.reshape(self.degrees.shape + extra)
        order = self.orders.reshape(self.orders.shape + extra)

        raise_factor = np.sqrt(
            np.clip((degree - order) * (degree + order + 1), 0, None)
        )
        lower_factor = np.sqrt(
            np.clip((degree + order) * (degree - order + 1), 0, None)
        )

        l_plus = np.zeros_like(coeffs, dtype=complex)
        l_minus = np.zeros_like(coeffs, dtype=complex)
        l_plus[:, 1:] = raise_factor[:, :-1] * coeffs[:, :-1]
        l_minus[:, :-1] = lower_factor[:, 1:] * coeffs[:, 1:]

        l_x = 0.5 * (l_plus + l_minus)
        l_y = (l_plus - l_minus) / 2j
        l_z = order * coeffs
        return 1j * np.stack([l_x, l_y, l_z])

    def gradient(self, values: np.ndarray) -> np.ndarray:
        """Return the unit-sphere surface gradient with the derivative axis first.

        Input values of shape (theta, phi, ...) give an output of shape
        (theta, phi, 3, ...).
        """
        values = np.asarray(values)
        rotated = self.angular_momentum(self.analyse(values))
        samples = self.synthesise(np.moveaxis(rotated, 0, 2))
        if np.isrealobj(values):
            samples = samples.real
        return -np.einsum("abc,jkb,jkc...->jka...", LEVI_CIVITA, self.normal, samples)

    def laplacian(self, values: np.ndarray) -> np.ndarray:
        """Return the unit-sphere Laplacian of sampled values."""
        values = np.asarray(values)
        coeffs = self.analyse(values)
        extra = (1,) * (coeffs.ndim - 2)
        degree = self.degrees.reshape(self.degrees.shape + extra)
        samples = self.synthesise(-degree * (degree + 1) * coeffs)
        return samples.real if np.isrealobj(values) else samples

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Return the unit-sphere integral of sampled values."""
        return np.einsum("jk,jk...->...", self.quadrature, np.asarray(values))

    def project(self, values: np.ndarray, rank: int) -> np.ndarray:
        """Project every one of the trailing ``rank`` indices onto the tangent plane."""
        result = np.asarray(values)
        for index in range(rank):
            moved = np.moveaxis(result, 2 + index, -1)
            moved = np.einsum("jkab,jk...b->jk...a", self.projector, moved)
            result = np.moveaxis(moved, -1, 2 + index)
        return result

    def round_gradient(self, values: np.ndarray, rank: int) -> np.ndarray:
        """Return the Levi-Civita derivative of r^2 gamma of an ambient tensor.

        The derivative index comes first, followed by the ``rank`` tensor indices.
        """
        derivative = self.gradient(values) / self.radius
        return np.moveaxis(
            self.project(np.moveaxis(derivative, 2, -1), rank), -1, 2
        )
