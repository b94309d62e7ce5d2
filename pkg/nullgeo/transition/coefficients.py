"""Coefficients (lambda, f, fbar) of a change of null frame."""

import logging
from dataclasses import dataclass

import numpy as np

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime.frames import NullPair, norm_squared, project

logger = logging.getLogger(__name__)

MAX_SIZE = 0.3


def _radial(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = points[..., 1:]
    return points[..., 0], x / np.linalg.norm(x, axis=-1)[..., None]


def _lapse_shape(points: np.ndarray) -> np.ndarray:
    time, unit = _radial(points)
    return np.cos(0.1 * time) * unit[..., 0] + 0.5 * unit[..., 2] ** 2


def _outgoing_shape(points: np.ndarray) -> np.ndarray:
    time, unit = _radial(points)
    return np.stack(
        [
            np.zeros_like(time),
            unit[..., 1] + 0.2,
            -unit[..., 0] + 0.3 * unit[..., 2],
            0.5 + 0.1 * np.sin(0.1 * time),
        ],
        axis=-1,
    )


def _incoming_shape(points: np.ndarray) -> np.ndarray:
    time, unit = _radial(points)
    return np.stack(
        [
            np.zeros_like(time),
            0.4 - unit[..., 2],
            unit[..., 0] * unit[..., 1] + 0.5,
            unit[..., 1] + 0.05 * np.cos(0.1 * time),
        ],
        axis=-1,
    )


@dataclass(frozen=True)
class TransitionCoefficients:
    """Smooth transition coefficients with independent amplitudes.

    log lambda, f and fbar are fixed smooth shapes of the point, scaled by their
    amplitudes; f and fbar are projected onto the horizontal spaces of the frame
    they act on.

    Attributes:
        lapse (float): Amplitude of log lambda.
        outgoing (float): Amplitude of f.
        incoming (float): Amplitude of fbar.
        uniform_lapse (bool): Use the constant log lambda = lapse instead of the
            varying shape.
    """

    lapse: float = 0.0
    outgoing: float = 0.0
    incoming: float = 0.0
    uniform_lapse: bool = False

    def __post_init__(self) -> None:
        """Reject non-finite amplitudes."""
        amplitudes = (self.lapse, self.outgoing, self.incoming)
        if not all(np.isfinite(value) for value in amplitudes):
            raise ConfigurationError(
                f"transition amplitudes must be finite, got {amplitudes}"
            )

    @classmethod
    def generic(cls, size: float) -> "TransitionCoefficients":
        """Return coefficients with every amplitude equal to size."""
        return cls(size, size, size)

    @property
    def is_identity(self) -> bool:
        """Return whether lambda = 1 and f = fbar = 0."""
        return self.lapse == 0.0 and self.outgoing == 0.0 and self.incoming == 0.0

    def log_lambda(self, points: np.ndarray) -> np.ndarray:
        """Return log lambda at the points."""
        if self.uniform_lapse:
            return np.full(points.shape[:-1], float(self.lapse))
        return self.lapse * _lapse_shape(points)

    def forms(
        self, pair: NullPair, points: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Return the lowered horizontal 1-forms f and fbar of the pair."""
        projector = pair.projector
        return (
            self.outgoing * project(projector, _outgoing_shape(points), 1),
            self.incoming * project(projector, _incoming_shape(points), 1),
        )

    def check(self, pair: NullPair, points: np.ndarray) -> None:
        """Verify the coefficients stay in the small-deformation regime.

        Raises:
            ConfigurationError: If |log lambda|, |f| or |fbar| exceeds MAX_SIZE.
        """
        outgoing, incoming = self.forms(pair, points)
        sizes = {
            "log lambda": float(np.max(np.abs(self.log_lambda(points)))),
            "f": float(np.sqrt(np.max(norm_squared(pair, outgoing, 1)))),
            "fbar": float(np.sqrt(np.max(norm_squared(pair, incoming, 1)))),
        }
        for label, size in sizes.items():
            if size > MAX_SIZE:
                raise ConfigurationError(
                    f"transition coefficient {label} has size {size:.3f}; frame "
                    f"changes are limited to {MAX_SIZE}"
                )
        logger.debug("transition coefficient sizes %s", sizes)
