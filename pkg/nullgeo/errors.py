"""Exception hierarchy shared by every nullgeo subpackage."""


class NullGeoError(Exception):
    """Base class for all nullgeo errors."""


class ConfigurationError(NullGeoError, ValueError):
    """Invalid parameters, schema violations or mismatched inputs."""


class NumericalFailure(NullGeoError, RuntimeError):
    """Non-convergence, degenerate geometry or unstable discretisation."""


class AssertionFailure(NullGeoError):
    """A tolerance asserted by a run did not hold."""

    def __init__(self, message: str, failing: list[str] | None = None) -> None:
        """Initialise the failure.

        Args:
            message (str): Human readable summary.
            failing (list[str] | None): Identifiers of the failing checks.
        """
        super().__init__(message)
        self.failing = failing or []
