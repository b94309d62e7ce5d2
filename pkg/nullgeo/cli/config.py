"""Run configuration: one JSON document validated against a schema table.

Fields are addressed by dotted paths such as ``resolution.band_limit``; every
validation error names the path of the offending field.
"""

import hashlib
import json
import logging
import os
from collections.abc import Callable
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Final

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime.optical import FOLIATIONS

logger = logging.getLogger(__name__)

COMMANDS: Final = (
    "verify-identities",
    "evolve-cone",
    "frame-transform",
    "compute-fluxes",
    "solve-canonical",
    "solve-harmonic-disk",
)
CATALOGS: Final = (
    "all",
    "structure",
    "bianchi",
    "commutation",
    "averaged",
    "geodesic",
    "elliptic",
)
SAMPLE_FIELDS: Final = ("scalar", "one_form", "symmetric")
THREADS_VARIABLE: Final = "NULLGEO_THREADS"

# Values of unset resolution and tolerance fields, per command.
COMMAND_DEFAULTS: Final[dict[str, dict[str, Any]]] = {
    "verify-identities": {"band_limit": 16, "tolerance": 1e-9},
    "evolve-cone": {"band_limit": 8, "steps": 128, "tolerance": 1e-6},
    "frame-transform": {"band_limit": 6, "tolerance": 0.3},
    "compute-fluxes": {"band_limit": 8, "tolerance": 1e-6},
    "solve-canonical": {"band_limit": 8, "tolerance": 1e-10},
    "solve-harmonic-disk": {"band_limit": 16, "tolerance": 1e-8},
}
DEFAULT_SPHERES: Final = {"schwarzschild": (0.0, 20.0)}
FLAT_SPHERE: Final = (-2.0, 2.0)


def canonical_json(value: Any) -> str:
    """Return the key-sorted compact JSON text of a value."""
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _positive(value: Any) -> bool:
    return value > 0


def _unit_interval(value: Any) -> bool:
    return 0.0 < value < 1.0


@dataclass(frozen=True)
class Option:
    """One leaf of the schema.

    Attributes:
        name (str): Attribute of RunConfig holding the value.
        kind (str): ``int``, ``float``, ``bool``, ``str``, ``dict`` or a list kind
            ``ints``, ``floats``, ``strs``.
        check (Callable[[Any], bool] | None): Range check on the value, or on
            every item of a list.
        requirement (str): Description used in error messages.
        choices (tuple[str, ...]): Accepted values of a string field.
    """

    name: str
    kind: str
    check: Callable[[Any], bool] | None = None
    requirement: str = ""
    choices: tuple[str, ...] = ()


SCHEMA: dict[str, Option] = {
    "command": Option("command", "str", choices=COMMANDS),
    "adapter.name": Option("adapter", "str"),
    "adapter.params": Option("adapter_params", "dict"),
    "sphere.u": Option("u", "float"),
    "sphere.ubar": Option("ubar", "float"),
    "sphere.ubar_end": Option("ubar_end", "float"),
    "sphere.labels": Option("labels", "floats"),
    "sphere.foliation": Option("foliation", "str", choices=FOLIATIONS),
    "resolution.band_limit": Option("band_limit", "int", _positive, "> 0"),
    "resolution.radial": Option("radial", "int", lambda v: v >= 3, ">= 3"),
    "resolution.steps": Option("steps", "int", _positive, "> 0"),
    "resolution.nodes": Option("nodes", "int", lambda v: v >= 3, ">= 3"),
    "resolution.sweep": Option("sweep", "ints", _positive, "> 0"),
    "tolerance": Option("tolerance", "float", _unit_interval, "in (0, 1)"),
    "seed": Option("seed", "int", lambda v: v >= 0, ">= 0"),
    "identities.catalog": Option("catalog", "str", choices=CATALOGS),
    "identities.sample": Option("sample", "str", choices=SAMPLE_FIELDS),
    "transport.component": Option("component", "str"),
    "transition.sizes": Option("sizes", "floats", _unit_interval, "in (0, 1)"),
    "transition.error_terms": Option("error_terms", "bool"),
    "fluxes.multipliers": Option("multipliers", "strs"),
    "fluxes.commutator": Option("commutator", "str"),
    "canonical.background": Option("background", "str"),
    "canonical.delta": Option("delta", "float", _positive, "> 0"),
    "canonical.gamma": Option("gamma", "float"),
    "harmonic.metric": Option("metric", "str"),
    "harmonic.certify": Option("certify", "bool"),
    "output.report": Option("report", "str"),
    "output.csv": Option("csv", "str"),
}


def _coerce(path: str, option: Option, value: Any) -> Any:
    def fail(expected: str) -> ConfigurationError:
        return ConfigurationError(f"{path}: expected {expected}, got {value!r}")

    def scalar(kind: str, item: Any) -> Any:
        if kind == "bool":
            if not isinstance(item, bool):
                raise fail("a boolean")
            return item
        if kind == "int":
            if isinstance(item, bool) or not isinstance(item, int):
                raise fail("an integer")
            return item
        if kind == "float":
            if isinstance(item, bool) or not isinstance(item, int | float):
                raise fail("a number")
            return float(item)
        if not isinstance(item, str):
            raise fail("a string")
        return item

    if value is None:
        return None
    if option.kind == "dict":
        if not isinstance(value, dict):
            raise fail("an object")
        return dict(value)
    if option.kind.endswith("s") and option.kind != "str":
        if not isinstance(value, list | tuple):
            raise fail("a list")
        items = tuple(scalar(option.kind[:-1], item) for item in value)
    else:
        items = (scalar(option.kind, value),)
    for item in items:
        if option.check is not None and not option.check(item):
            raise fail(option.requirement)
        if option.choices and item not in option.choices:
            raise fail(f"one of {list(option.choices)}")
    return items if option.kind.endswith("s") and option.kind != "str" else items[0]


def _flatten(document: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    flat = {}
    for key, value in document.items():
        path = f"{prefix}{key}"
        if path in SCHEMA:
            flat[path] = value
        elif isinstance(value, dict) and any(
            name.startswith(path + ".") for name in SCHEMA
        ):
            flat.update(_flatten(value, path + "."))
        else:
            raise ConfigurationError(f"{path}: unknown field")
    return flat


def _threads() -> int:
    raw = os.environ.get(THREADS_VARIABLE, "1")
    try:
        threads = int(raw)
    except ValueError:
        threads = 0
    if threads < 1:
        raise ConfigurationError(
            f"{THREADS_VARIABLE} must be a positive integer, got {raw!r}"
        )
    return threads


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration of one run.

    Resolution and tolerance fields left as None take the defaults of the
    command. The thread count comes from the environment and is not part of
    the hashed configuration.
    """

    command: str
    adapter: str = "Minkowski"
    adapter_params: dict[str, Any] = field(default_factory=dict)
    u: float | None = None
    ubar: float | None = None
    ubar_end: float | None = None
    labels: tuple[float, ...] = ()
    foliation: str = "native"
    band_limit: int | None = None
    radial: int = 16
    steps: int | None = None
    nodes: int = 32
    sweep: tuple[int, ...] = ()
    tolerance: float | None = None
    seed: int = 0
    catalog: str = "all"
    sample: str = "one_form"
    component: str = "trchi"
    sizes: tuple[float, ...] = (2e-2, 5e-3)
    error_terms: bool = True
    multipliers: tuple[str, ...] = ("K", "K", "T")
    commutator: str | None = None
    background: str = "minkowski"
    delta: float = 0.1
    gamma: float = 0.45
    metric: str = "conformal"
    certify: bool = False
    report: str | None = None
    csv: str | None = None
    threads: int = field(default=1, compare=False)

    @classmethod
    def from_document(cls, document: dict[str, Any]) -> "RunConfig":
        """Validate a nested document and build the configuration.

        Raises:
            ConfigurationError: Naming the dotted path of the offending field.
        """
        if not isinstance(document, dict):
            raise ConfigurationError("configuration must be a JSON object")
        flat = _flatten(document)
        if flat.get("command") is None:
            raise ConfigurationError("command: required field is missing")
        values = {
            option.name: _coerce(path, option, flat[path])
            for path, option in SCHEMA.items()
            if path in flat and flat[path] is not None
        }
        return cls(**values, threads=_threads())

    @classmethod
    def load(
        cls, path: str | Path | None, overrides: dict[str, Any] | None = None
    ) -> "RunConfig":
        """Read a JSON file, apply dotted-path overrides and validate.

        Raises:
            ConfigurationError: If the file is unreadable or invalid.
        """
        document: dict[str, Any] = {}
        if path is not None:
            try:
                document = json.loads(Path(path).read_text())
            except (OSError, json.JSONDecodeError) as error:
                raise ConfigurationError(
                    f"cannot read configuration {path}: {error}"
                ) from error
            if not isinstance(document, dict):
                raise ConfigurationError("configuration must be a JSON object")
        for dotted, value in (overrides or {}).items():
            if value is None:
                continue
            node = document
            *parents, leaf = dotted.split(".")
            for key in parents:
                child = node.setdefault(key, {})
                if not isinstance(child, dict):
                    raise ConfigurationError(f"{key}: expected an object")
                node = child
            node[leaf] = value
        config = cls.from_document(document)
        logger.debug("configuration %s: %s", config.digest[:12], config)
        return config

    def setting(self, name: str) -> Any:
        """Return a field, falling back to the default of the command."""
        value = getattr(self, name)
        if value is None:
            return COMMAND_DEFAULTS[self.command].get(name)
        return value

    @property
    def sphere(self) -> tuple[float, float]:
        """Return the labels (u, ubar) of the sphere the command works on."""
        u, ubar = DEFAULT_SPHERES.get(self.adapter.lower(), FLAT_SPHERE)
        return (
            u if self.u is None else self.u,
            ubar if self.ubar is None else self.ubar,
        )

    def to_document(self) -> dict[str, Any]:
        """Return the nested document of every schema field."""
        document: dict[str, Any] = {}
        values = {item.name: getattr(self, item.name) for item in fields(self)}
        for path, option in SCHEMA.items():
            value = values[option.name]
            node = document
            *parents, leaf = path.split(".")
            for key in parents:
                node = node.setdefault(key, {})
            node[leaf] = list(value) if isinstance(value, tuple) else value
        return document

    @property
    def digest(self) -> str:
        """Return the SHA-256 hash of the canonical configuration document."""
        text = canonical_json(self.to_document())
        return hashlib.sha256(text.encode("utf-8")).hexdigest()
