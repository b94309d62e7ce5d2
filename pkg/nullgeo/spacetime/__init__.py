from nullgeo.spacetime.adapters import (
    ADAPTERS,
    LinearWave,
    MetricAdapter,
    Minkowski,
    Schwarzschild,
    SphereEmbedding,
    SyntheticBump,
    builtin_adapter,
)
from nullgeo.spacetime.cone import ConeState, extract_cone_state, sphere_points
from nullgeo.spacetime.frames import FrameCalculus, FrameSettings, NullPair
from nullgeo.spacetime.optical import FOLIATIONS, GeodesicCones, with_foliation
from nullgeo.spacetime.oracle import fd_oracle
from nullgeo.spacetime.slice import BoundaryData, SliceState, extract_slice_state
from nullgeo.spacetime.vertex import VertexCone, VertexProfile

__all__ = [
    "ADAPTERS",
    "FOLIATIONS",
    "BoundaryData",
    "ConeState",
    "FrameCalculus",
    "FrameSettings",
    "GeodesicCones",
    "LinearWave",
    "MetricAdapter",
    "Minkowski",
    "NullPair",
    "Schwarzschild",
    "SliceState",
    "SphereEmbedding",
    "SyntheticBump",
    "VertexCone",
    "VertexProfile",
    "builtin_adapter",
    "extract_cone_state",
    "extract_slice_state",
    "fd_oracle",
    "sphere_points",
    "with_foliation",
]
