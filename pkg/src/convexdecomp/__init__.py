"""Convex decompositions of planar point sets with a guaranteed face bound."""
from .geom import (
    GeneralPositionError,
    GeometryInputError,
    Point,
    PointSet,
    convex_hull,
    general_position,
    is_strictly_convex,
    orient,
    strictly_inside_triangle,
)
from .decomp import Decomposition, InvariantError, TraceEvent, decompose

__all__ = [
    "Decomposition",
    "GeneralPositionError",
    "GeometryInputError",
    "InvariantError",
    "Point",
    "PointSet",
    "TraceEvent",
    "convex_hull",
    "decompose",
    "general_position",
    "is_strictly_convex",
    "orient",
    "strictly_inside_triangle",
]
