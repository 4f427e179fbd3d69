"""Reach certification and R-hulls for discretised sets in the plane and in space."""

from reachkit.errors import DomainError, GridFormatError, HullUnboundedWarning, ReachkitError, WindowError
from reachkit.geometry import (
    Ball,
    Cone,
    Spindle,
    cone_contains,
    federer_inequality_slack,
    spindle_contains,
    spindle_subset_sampled,
)
from reachkit.grid import (
    Adjacency,
    DistanceField,
    GridSet,
    GridSpec,
    connected_components,
    distance_transform,
    erode,
    read_grid,
    write_grid,
)
from reachkit.reach import (
    ReachVerdict,
    UnpReport,
    ViolationWitness,
    certify_reach,
    check_ball_intersection,
    check_sphere_convexity,
    check_spindle_intersection,
    reach_search,
    unp_reach_estimate,
)
from reachkit.rhull import HullReport, admits_rhull, closing, hull_as_ball_intersection, witness_arc
from reachkit.shapes import rasterize, shape_from_dict

__version__ = "0.1.0"

__all__ = [
    "Adjacency",
    "Ball",
    "Cone",
    "DistanceField",
    "DomainError",
    "GridFormatError",
    "GridSet",
    "GridSpec",
    "HullReport",
    "HullUnboundedWarning",
    "ReachVerdict",
    "ReachkitError",
    "UnpReport",
    "ViolationWitness",
    "WindowError",
    "admits_rhull",
    "certify_reach",
    "check_ball_intersection",
    "check_sphere_convexity",
    "check_spindle_intersection",
    "closing",
    "cone_contains",
    "connected_components",
    "distance_transform",
    "erode",
    "federer_inequality_slack",
    "hull_as_ball_intersection",
    "rasterize",
    "reach_search",
    "read_grid",
    "shape_from_dict",
    "spindle_contains",
    "spindle_subset_sampled",
    "unp_reach_estimate",
    "witness_arc",
    "write_grid",
]
