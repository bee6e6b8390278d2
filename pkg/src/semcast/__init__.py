"""semcast: a desk-scale semantic streaming testbed.

Replaces a megabit video feed with a kilobit annotation uplink, generates
constrained 3D scene markup through a two-agent pipeline, estimates
actuator value maps, meters every byte on the wire, and benchmarks the
whole thing against a trace-driven model of a conventional streaming path.
"""

__version__ = "0.1.0"

from .scene_markup import (  # noqa: F401
    ConstraintProfile,
    DEFAULT_PROFILE,
    SceneGraph,
    SceneNode,
    parse_scene_markup,
    scene_stats,
    serialize_scene,
    validate_constraints,
)
