"""Deterministic, headless immersive-sketching engine.

Replays or streams 6-DOF bi-manual input and produces a 3D scene of tube
strokes and primitives: constrained sketching on a proxy grid plane, laser
surface projection, grab-the-air world pan/scale, palm-orientation
primitive creation, and virtual-hand selection/manipulation.
"""

from .engine import Engine, FeedbackState, InputFrame, Mode, PalmFacing
from .geom import Pose, Ray, Rotation, Vec3
from .replay import Trace, parse_trace, replay, serialize_trace
from .scene import Scene, canonical_serialize, deserialize, export_mesh, scene_hash

__version__ = "0.1.0"

__all__ = [
    "Engine", "FeedbackState", "InputFrame", "Mode", "PalmFacing",
    "Pose", "Ray", "Rotation", "Vec3",
    "Trace", "parse_trace", "replay", "serialize_trace",
    "Scene", "canonical_serialize", "deserialize", "export_mesh", "scene_hash",
    "__version__",
]
