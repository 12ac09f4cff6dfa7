"""Input trace parsing, serialization, and deterministic replay.

Trace files are UTF-8 JSON lines: one header object, then one object per
frame:

    {"version":1,"tracked_volume":[4,2,3],"description":"..."}
    {"t":10,"head":[px,py,pz,qx,qy,qz,qw],"pen":[...],"off":[...],"btn":0}

`btn` is a 4-bit set: bit 0 PEN_PRIMARY, 1 PEN_SECONDARY, 2 OFF_A, 3 OFF_B.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .engine import Engine, FeedbackState, InputFrame
from .geom import Pose, Rotation, Vec3
from .scene import Scene, scene_hash

TRACE_VERSION = 1
QUAT_NORM_TOL = 1e-3


class TraceError(ValueError):
    """Malformed trace; message carries the 1-based line number."""


@dataclass
class Trace:
    frames: list[InputFrame] = field(default_factory=list)
    tracked_volume: Vec3 = Vec3(4.0, 2.0, 3.0)
    description: str = ""
    version: int = TRACE_VERSION


def _pose_from_list(vals: list, line_no: int, name: str) -> Pose:
    if not isinstance(vals, list) or len(vals) != 7:
        raise TraceError(f"line {line_no}: {name} must be a list of 7 numbers")
    try:
        nums = [float(v) for v in vals]
    except (TypeError, ValueError):
        raise TraceError(f"line {line_no}: {name} has a non-numeric entry")
    q = Rotation(nums[3], nums[4], nums[5], nums[6])
    if abs(q.norm() - 1.0) > QUAT_NORM_TOL:
        raise TraceError(f"line {line_no}: {name} quaternion norm off by more "
                         f"than {QUAT_NORM_TOL}")
    return Pose(Vec3(nums[0], nums[1], nums[2]), q.normalized())


def parse_trace(data: bytes) -> Trace:
    lines = data.decode("utf-8").splitlines()
    if not lines or not lines[0].strip():
        raise TraceError("line 1: missing header")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise TraceError(f"line 1: invalid JSON header ({e.msg})")
    if header.get("version") != TRACE_VERSION:
        raise TraceError(f"line 1: unsupported version {header.get('version')!r}")
    tv = header.get("tracked_volume", [4, 2, 3])
    trace = Trace(
        tracked_volume=Vec3(float(tv[0]), float(tv[1]), float(tv[2])),
        description=header.get("description", ""),
    )
    last_t: int | None = None
    for idx, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise TraceError(f"line {idx}: invalid JSON ({e.msg})")
        frame = frame_from_dict(obj, idx)
        if last_t is not None and frame.t <= last_t:
            raise TraceError(f"line {idx}: timestamp {frame.t} not greater "
                             f"than previous {last_t}")
        last_t = frame.t
        trace.frames.append(frame)
    return trace


def frame_from_dict(obj: dict, line_no: int = 0) -> InputFrame:
    for key in ("t", "head", "pen", "off", "btn"):
        if key not in obj:
            raise TraceError(f"line {line_no}: missing field {key!r}")
    t = obj["t"]
    if not isinstance(t, int):
        raise TraceError(f"line {line_no}: t must be an integer (milliseconds)")
    btn = obj["btn"]
    if not isinstance(btn, int) or not 0 <= btn <= 15:
        raise TraceError(f"line {line_no}: btn must be an integer in [0, 15]")
    return InputFrame(
        t=t,
        head=_pose_from_list(obj["head"], line_no, "head"),
        pen=_pose_from_list(obj["pen"], line_no, "pen"),
        offhand=_pose_from_list(obj["off"], line_no, "off"),
        buttons=btn,
    )


def _pose_to_list(p: Pose) -> list[float]:
    r = p.rotation
    return [p.position.x, p.position.y, p.position.z, r.qx, r.qy, r.qz, r.qw]


def frame_to_dict(f: InputFrame) -> dict:
    return {
        "t": f.t,
        "head": _pose_to_list(f.head),
        "pen": _pose_to_list(f.pen),
        "off": _pose_to_list(f.offhand),
        "btn": f.buttons,
    }


def serialize_trace(trace: Trace) -> bytes:
    header = {
        "version": trace.version,
        "tracked_volume": [trace.tracked_volume.x, trace.tracked_volume.y,
                           trace.tracked_volume.z],
        "description": trace.description,
    }
    lines = [json.dumps(header, separators=(",", ":"))]
    for f in trace.frames:
        lines.append(json.dumps(frame_to_dict(f), separators=(",", ":")))
    return ("\n".join(lines) + "\n").encode("utf-8")


def replay(trace: Trace) -> tuple[Scene, str]:
    """Fold every frame through a fresh engine; returns (scene, hash)."""
    engine = Engine(Scene(tracked_volume=trace.tracked_volume))
    for frame in trace.frames:
        engine.step(frame)
    return engine.scene, scene_hash(engine.scene)


def replay_with_feedback(trace: Trace) -> tuple[Scene, str, list[FeedbackState]]:
    engine = Engine(Scene(tracked_volume=trace.tracked_volume))
    feedback = [engine.step(f) for f in trace.frames]
    return engine.scene, scene_hash(engine.scene), feedback
