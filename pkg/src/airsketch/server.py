"""Live session endpoint: newline-delimited JSON over one TCP connection.

Client -> engine messages:
    {"type":"frame","t":...,"head":[...7],"pen":[...7],"off":[...7],"btn":n}
    {"type":"load_scene","data":{...canonical scene dict...}}
    {"type":"save_scene"}
    {"type":"record","on":true|false,"path":"optional.trace.jsonl"}
    {"type":"hash"}

Engine -> client messages:
    {"type":"delta","ops":[...]}        only when the scene changed
    {"type":"feedback",...}             after every frame
    {"type":"scene","data":{...}}       reply to save_scene / load_scene
    {"type":"hash","value":"..."}       reply to hash
    {"type":"error","msg":"..."}        malformed input; session continues

One client at a time; a second connection is refused with an error message.
"""

from __future__ import annotations

import json
import os
import socket
import threading
import time
from pathlib import Path

from .engine import Engine, FeedbackState
from .geom import Vec3
from .replay import Trace, TraceError, frame_from_dict, serialize_trace
from .scene import (
    Scene,
    scene_hash,
    scene_to_canonical_dict,
    deserialize,
    canonical_serialize,
    _plane_dict,
    _primitive_dict,
    _stroke_dict,
    _q7,
    _um,
    _vec_um,
)

DEFAULT_PORT = 7440
PORT_ENV_VAR = "AIRSKETCH_PORT"


def _vec_list(v: Vec3) -> list[float]:
    return [v.x, v.y, v.z]


def feedback_to_dict(fb: FeedbackState) -> dict:
    return {
        "type": "feedback",
        "mode": fb.mode,
        "tip_position": _vec_list(fb.tip_position),
        "tip_color": list(fb.tip_color),
        "tip_radius": fb.tip_radius,
        "arrow": fb.arrow,
        "ink_drop": fb.ink_drop,
        "laser_ray": None if fb.laser_ray is None else
            [_vec_list(fb.laser_ray[0]), _vec_list(fb.laser_ray[1])],
        "hover_entity": fb.hover_entity,
        "selection": fb.selection,
        "menu_state": fb.menu_state,
        "menu_center": None if fb.menu_center is None else _vec_list(fb.menu_center),
        "menu_buttons": [[n, _vec_list(p)] for n, p in fb.menu_buttons],
        "menu_hover": fb.menu_hover,
        "menu_current_color": list(fb.menu_current_color),
        "draft": None if fb.draft is None else {
            "kind": fb.draft.kind,
            "variant": fb.draft.variant.value,
            "center": _vec_list(fb.draft.center),
            "extents": _vec_list(fb.draft.extents),
        },
        "draft_gold": fb.draft_gold,
        "wire_cube": _vec_list(fb.wire_cube),
        "bin_shown": fb.bin_shown,
        "plane_tool_on": fb.plane_tool_on,
    }


def deltas_from_events(engine: Engine) -> list[dict]:
    """Convert one step's mutation events into wire delta ops.

    Entity payloads use the canonical quantized dict form, so a client
    reconstructing the scene from deltas hashes identically to the server.
    """
    ops: list[dict] = []
    seen_updates: dict[int, int] = {}
    scene = engine.scene
    for ev in engine.events:
        kind = ev[0]
        if kind == "add_stroke":
            ops.append({"op": "add_stroke", "data": _stroke_dict(ev[1])})
        elif kind == "add_primitive":
            ops.append({"op": "add_primitive", "data": _primitive_dict(ev[1])})
        elif kind == "update_primitive":
            op = {"op": "update_primitive", "data": _primitive_dict(ev[1])}
            if ev[1].id in seen_updates:
                ops[seen_updates[ev[1].id]] = op
            else:
                seen_updates[ev[1].id] = len(ops)
                ops.append(op)
        elif kind == "remove_primitive":
            ops.append({"op": "remove_primitive", "id": ev[1]})
        elif kind == "world":
            ops.append({"op": "set_world", "data": {
                "scale_q7": _q7(scene.world.scale),
                "offset_um": _vec_um(scene.world.offset),
            }})
        elif kind == "plane":
            ops.append({"op": "set_plane", "data": _plane_dict(scene.proxy_plane)})
        elif kind == "style":
            ops.append({"op": "set_style", "data": {
                "color": list(scene.style.current_color),
                "radius_um": _um(scene.style.current_radius),
            }})
    # coalesce repeated world/plane/style ops, keep the last of each
    final: list[dict] = []
    last_of: dict[str, int] = {}
    for op in ops:
        if op["op"] in ("set_world", "set_plane", "set_style"):
            if op["op"] in last_of:
                final[last_of[op["op"]]] = op
                continue
            last_of[op["op"]] = len(final)
        final.append(op)
    return final


class Session:
    """Protocol logic for one connected client, transport-agnostic."""

    def __init__(self):
        self.engine = Engine()
        self.recording: list | None = None
        self.record_path: str | None = None

    def handle(self, msg: dict) -> list[dict]:
        mtype = msg.get("type")
        if mtype == "frame":
            try:
                frame = frame_from_dict(msg)
            except TraceError as e:
                return [{"type": "error", "msg": str(e)}]
            before_t = self.engine.last_t
            fb = self.engine.step(frame)
            out = []
            if self.engine.last_t != before_t:  # frame accepted
                if self.recording is not None:
                    self.recording.append(frame)
                if self.engine.events:
                    out.append({"type": "delta",
                                "ops": deltas_from_events(self.engine)})
            else:
                out.append({"type": "error",
                            "msg": f"non-monotonic timestamp {frame.t}"})
            out.append(feedback_to_dict(fb))
            return out
        if mtype == "save_scene":
            return [{"type": "scene",
                     "data": scene_to_canonical_dict(self.engine.scene)}]
        if mtype == "load_scene":
            try:
                data = msg["data"]
                scene = deserialize(json.dumps(data).encode("utf-8")
                                    if isinstance(data, dict) else
                                    data.encode("utf-8"))
            except (KeyError, ValueError, TypeError) as e:
                return [{"type": "error", "msg": f"bad scene: {e}"}]
            self.engine = Engine(scene)
            return [{"type": "scene",
                     "data": scene_to_canonical_dict(self.engine.scene)}]
        if mtype == "record":
            if msg.get("on"):
                self.recording = []
                self.record_path = msg.get("path") or \
                    f"session-{int(time.time())}.trace.jsonl"
                return []
            frames, path = self.recording, self.record_path
            self.recording = None
            if frames is None or path is None:
                return [{"type": "error", "msg": "recording was not active"}]
            trace = Trace(frames=frames,
                          tracked_volume=self.engine.scene.tracked_volume,
                          description="recorded live session")
            Path(path).write_bytes(serialize_trace(trace))
            return [{"type": "recorded", "path": path,
                     "frames": len(frames)}]
        if mtype == "hash":
            return [{"type": "hash", "value": scene_hash(self.engine.scene)}]
        return [{"type": "error", "msg": f"unknown message type {mtype!r}"}]


class Server:
    """TCP wrapper around Session; one client at a time."""

    def __init__(self, port: int | None = None, host: str = "127.0.0.1"):
        if port is None:
            port = int(os.environ.get(PORT_ENV_VAR, DEFAULT_PORT))
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((host, port))
        self._sock.listen(4)
        self.port = self._sock.getsockname()[1]
        self._busy = threading.Lock()
        self._stopping = threading.Event()
        self._thread: threading.Thread | None = None

    def start(self) -> None:
        self._thread = threading.Thread(target=self.run, daemon=True)
        self._thread.start()

    def run(self) -> None:
        while not self._stopping.is_set():
            try:
                conn, _ = self._sock.accept()
            except OSError:
                break
            if not self._busy.acquire(blocking=False):
                try:
                    conn.sendall(b'{"type":"error","msg":"session in use"}\n')
                finally:
                    conn.close()
                continue
            t = threading.Thread(target=self._serve_client, args=(conn,),
                                 daemon=True)
            t.start()

    def _serve_client(self, conn: socket.socket) -> None:
        session = Session()
        try:
            buf = b""
            while not self._stopping.is_set():
                chunk = conn.recv(65536)
                if not chunk:
                    break
                buf += chunk
                while b"\n" in buf:
                    line, buf = buf.split(b"\n", 1)
                    if not line.strip():
                        continue
                    try:
                        msg = json.loads(line)
                    except json.JSONDecodeError as e:
                        replies = [{"type": "error", "msg": f"bad JSON: {e.msg}"}]
                    else:
                        replies = session.handle(msg)
                    for r in replies:
                        conn.sendall(json.dumps(r, separators=(",", ":"))
                                     .encode("utf-8") + b"\n")
        except OSError:
            pass
        finally:
            conn.close()
            self._busy.release()

    def stop(self) -> None:
        self._stopping.set()
        try:
            self._sock.close()
        except OSError:
            pass


def serve(port: int | None = None) -> None:
    """Blocking entry point used by `airsketch serve`."""
    server = Server(port=port)
    print(f"airsketch session bridge listening on port {server.port}", flush=True)
    try:
        server.run()
    except KeyboardInterrupt:
        server.stop()
