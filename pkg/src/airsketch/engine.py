"""Per-frame interaction state machine.

One `Engine` instance consumes timestamped input frames (head, pen and
off-hand poses in the physical frame plus four button bits) and mutates its
scene deterministically: identical frame sequences produce identical scene
hashes.  All distances used for gesture logic (menu proximity, hand
distance, bin radius) are physical-frame; everything that lands in the
scene is world-frame.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from . import constraints, picking, stroke as stroke_mod
from .geom import Pose, Ray, Rotation, Vec3, distance
from .scene import (
    COLOR_PALETTE,
    PRIMITIVE_KINDS,
    RADIUS_PALETTE,
    SCALE_MAX,
    SCALE_MIN,
    PrimitiveRecord,
    Scene,
    StrokeRecord,
)

# button bits
PEN_PRIMARY = 1
PEN_SECONDARY = 2
OFF_A = 4
OFF_B = 8

# palm classification (degrees)
PALM_ENTER_DEG = 45.0
PALM_EXIT_DEG = 55.0  # 10 degree hysteresis

# menu geometry (physical meters)
MENU_RING_RADIUS = 0.08
MENU_HOVER_RADIUS = 0.03
MENU_LOCKOUT_RADIUS = 0.12
BIN_RADIUS = 0.12

SCALE_ARM_MIN_DISTANCE = 0.01
MIN_PRIMITIVE_EXTENT = 0.001
LASER_MISS_RAY_LENGTH = 10.0

MAIN_BUTTONS = (
    "color", "size", "plane_toggle", "world",
    "primitives", "laser_toggle", "select", "reset_scale",
)


class PalmFacing(enum.Enum):
    UP = "up"
    DOWN = "down"
    TOWARD_DOMINANT = "toward_dominant"
    NEUTRAL = "neutral"


class Mode(enum.Enum):
    AIR_SKETCH = "air_sketch"
    LASER_SKETCH = "laser_sketch"
    PRIMITIVE_CREATE = "primitive_create"
    SELECT_MANIPULATE = "select_manipulate"
    WORLD_CONTROL = "world_control"


class MenuState(enum.Enum):
    HIDDEN = "hidden"
    MAIN = "main"
    COLOR = "color"
    SIZE = "size"
    PRIMITIVE = "primitive"
    BIN = "bin"


@dataclass(frozen=True)
class InputFrame:
    t: int  # milliseconds
    head: Pose
    pen: Pose
    offhand: Pose
    buttons: int


def classify_palm(offhand: Pose, pen: Pose,
                  previous: PalmFacing = PalmFacing.NEUTRAL) -> PalmFacing:
    """Palm facing from the off-hand orientation, with 10 degree hysteresis.

    The palm normal is the off-hand local +Y.  Priority UP > DOWN >
    TOWARD_DOMINANT; the previous class keeps priority until its angle
    exceeds the exit threshold.
    """
    n = offhand.rotation.apply(Vec3(0.0, 1.0, 0.0))

    def angle_to(v: Vec3) -> float:
        d = max(-1.0, min(1.0, n.dot(v)))
        return math.degrees(math.acos(d))

    ang_up = angle_to(Vec3(0, 1, 0))
    ang_down = angle_to(Vec3(0, -1, 0))
    toward = pen.position - offhand.position
    ang_toward = 180.0 if toward.norm() < 1e-9 else angle_to(toward.normalized())

    angles = {
        PalmFacing.UP: ang_up,
        PalmFacing.DOWN: ang_down,
        PalmFacing.TOWARD_DOMINANT: ang_toward,
    }
    for facing in (PalmFacing.UP, PalmFacing.DOWN, PalmFacing.TOWARD_DOMINANT):
        limit = PALM_EXIT_DEG if facing == previous else PALM_ENTER_DEG
        if angles[facing] <= limit:
            return facing
    return PalmFacing.NEUTRAL


@dataclass
class PrimitiveDraft:
    kind: str
    variant: PalmFacing  # UP / DOWN / TOWARD_DOMINANT
    center: Vec3 = field(default_factory=Vec3)
    extents: Vec3 = field(default_factory=Vec3)


@dataclass
class GrabState:
    pen_start: Pose  # world frame
    start_poses: dict[int, Pose]
    snap: picking.SnapAdjustment | None = None


@dataclass
class ScaleGesture:
    d0: float
    s0: float
    offset0: Vec3
    pivot: Vec3


@dataclass
class PanGesture:
    offset0: Vec3
    hand0: Vec3


@dataclass
class GridStroke:
    anchor: Vec3  # world, grid-snapped press point
    current: Vec3


@dataclass
class FeedbackState:
    """Everything a renderer needs to show the affordances for one frame."""

    mode: str = Mode.AIR_SKETCH.value
    tip_position: Vec3 = field(default_factory=Vec3)
    tip_color: tuple[int, int, int, int] = COLOR_PALETTE[0]
    tip_radius: float = RADIUS_PALETTE[1]
    arrow: bool = False
    ink_drop: bool = False
    laser_ray: tuple[Vec3, Vec3] | None = None
    hover_entity: int | None = None
    selection: list[int] = field(default_factory=list)
    menu_state: str = MenuState.HIDDEN.value
    menu_center: Vec3 | None = None
    menu_buttons: list[tuple[str, Vec3]] = field(default_factory=list)
    menu_hover: str | None = None
    menu_current_color: tuple[int, int, int, int] = COLOR_PALETTE[0]
    draft: PrimitiveDraft | None = None
    draft_gold: bool = False
    wire_cube: Vec3 = field(default_factory=Vec3)
    bin_shown: bool = False
    plane_tool_on: bool = False
    head: Pose = field(default_factory=Pose.identity)


def compute_draft(kind: str, variant: PalmFacing, pen_w: Vec3,
                  off_w: Vec3) -> tuple[Vec3, Vec3]:
    """Center and full extents of a primitive draft for the given variant."""
    d = pen_w - off_w
    if variant == PalmFacing.TOWARD_DOMINANT:
        center = (pen_w + off_w) * 0.5
        box = Vec3(abs(d.x), abs(d.y), abs(d.z))
        if kind == "box":
            return center, box
        if kind == "sphere":
            s = min(box.x, box.y, box.z)
            return center, Vec3(s, s, s)
        s = min(box.x, box.z)
        return center, Vec3(s, box.y, s)  # cylinder inscribed in the box
    if variant == PalmFacing.UP:
        size = d.norm()
        return (pen_w + off_w) * 0.5, Vec3(size, size, size)
    # DOWN: base snapped to the ground plane y=0
    side = math.hypot(d.x, d.z)
    height = max(0.0, pen_w.y)
    cx = (pen_w.x + off_w.x) * 0.5
    cz = (pen_w.z + off_w.z) * 0.5
    if kind == "sphere":
        s = min(side, height)
        return Vec3(cx, s / 2.0, cz), Vec3(s, s, s)
    return Vec3(cx, height / 2.0, cz), Vec3(side, height, side)


class Engine:
    """Deterministic interaction engine driving one Scene."""

    def __init__(self, scene: Scene | None = None):
        self.scene = scene if scene is not None else Scene()
        self.mode = Mode.AIR_SKETCH
        self.plane_tool_on = self.scene.proxy_plane.present
        self.menu_state = MenuState.HIDDEN
        self.palm = PalmFacing.NEUTRAL
        self.builder: stroke_mod.StrokeBuilder | None = None
        self.grid_stroke: GridStroke | None = None
        self.draft: PrimitiveDraft | None = None
        self.grab: GrabState | None = None
        self.scale_gesture: ScaleGesture | None = None
        self.pan_gesture: PanGesture | None = None
        self.selection: list[int] = []
        self.primitive_kind = "box"
        self.last_buttons = 0
        self.last_t: int | None = None
        self.events: list[tuple] = []
        self.last_feedback = FeedbackState(wire_cube=self.scene.tracked_volume)

    # -- helpers ----------------------------------------------------------

    def _emit(self, *event) -> None:
        self.events.append(event)

    def _pen_world_pose(self, frame: InputFrame) -> Pose:
        return Pose(
            self.scene.world.world_from_physical(frame.pen.position),
            frame.pen.rotation,
        )

    def _pen_ray_world(self, frame: InputFrame) -> Ray:
        pose = self._pen_world_pose(frame)
        return Ray(pose.position, pose.rotation.apply(Vec3(0, 0, -1)))

    def _menu_buttons(self, frame: InputFrame) -> list[tuple[str, Vec3]]:
        if self.menu_state == MenuState.MAIN:
            names = list(MAIN_BUTTONS)
        elif self.menu_state == MenuState.COLOR:
            names = [f"color_{i}" for i in range(len(COLOR_PALETTE))]
        elif self.menu_state == MenuState.SIZE:
            names = [f"size_{i}" for i in range(len(RADIUS_PALETTE))]
        elif self.menu_state == MenuState.PRIMITIVE:
            names = [f"prim_{k}" for k in PRIMITIVE_KINDS]
        else:
            return []
        center = frame.offhand.position
        rot = frame.offhand.rotation
        out = []
        for i, name in enumerate(names):
            ang = 2.0 * math.pi * i / len(names)
            local = Vec3(MENU_RING_RADIUS * math.cos(ang), 0.0,
                         MENU_RING_RADIUS * math.sin(ang))
            out.append((name, center + rot.apply(local)))
        return out

    def _cancel_transients(self) -> None:
        self.builder = None
        self.grid_stroke = None
        self.draft = None
        self.grab = None
        self.scale_gesture = None
        self.pan_gesture = None

    def _commit_builder(self, final_p: Vec3 | None = None) -> None:
        if self.builder is None:
            return
        rec = stroke_mod.end_stroke(self.builder, self.scene.next_id, final_p)
        self.builder = None
        if rec is not None:
            self.scene.allocate_id()
            self.scene.strokes.append(rec)
            self._emit("add_stroke", rec)

    def _commit_grid_stroke(self) -> None:
        gs = self.grid_stroke
        self.grid_stroke = None
        if gs is None:
            return
        if (gs.current - gs.anchor).norm() <= 1e-6:
            return
        rec = StrokeRecord(
            id=self.scene.allocate_id(),
            samples=[gs.anchor, gs.current],
            radius=self.scene.style.current_radius,
            color=self.scene.style.current_color,
            kind="plane",
        )
        self.scene.strokes.append(rec)
        self._emit("add_stroke", rec)

    # -- menu -------------------------------------------------------------

    def _menu_update(self, frame: InputFrame, pressed: int) -> tuple[bool, str | None]:
        """Returns (press consumed by the menu, hovered button name)."""
        if self.grab is not None:
            self.menu_state = MenuState.BIN if self.palm == PalmFacing.UP \
                else MenuState.HIDDEN
            return False, None
        if self.palm == PalmFacing.UP:
            if self.menu_state in (MenuState.HIDDEN, MenuState.BIN):
                self.menu_state = MenuState.MAIN
        else:
            self.menu_state = MenuState.HIDDEN
            return False, None

        hover: str | None = None
        hover_d = MENU_HOVER_RADIUS
        for name, pos in self._menu_buttons(frame):
            d = distance(frame.pen.position, pos)
            if d <= hover_d:
                hover, hover_d = name, d
        if hover is None or not (pressed & PEN_PRIMARY):
            return False, hover
        self._confirm_menu(hover)
        return True, hover

    def _confirm_menu(self, name: str) -> None:
        s = self.scene
        if name == "color":
            self.menu_state = MenuState.COLOR
        elif name == "size":
            self.menu_state = MenuState.SIZE
        elif name == "primitives":
            self.menu_state = MenuState.PRIMITIVE
        elif name == "plane_toggle":
            self.plane_tool_on = not self.plane_tool_on
            if not self.plane_tool_on and s.proxy_plane.present:
                s.proxy_plane.present = False
                self._emit("plane")
        elif name == "world":
            self._switch_mode(Mode.WORLD_CONTROL if self.mode != Mode.WORLD_CONTROL
                              else Mode.AIR_SKETCH)
        elif name == "laser_toggle":
            self._switch_mode(Mode.LASER_SKETCH if self.mode != Mode.LASER_SKETCH
                              else Mode.AIR_SKETCH)
        elif name == "select":
            self._switch_mode(Mode.SELECT_MANIPULATE
                              if self.mode != Mode.SELECT_MANIPULATE
                              else Mode.AIR_SKETCH)
        elif name == "reset_scale":
            if s.world.scale != 1.0:
                s.world.scale = 1.0
                self._emit("world")
        elif name.startswith("color_"):
            s.style.current_color = COLOR_PALETTE[int(name.split("_")[1])]
            self._emit("style")
            self.menu_state = MenuState.MAIN
        elif name.startswith("size_"):
            s.style.current_radius = RADIUS_PALETTE[int(name.split("_")[1])]
            self._emit("style")
            self.menu_state = MenuState.MAIN
        elif name.startswith("prim_"):
            self.primitive_kind = name.split("_")[1]
            self._switch_mode(Mode.PRIMITIVE_CREATE)
            self.menu_state = MenuState.MAIN

    def _switch_mode(self, mode: Mode) -> None:
        if mode != self.mode:
            self._cancel_transients()
            self.mode = mode

    # -- mode behaviors ----------------------------------------------------

    def _air_sketch(self, frame: InputFrame, pressed: int, released: int,
                    locked: bool, fb: FeedbackState) -> None:
        s = self.scene
        tip_w = self._pen_world_pose(frame).position
        plane = s.proxy_plane
        plane_active = self.plane_tool_on and plane.present

        if self.plane_tool_on:
            if pressed & OFF_A:
                s.proxy_plane = constraints.place_plane_freehand(
                    self._pen_world_pose(frame))
                self._emit("plane")
                plane = s.proxy_plane
                plane_active = True
            elif pressed & OFF_B:
                placed = constraints.place_plane_on_surface(
                    self._pen_ray_world(frame), s)
                if placed is not None:
                    s.proxy_plane = placed
                    self._emit("plane")
                    plane = s.proxy_plane
                    plane_active = True

        snapped = constraints.snap_pen_to_plane(tip_w, plane) \
            if plane_active else None
        fb.arrow = snapped is not None

        hand_dist = distance(frame.pen.position, frame.offhand.position)

        if (pressed & PEN_PRIMARY) and not locked:
            if snapped is not None:
                point, sub = constraints.constrained_sample(tip_w, plane, hand_dist)
                if sub == "grid_line":
                    self.grid_stroke = GridStroke(anchor=point, current=point)
                else:
                    self.builder = stroke_mod.begin_stroke(s.style, "plane")
                    self.builder.append_sample(point)
            else:
                self.builder = stroke_mod.begin_stroke(s.style, "air")
                self.builder.append_sample(tip_w)
        elif (frame.buttons & PEN_PRIMARY) and not (pressed & PEN_PRIMARY):
            if self.grid_stroke is not None and not locked:
                point, sub = constraints.constrained_sample(tip_w, plane, hand_dist)
                if sub == "grid_line":
                    self.grid_stroke.current = point
            elif self.builder is not None and not locked:
                if self.builder.kind == "plane" and plane_active:
                    eq = constraints.plane_equation(plane)
                    from .geom import project_point_plane
                    self.builder.append_sample(project_point_plane(tip_w, eq))
                else:
                    self.builder.append_sample(tip_w)

        if released & PEN_PRIMARY:
            if self.grid_stroke is not None:
                self._commit_grid_stroke()
            elif self.builder is not None:
                final = None
                if not locked:
                    if self.builder.kind == "plane" and plane_active:
                        eq = constraints.plane_equation(plane)
                        from .geom import project_point_plane
                        final = project_point_plane(tip_w, eq)
                    else:
                        final = tip_w
                self._commit_builder(final)

        sketching = (self.builder is not None and self.builder.kind == "plane") \
            or self.grid_stroke is not None
        fb.ink_drop = sketching

    def _laser_sketch(self, frame: InputFrame, pressed: int, released: int,
                      locked: bool, fb: FeedbackState) -> None:
        ray = self._pen_ray_world(frame)
        hit = picking.raycast_scene(ray, self.scene)
        if hit is not None:
            fb.laser_ray = (ray.origin, hit.point)
        else:
            fb.laser_ray = (ray.origin,
                            ray.origin + ray.direction * LASER_MISS_RAY_LENGTH)

        held = bool(frame.buttons & PEN_PRIMARY)
        if held and not locked:
            sample = constraints.laser_project_sample(ray, self.scene)
            if sample is None:
                # a miss breaks the stroke; the next hit starts a new one
                self._commit_builder()
            else:
                if self.builder is None:
                    self.builder = stroke_mod.begin_stroke(self.scene.style, "laser")
                self.builder.append_sample(sample)
                fb.ink_drop = True
        if (released & PEN_PRIMARY) or not held:
            self._commit_builder()

    def _primitive_create(self, frame: InputFrame, pressed: int, released: int,
                          locked: bool, fb: FeedbackState) -> None:
        pen_w = self._pen_world_pose(frame).position
        off_w = self.scene.world.world_from_physical(frame.offhand.position)

        if (pressed & PEN_PRIMARY) and not locked and self.draft is None:
            variant = self.palm if self.palm in (
                PalmFacing.UP, PalmFacing.DOWN, PalmFacing.TOWARD_DOMINANT
            ) else PalmFacing.TOWARD_DOMINANT
            self.draft = PrimitiveDraft(kind=self.primitive_kind, variant=variant)

        if self.draft is not None and (frame.buttons & PEN_PRIMARY):
            if self.palm in (PalmFacing.UP, PalmFacing.DOWN,
                             PalmFacing.TOWARD_DOMINANT):
                self.draft.variant = self.palm
            self.draft.center, self.draft.extents = compute_draft(
                self.draft.kind, self.draft.variant, pen_w, off_w)

        if (released & PEN_PRIMARY) and self.draft is not None:
            d = self.draft
            self.draft = None
            ext = d.extents
            if min(ext.x, ext.y, ext.z) >= MIN_PRIMITIVE_EXTENT:
                rec = PrimitiveRecord(
                    id=self.scene.allocate_id(),
                    kind=d.kind,
                    pose=Pose(d.center, Rotation.identity()),
                    extents=ext,
                    color=self.scene.style.current_color,
                )
                self.scene.primitives.append(rec)
                self._emit("add_primitive", rec)

        fb.draft = self.draft
        fb.draft_gold = self.draft is not None and self.draft.variant == PalmFacing.UP

    def _select_manipulate(self, frame: InputFrame, pressed: int, released: int,
                           locked: bool, fb: FeedbackState) -> None:
        s = self.scene
        pen_pose_w = self._pen_world_pose(frame)
        tip_w = pen_pose_w.position

        if self.grab is None:
            hover = picking.point_pick(tip_w, s)
            fb.hover_entity = hover
            if (pressed & PEN_PRIMARY) and not locked and hover is not None:
                if hover in self.selection:
                    self.selection.remove(hover)
                else:
                    self.selection.append(hover)
            if (pressed & PEN_SECONDARY) and self.selection:
                live = [i for i in self.selection if s.find_primitive(i)]
                self.selection = live
                if live:
                    self.grab = GrabState(
                        pen_start=pen_pose_w,
                        start_poses={i: s.find_primitive(i).pose for i in live},
                    )

        if self.grab is not None and (frame.buttons & PEN_SECONDARY):
            from .geom import compose, inverse
            delta = compose(pen_pose_w, inverse(self.grab.pen_start))
            for pid, pose0 in self.grab.start_poses.items():
                prim = s.find_primitive(pid)
                if prim is not None:
                    prim.pose = compose(delta, pose0)
                    self._emit("update_primitive", prim)
            # transient snap: detected every frame, applied only on release
            grabbed = set(self.grab.start_poses)
            best: picking.SnapAdjustment | None = None
            best_gap = math.inf
            for pid in sorted(grabbed):
                prim = s.find_primitive(pid)
                if prim is None or prim.kind == "sphere":
                    continue
                adj = picking.detect_face_snap(prim, s, exclude_ids=grabbed)
                if adj is not None:
                    gap = adj.translation.norm()
                    if gap < best_gap:
                        best, best_gap = adj, gap
            self.grab.snap = best

        if (released & PEN_SECONDARY) and self.grab is not None:
            grab = self.grab
            self.grab = None
            in_bin = (self.palm == PalmFacing.UP and
                      distance(frame.pen.position, frame.offhand.position)
                      <= BIN_RADIUS)
            if in_bin:
                for pid in sorted(grab.start_poses):
                    prim = s.find_primitive(pid)
                    if prim is not None:
                        s.primitives.remove(prim)
                        self._emit("remove_primitive", pid)
                    if pid in self.selection:
                        self.selection.remove(pid)
            elif grab.snap is not None:
                for pid in sorted(grab.start_poses):
                    prim = s.find_primitive(pid)
                    if prim is not None:
                        prim.pose = picking.apply_snap(prim.pose, grab.snap)
                        self._emit("update_primitive", prim)

        fb.selection = list(self.selection)

    def _world_control(self, frame: InputFrame, pressed: int, released: int,
                       fb: FeedbackState) -> None:
        w = self.scene.world
        pen_p = frame.pen.position
        off_p = frame.offhand.position

        if pressed & OFF_A:
            d0 = distance(pen_p, off_p)
            if d0 >= SCALE_ARM_MIN_DISTANCE:
                self.scale_gesture = ScaleGesture(
                    d0=d0, s0=w.scale, offset0=w.offset,
                    pivot=(pen_p + off_p) * 0.5,
                )
        if (frame.buttons & OFF_A) and self.scale_gesture is not None:
            g = self.scale_gesture
            d = distance(pen_p, off_p)
            s_new = max(SCALE_MIN, min(SCALE_MAX, g.s0 * d / g.d0))
            # keep the world point at the pivot fixed under the pivot
            w.scale = s_new
            w.offset = g.pivot - (g.pivot - g.offset0) * (s_new / g.s0)
            self._emit("world")
        if released & OFF_A:
            self.scale_gesture = None

        if (pressed & OFF_B) and self.scale_gesture is None:
            self.pan_gesture = PanGesture(offset0=w.offset, hand0=off_p)
        if (frame.buttons & OFF_B) and self.pan_gesture is not None \
                and self.scale_gesture is None:
            g = self.pan_gesture
            w.offset = g.offset0 + (off_p - g.hand0)
            self._emit("world")
        if released & OFF_B:
            self.pan_gesture = None

    # -- main entry --------------------------------------------------------

    def step(self, frame: InputFrame) -> FeedbackState:
        if self.last_t is not None and frame.t <= self.last_t:
            return self.last_feedback  # rejected: non-monotonic timestamp
        self.last_t = frame.t
        self.events = []

        pressed = frame.buttons & ~self.last_buttons
        released = self.last_buttons & ~frame.buttons

        self.palm = classify_palm(frame.offhand, frame.pen, self.palm)

        fb = FeedbackState(
            mode=self.mode.value,
            tip_position=self._pen_world_pose(frame).position,
            tip_color=self.scene.style.current_color,
            tip_radius=self.scene.style.current_radius,
            wire_cube=self.scene.tracked_volume,
            plane_tool_on=self.plane_tool_on,
            menu_current_color=self.scene.style.current_color,
            head=frame.head,
        )

        consumed, hover = self._menu_update(frame, pressed)
        fb.menu_state = self.menu_state.value
        fb.menu_hover = hover
        fb.bin_shown = self.menu_state == MenuState.BIN
        if self.menu_state not in (MenuState.HIDDEN, MenuState.BIN):
            fb.menu_center = frame.offhand.position
            fb.menu_buttons = self._menu_buttons(frame)
        if consumed:
            pressed &= ~PEN_PRIMARY

        menu_shown = self.menu_state not in (MenuState.HIDDEN, MenuState.BIN)
        locked = menu_shown and distance(
            frame.pen.position, frame.offhand.position) <= MENU_LOCKOUT_RADIUS

        if self.mode == Mode.AIR_SKETCH:
            self._air_sketch(frame, pressed, released, locked, fb)
        elif self.mode == Mode.LASER_SKETCH:
            self._laser_sketch(frame, pressed, released, locked, fb)
        elif self.mode == Mode.PRIMITIVE_CREATE:
            self._primitive_create(frame, pressed, released, locked, fb)
        elif self.mode == Mode.SELECT_MANIPULATE:
            self._select_manipulate(frame, pressed, released, locked, fb)
        elif self.mode == Mode.WORLD_CONTROL:
            self._world_control(frame, pressed, released, fb)

        self.last_buttons = frame.buttons
        self.last_feedback = fb
        return fb
