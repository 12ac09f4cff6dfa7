"""Scene document: strokes, primitives, proxy plane, world transform, style.

The scene is the unit of persistence.  Canonical serialization quantizes
every length to integer micrometers and every quaternion component to units
of 1e-7 (round half to even), orders entities by id and keys
lexicographically, so the SHA-256 of the byte stream is stable across
platforms and runs.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace

from .geom import Pose, Rotation, Vec3

RGBA = tuple[int, int, int, int]

# Fixed style palettes; the menu exposes exactly these.
COLOR_PALETTE: tuple[RGBA, ...] = (
    (255, 255, 255, 255),  # white
    (0, 0, 0, 255),        # black
    (220, 50, 47, 255),    # red
    (133, 153, 0, 255),    # green
    (38, 139, 210, 255),   # blue
    (181, 137, 0, 255),    # yellow
    (203, 75, 22, 255),    # orange
    (108, 113, 196, 255),  # purple
)
RADIUS_PALETTE: tuple[float, ...] = (0.002, 0.004, 0.008, 0.016)

DEFAULT_TRACKED_VOLUME = Vec3(4.0, 2.0, 3.0)  # width x height x depth, 24 m^3

SCALE_MIN = 0.01
SCALE_MAX = 100.0

STROKE_KINDS = ("air", "plane", "laser")
PRIMITIVE_KINDS = ("box", "sphere", "cylinder")

CYLINDER_FACETS = 12
SPHERE_RINGS = 8
SPHERE_SEGMENTS = 12


@dataclass
class WorldTransform:
    """Uniform scale + offset: p_physical = scale * p_world + offset."""

    scale: float = 1.0
    offset: Vec3 = field(default_factory=Vec3)

    def physical_from_world(self, p: Vec3) -> Vec3:
        return p * self.scale + self.offset

    def world_from_physical(self, p: Vec3) -> Vec3:
        return (p - self.offset) / self.scale


@dataclass
class StrokeRecord:
    id: int
    samples: list[Vec3]
    radius: float
    color: RGBA
    kind: str  # air | plane | laser


@dataclass
class PrimitiveRecord:
    id: int
    kind: str  # box | sphere | cylinder
    pose: Pose
    extents: Vec3  # full side lengths
    color: RGBA


@dataclass
class ProxyPlane:
    present: bool = False
    pose: Pose = field(default_factory=Pose.identity)
    grid_cell: float = 0.05
    half_extent_u: float = 1.0
    half_extent_v: float = 1.0


@dataclass
class StyleState:
    current_color: RGBA = COLOR_PALETTE[0]
    current_radius: float = RADIUS_PALETTE[1]


@dataclass
class Scene:
    strokes: list[StrokeRecord] = field(default_factory=list)
    primitives: list[PrimitiveRecord] = field(default_factory=list)
    proxy_plane: ProxyPlane = field(default_factory=ProxyPlane)
    world: WorldTransform = field(default_factory=WorldTransform)
    style: StyleState = field(default_factory=StyleState)
    next_id: int = 1
    tracked_volume: Vec3 = DEFAULT_TRACKED_VOLUME

    def allocate_id(self) -> int:
        i = self.next_id
        self.next_id += 1
        return i

    def find_primitive(self, pid: int) -> PrimitiveRecord | None:
        for p in self.primitives:
            if p.id == pid:
                return p
        return None


def world_from_physical(scene: Scene, p: Vec3) -> Vec3:
    return scene.world.world_from_physical(p)


def physical_from_world(scene: Scene, p: Vec3) -> Vec3:
    return scene.world.physical_from_world(p)


# ---------------------------------------------------------------------------
# canonical serialization
# ---------------------------------------------------------------------------

def _um(v: float) -> int:
    """Quantize a length to integer micrometers, round half to even."""
    return round(v * 1e6)


def _q7(v: float) -> int:
    """Quantize a unitless value (quaternion component, scale) to 1e-7."""
    return round(v * 1e7)


def _vec_um(v: Vec3) -> list[int]:
    return [_um(v.x), _um(v.y), _um(v.z)]


def _quat_q7(r: Rotation) -> list[int]:
    return [_q7(r.qx), _q7(r.qy), _q7(r.qz), _q7(r.qw)]


def _stroke_dict(s: StrokeRecord) -> dict:
    return {
        "id": s.id,
        "kind": s.kind,
        "radius_um": _um(s.radius),
        "color": list(s.color),
        "samples_um": [_vec_um(p) for p in s.samples],
    }


def _primitive_dict(p: PrimitiveRecord) -> dict:
    return {
        "id": p.id,
        "kind": p.kind,
        "pos_um": _vec_um(p.pose.position),
        "quat_q7": _quat_q7(p.pose.rotation),
        "extents_um": _vec_um(p.extents),
        "color": list(p.color),
    }


def _plane_dict(pl: ProxyPlane) -> dict | None:
    if not pl.present:
        return None
    return {
        "pos_um": _vec_um(pl.pose.position),
        "quat_q7": _quat_q7(pl.pose.rotation),
        "grid_cell_um": _um(pl.grid_cell),
        "half_u_um": _um(pl.half_extent_u),
        "half_v_um": _um(pl.half_extent_v),
    }


def scene_to_canonical_dict(scene: Scene) -> dict:
    return {
        "format": "airsketch-scene",
        "version": 1,
        "next_id": scene.next_id,
        "tracked_volume_um": _vec_um(scene.tracked_volume),
        "world": {
            "scale_q7": _q7(scene.world.scale),
            "offset_um": _vec_um(scene.world.offset),
        },
        "style": {
            "color": list(scene.style.current_color),
            "radius_um": _um(scene.style.current_radius),
        },
        "proxy_plane": _plane_dict(scene.proxy_plane),
        "strokes": [_stroke_dict(s) for s in sorted(scene.strokes, key=lambda s: s.id)],
        "primitives": [
            _primitive_dict(p) for p in sorted(scene.primitives, key=lambda p: p.id)
        ],
    }


def canonical_serialize(scene: Scene) -> bytes:
    d = scene_to_canonical_dict(scene)
    return json.dumps(d, sort_keys=True, separators=(",", ":")).encode("utf-8")


def scene_hash(scene: Scene) -> str:
    return hashlib.sha256(canonical_serialize(scene)).hexdigest()


def _vec_from_um(v: list[int]) -> Vec3:
    return Vec3(v[0] / 1e6, v[1] / 1e6, v[2] / 1e6)


def _quat_from_q7(q: list[int]) -> Rotation:
    return Rotation(q[0] / 1e7, q[1] / 1e7, q[2] / 1e7, q[3] / 1e7)


def stroke_from_dict(d: dict) -> StrokeRecord:
    return StrokeRecord(
        id=d["id"],
        kind=d["kind"],
        radius=d["radius_um"] / 1e6,
        color=tuple(d["color"]),
        samples=[_vec_from_um(s) for s in d["samples_um"]],
    )


def primitive_from_dict(d: dict) -> PrimitiveRecord:
    return PrimitiveRecord(
        id=d["id"],
        kind=d["kind"],
        pose=Pose(_vec_from_um(d["pos_um"]), _quat_from_q7(d["quat_q7"])),
        extents=_vec_from_um(d["extents_um"]),
        color=tuple(d["color"]),
    )


def plane_from_dict(d: dict | None) -> ProxyPlane:
    if d is None:
        return ProxyPlane(present=False)
    return ProxyPlane(
        present=True,
        pose=Pose(_vec_from_um(d["pos_um"]), _quat_from_q7(d["quat_q7"])),
        grid_cell=d["grid_cell_um"] / 1e6,
        half_extent_u=d["half_u_um"] / 1e6,
        half_extent_v=d["half_v_um"] / 1e6,
    )


def deserialize(data: bytes) -> Scene:
    d = json.loads(data.decode("utf-8"))
    if d.get("format") != "airsketch-scene" or d.get("version") != 1:
        raise ValueError("unrecognized scene format")
    return Scene(
        strokes=[stroke_from_dict(s) for s in d["strokes"]],
        primitives=[primitive_from_dict(p) for p in d["primitives"]],
        proxy_plane=plane_from_dict(d["proxy_plane"]),
        world=WorldTransform(
            scale=d["world"]["scale_q7"] / 1e7,
            offset=_vec_from_um(d["world"]["offset_um"]),
        ),
        style=StyleState(
            current_color=tuple(d["style"]["color"]),
            current_radius=d["style"]["radius_um"] / 1e6,
        ),
        next_id=d["next_id"],
        tracked_volume=_vec_from_um(d["tracked_volume_um"]),
    )


# ---------------------------------------------------------------------------
# primitive meshes
# ---------------------------------------------------------------------------

# Box faces in +x, -x, +y, -y, +z, -z order; each quad is split into two
# triangles sharing the same face id.
_BOX_CORNERS = [
    (-1, -1, -1), (1, -1, -1), (1, 1, -1), (-1, 1, -1),
    (-1, -1, 1), (1, -1, 1), (1, 1, 1), (-1, 1, 1),
]
_BOX_FACES = [
    (2, 6, 5, 1),  # +x
    (7, 3, 0, 4),  # -x
    (7, 6, 2, 3),  # +y
    (0, 1, 5, 4),  # -y
    (6, 7, 4, 5),  # +z
    (3, 2, 1, 0),  # -z
]


def box_mesh(extents: Vec3) -> tuple[list[Vec3], list[tuple[int, int, int]], list[int]]:
    """Local-frame box mesh: (vertices, triangles, per-triangle face ids)."""
    hx, hy, hz = extents.x / 2, extents.y / 2, extents.z / 2
    verts = [Vec3(cx * hx, cy * hy, cz * hz) for cx, cy, cz in _BOX_CORNERS]
    tris: list[tuple[int, int, int]] = []
    face_ids: list[int] = []
    for fid, (a, b, c, d) in enumerate(_BOX_FACES):
        tris.append((a, b, c))
        tris.append((a, c, d))
        face_ids.extend((fid, fid))
    return verts, tris, face_ids


def cylinder_mesh(
    extents: Vec3, facets: int = CYLINDER_FACETS
) -> tuple[list[Vec3], list[tuple[int, int, int]], list[int]]:
    """Y-axis cylinder.  Face ids: 0 top cap, 1 bottom cap, 2+i side facet i."""
    r = extents.x / 2
    hy = extents.y / 2
    top = [
        Vec3(r * math.cos(2 * math.pi * i / facets), hy,
             r * math.sin(2 * math.pi * i / facets))
        for i in range(facets)
    ]
    bot = [Vec3(v.x, -hy, v.z) for v in top]
    verts = top + bot + [Vec3(0, hy, 0), Vec3(0, -hy, 0)]
    ct, cb = 2 * facets, 2 * facets + 1
    tris: list[tuple[int, int, int]] = []
    face_ids: list[int] = []
    for i in range(facets):
        j = (i + 1) % facets
        # winding: +Y up, CCW seen from outside
        tris.append((ct, j, i))
        face_ids.append(0)
        tris.append((cb, facets + i, facets + j))
        face_ids.append(1)
        tris.append((i, j, facets + j))
        tris.append((i, facets + j, facets + i))
        face_ids.extend((2 + i, 2 + i))
    return verts, tris, face_ids


def sphere_mesh(
    extents: Vec3, rings: int = SPHERE_RINGS, segments: int = SPHERE_SEGMENTS
) -> tuple[list[Vec3], list[tuple[int, int, int]], list[int]]:
    """UV sphere; face id equals triangle index."""
    r = extents.x / 2
    verts: list[Vec3] = [Vec3(0, r, 0)]
    for i in range(1, rings):
        phi = math.pi * i / rings
        for j in range(segments):
            th = 2 * math.pi * j / segments
            verts.append(
                Vec3(r * math.sin(phi) * math.cos(th),
                     r * math.cos(phi),
                     r * math.sin(phi) * math.sin(th))
            )
    verts.append(Vec3(0, -r, 0))
    last = len(verts) - 1
    tris: list[tuple[int, int, int]] = []
    for j in range(segments):
        tris.append((0, 1 + (j + 1) % segments, 1 + j))
    for i in range(rings - 2):
        a = 1 + i * segments
        b = a + segments
        for j in range(segments):
            j2 = (j + 1) % segments
            tris.append((a + j, a + j2, b + j2))
            tris.append((a + j, b + j2, b + j))
    base = 1 + (rings - 2) * segments
    for j in range(segments):
        tris.append((last, base + j, base + (j + 1) % segments))
    face_ids = list(range(len(tris)))
    return verts, tris, face_ids


# world-frame meshes are rebuilt constantly during picking; memoize on the
# value of (kind, extents, pose), all frozen and hashable
_MESH_CACHE: dict = {}
_MESH_CACHE_MAX = 512


def primitive_mesh(p: PrimitiveRecord) -> tuple[list[Vec3], list[tuple[int, int, int]], list[int]]:
    """World-frame triangle mesh of a primitive."""
    key = (p.kind, p.extents, p.pose.position, p.pose.rotation)
    cached = _MESH_CACHE.get(key)
    if cached is not None:
        return cached
    if p.kind == "box":
        verts, tris, fids = box_mesh(p.extents)
    elif p.kind == "cylinder":
        verts, tris, fids = cylinder_mesh(p.extents)
    elif p.kind == "sphere":
        verts, tris, fids = sphere_mesh(p.extents)
    else:
        raise ValueError(f"unknown primitive kind {p.kind!r}")
    verts = [p.pose.position + p.pose.rotation.apply(v) for v in verts]
    if len(_MESH_CACHE) >= _MESH_CACHE_MAX:
        _MESH_CACHE.clear()
    _MESH_CACHE[key] = (verts, tris, fids)
    return verts, tris, fids


def primitive_contains(p: PrimitiveRecord, point: Vec3, slack: float = 0.0) -> bool:
    """Closed-volume containment test in the primitive's local frame."""
    local = p.pose.rotation.inverse().apply(point - p.pose.position)
    hx, hy, hz = p.extents.x / 2, p.extents.y / 2, p.extents.z / 2
    if p.kind == "box":
        return (abs(local.x) <= hx + slack and abs(local.y) <= hy + slack
                and abs(local.z) <= hz + slack)
    if p.kind == "sphere":
        return local.norm() <= hx + slack
    if p.kind == "cylinder":
        rad = math.hypot(local.x, local.z)
        return rad <= hx + slack and abs(local.y) <= hy + slack
    raise ValueError(f"unknown primitive kind {p.kind!r}")


# ---------------------------------------------------------------------------
# mesh export
# ---------------------------------------------------------------------------

def export_mesh(scene: Scene, fmt: str = "obj") -> bytes:
    """Export every stroke tube and primitive as triangles.

    Entities are emitted in id order; vertex order within an entity follows
    tessellation order, so the output is byte-deterministic.
    """
    if fmt != "obj":
        raise ValueError(f"unsupported export format {fmt!r}")
    from .stroke import DEFAULT_RADIAL_SEGMENTS, tessellate_tube

    lines = ["# airsketch OBJ export"]
    offset = 0
    entities: list[tuple[int, str, object]] = [
        (s.id, "stroke", s) for s in scene.strokes
    ] + [(p.id, "prim", p) for p in scene.primitives]
    for eid, tag, ent in sorted(entities, key=lambda e: e[0]):
        if tag == "stroke":
            mesh = tessellate_tube(ent.samples, ent.radius, DEFAULT_RADIAL_SEGMENTS)
            verts, tris = mesh.vertices, mesh.triangles
        else:
            verts, tris, _ = primitive_mesh(ent)
        lines.append(f"o {tag}_{eid}")
        for v in verts:
            lines.append(f"v {v.x:.6f} {v.y:.6f} {v.z:.6f}")
        for a, b, c in tris:
            lines.append(f"f {a + 1 + offset} {b + 1 + offset} {c + 1 + offset}")
        offset += len(verts)
    return ("\n".join(lines) + "\n").encode("utf-8")
