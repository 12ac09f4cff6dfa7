"""Ray casting, point containment, and face-to-face snap detection.

Brute force over every primitive triangle is the reference behavior; the
AABB-prefiltered path must select the identical hit (the prefilter is
conservative, so it only skips primitives the ray provably misses).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geom import Aabb, Pose, Ray, Rotation, Vec3, ray_triangle
from .scene import PrimitiveRecord, Scene, primitive_contains, primitive_mesh

FACE_SNAP_ANGLE_TOL_DEG = 20.0
FACE_SNAP_GAP_TOL = 0.03  # meters
CONTAIN_SLACK = 1e-9


@dataclass(frozen=True)
class Hit:
    entity_id: int
    t: float
    point: Vec3
    normal: Vec3
    face_id: int


def _raycast_primitive(r: Ray, prim: PrimitiveRecord) -> Hit | None:
    verts, tris, fids = primitive_mesh(prim)
    best: Hit | None = None
    for (a, b, c), fid in zip(tris, fids):
        res = ray_triangle(r, verts[a], verts[b], verts[c])
        if res is None:
            continue
        t, _, normal = res
        if best is None or t < best.t or (t == best.t and fid < best.face_id):
            best = Hit(prim.id, t, r.origin + r.direction * t, normal, fid)
    return best


def primitive_aabb(prim: PrimitiveRecord) -> Aabb:
    verts, _, _ = primitive_mesh(prim)
    xs = [v.x for v in verts]
    ys = [v.y for v in verts]
    zs = [v.z for v in verts]
    return Aabb(Vec3(min(xs), min(ys), min(zs)), Vec3(max(xs), max(ys), max(zs)))


def raycast_scene(r: Ray, scene: Scene, accelerated: bool = True) -> Hit | None:
    """Minimum-t hit over all primitive faces.

    Ties break to the lower entity id, then the lower face id; iteration in
    ascending id order makes a strict t comparison implement that.
    """
    best: Hit | None = None
    for prim in sorted(scene.primitives, key=lambda p: p.id):
        if accelerated and not primitive_aabb(prim).ray_hits(r):
            continue
        hit = _raycast_primitive(r, prim)
        if hit is not None and (best is None or hit.t < best.t):
            best = hit
    return best


def point_pick(p: Vec3, scene: Scene) -> int | None:
    """Id of the lowest-id primitive whose closed volume contains p."""
    for prim in sorted(scene.primitives, key=lambda pr: pr.id):
        if primitive_contains(prim, p, slack=CONTAIN_SLACK):
            return prim.id
    return None


# ---------------------------------------------------------------------------
# face snapping
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FlatFace:
    center: Vec3
    normal: Vec3  # outward unit
    half_u: float
    half_v: float
    circumradius: float
    face_id: int


def flat_faces(prim: PrimitiveRecord) -> list[FlatFace]:
    """World-frame flat faces: 6 for a box, 2 caps for a cylinder.

    Spheres have none and never participate in face snapping.
    """
    pos, rot = prim.pose.position, prim.pose.rotation
    hx, hy, hz = prim.extents.x / 2, prim.extents.y / 2, prim.extents.z / 2
    faces: list[FlatFace] = []
    if prim.kind == "box":
        local = [
            (Vec3(hx, 0, 0), Vec3(1, 0, 0), hy, hz),
            (Vec3(-hx, 0, 0), Vec3(-1, 0, 0), hy, hz),
            (Vec3(0, hy, 0), Vec3(0, 1, 0), hx, hz),
            (Vec3(0, -hy, 0), Vec3(0, -1, 0), hx, hz),
            (Vec3(0, 0, hz), Vec3(0, 0, 1), hx, hy),
            (Vec3(0, 0, -hz), Vec3(0, 0, -1), hx, hy),
        ]
        for fid, (c, n, hu, hv) in enumerate(local):
            faces.append(FlatFace(
                center=pos + rot.apply(c),
                normal=rot.apply(n),
                half_u=hu, half_v=hv,
                circumradius=math.hypot(hu, hv),
                face_id=fid,
            ))
    elif prim.kind == "cylinder":
        r = hx
        for fid, (c, n) in enumerate(
            [(Vec3(0, hy, 0), Vec3(0, 1, 0)), (Vec3(0, -hy, 0), Vec3(0, -1, 0))]
        ):
            faces.append(FlatFace(
                center=pos + rot.apply(c),
                normal=rot.apply(n),
                half_u=r, half_v=r,
                circumradius=r,
                face_id=fid,
            ))
    return faces


@dataclass(frozen=True)
class SnapAdjustment:
    """World-frame correction: rotate about pivot, then translate."""

    rotation: Rotation
    translation: Vec3
    pivot: Vec3


def apply_snap(pose: Pose, adj: SnapAdjustment) -> Pose:
    pos = adj.pivot + adj.rotation.apply(pose.position - adj.pivot) + adj.translation
    return Pose(pos, (adj.rotation * pose.rotation).normalized())


def detect_face_snap(
    moving: PrimitiveRecord,
    scene: Scene,
    exclude_ids: set[int] | None = None,
    angle_tol_deg: float = FACE_SNAP_ANGLE_TOL_DEG,
    gap_tol: float = FACE_SNAP_GAP_TOL,
) -> SnapAdjustment | None:
    """Find the best face pair between `moving` and the rest of the scene.

    Candidate pairs need normals anti-parallel within angle_tol, a
    perpendicular gap <= gap_tol, and overlapping in-plane footprints; the
    smallest-gap pair wins.  The adjustment makes the normals exactly
    anti-parallel (minimal rotation about the moving primitive's center)
    and the faces exactly coplanar.
    """
    if moving.kind == "sphere":
        return None
    exclude = exclude_ids or {moving.id}
    cos_tol = math.cos(math.radians(angle_tol_deg))
    mfaces = flat_faces(moving)
    best: tuple[float, FlatFace, FlatFace] | None = None
    for other in sorted(scene.primitives, key=lambda p: p.id):
        if other.id in exclude:
            continue
        for sf in flat_faces(other):
            for mf in mfaces:
                if mf.normal.dot(-sf.normal) < cos_tol:
                    continue
                gap = abs(sf.normal.dot(mf.center - sf.center))
                if gap > gap_tol:
                    continue
                inplane = (mf.center - sf.center) - sf.normal * sf.normal.dot(
                    mf.center - sf.center
                )
                if inplane.norm() >= sf.circumradius + mf.circumradius:
                    continue
                if best is None or gap < best[0]:
                    best = (gap, mf, sf)
    if best is None:
        return None
    _, mf, sf = best
    pivot = moving.pose.position
    rot = Rotation.between(mf.normal, -sf.normal)
    new_center = pivot + rot.apply(mf.center - pivot)
    translation = sf.normal * sf.normal.dot(sf.center - new_center)
    return SnapAdjustment(rotation=rot, translation=translation, pivot=pivot)
