"""Proxy-plane placement, constrained sampling, and laser surface projection.

The proxy plane's local frame has its normal along local +Y; the grid lives
in the local XZ plane, so plane-frame coordinates are (local x, local z).
"""

from __future__ import annotations

from .geom import (
    PlaneEq,
    Pose,
    Ray,
    Rotation,
    Vec3,
    project_point_plane,
    quantize_euler_15,
    snap_to_grid2d,
)
from .picking import flat_faces, raycast_scene
from .scene import ProxyPlane, Scene

DEFAULT_GRID_CELL = 0.05  # meters
DEFAULT_HALF_EXTENT = 1.0  # meters
SNAP_DISTANCE = 0.05  # world meters, pen-to-plane
HAND_DISTANCE_THRESHOLD = 0.25  # meters; closer means grid-line mode
LASER_SURFACE_OFFSET = 0.002  # meters along the hit normal


def plane_equation(plane: ProxyPlane) -> PlaneEq:
    normal = plane.pose.rotation.apply(Vec3(0.0, 1.0, 0.0))
    return PlaneEq.from_point_normal(plane.pose.position, normal)


def plane_frame_coords(plane: ProxyPlane, p: Vec3) -> tuple[float, float]:
    local = plane.pose.rotation.inverse().apply(p - plane.pose.position)
    return local.x, local.z


def plane_frame_point(plane: ProxyPlane, u: float, v: float) -> Vec3:
    return plane.pose.position + plane.pose.rotation.apply(Vec3(u, 0.0, v))


def place_plane_freehand(pen_pose: Pose, grid_cell: float = DEFAULT_GRID_CELL) -> ProxyPlane:
    """Plane at the pen tip, orientation snapped to 15 degree Euler steps."""
    yaw, pitch, roll = pen_pose.rotation.to_euler_deg()
    snapped = quantize_euler_15(Vec3(pitch, yaw, roll))
    rot = Rotation.from_euler_deg(snapped.y, snapped.x, snapped.z)
    return ProxyPlane(
        present=True,
        pose=Pose(pen_pose.position, rot),
        grid_cell=grid_cell,
        half_extent_u=DEFAULT_HALF_EXTENT,
        half_extent_v=DEFAULT_HALF_EXTENT,
    )


def place_plane_on_surface(pen_ray: Ray, scene: Scene,
                           grid_cell: float = DEFAULT_GRID_CELL) -> ProxyPlane | None:
    """Place the plane coplanar with the primitive face the pen ray hits.

    The grid cell stays fixed; the plane extents adopt the hit face's size.
    Only flat faces (box sides, cylinder caps) accept placement; ray misses
    and stroke tubes yield None.
    """
    hit = raycast_scene(pen_ray, scene)
    if hit is None:
        return None
    prim = scene.find_primitive(hit.entity_id)
    if prim is None:
        return None
    face = None
    for f in flat_faces(prim):
        if abs(f.normal.dot(hit.normal)) > 0.999999 and abs(
            f.normal.dot(hit.point - f.center)
        ) < 1e-6:
            face = f
            break
    if face is None:
        # curved surface: tangent plane at the hit point, default extents
        n = hit.normal
        ref = Vec3(0, 1, 0) if abs(n.dot(Vec3(0, 1, 0))) < 0.99 else Vec3(1, 0, 0)
        xaxis = ref.cross(n).normalized()
        zaxis = xaxis.cross(n)
        rot = Rotation.from_basis(xaxis, n, zaxis)
        return ProxyPlane(
            present=True,
            pose=Pose(hit.point, rot),
            grid_cell=grid_cell,
            half_extent_u=DEFAULT_HALF_EXTENT,
            half_extent_v=DEFAULT_HALF_EXTENT,
        )
    # align the in-plane axes with the face edges
    n = face.normal
    ref = Vec3(0, 1, 0) if abs(n.dot(Vec3(0, 1, 0))) < 0.99 else Vec3(0, 0, 1)
    xaxis = ref.cross(n).normalized()
    if prim.kind == "box":
        # face edges are the primitive's local axes projected into the face
        best = None
        for axis in (Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)):
            cand = prim.pose.rotation.apply(axis)
            d = abs(cand.dot(n))
            if d < 0.5 and (best is None or d < best[0]):
                best = (d, cand)
        if best is not None:
            xaxis = (best[1] - n * n.dot(best[1])).normalized()
    zaxis = xaxis.cross(n)
    rot = Rotation.from_basis(xaxis, n, zaxis)
    return ProxyPlane(
        present=True,
        pose=Pose(face.center, rot),
        grid_cell=grid_cell,
        half_extent_u=face.half_u,
        half_extent_v=face.half_v,
    )


def snap_pen_to_plane(pen_tip: Vec3, plane: ProxyPlane,
                      snap_distance: float = SNAP_DISTANCE) -> Vec3 | None:
    """Projected tip when the pen is within snap range of the plane."""
    if not plane.present:
        return None
    eq = plane_equation(plane)
    if abs(eq.signed_distance(pen_tip)) > snap_distance:
        return None
    return project_point_plane(pen_tip, eq)


def constrained_sample(pen_tip: Vec3, plane: ProxyPlane,
                       hand_distance: float) -> tuple[Vec3, str]:
    """Plane-constrained sample point and the active sub-mode.

    Hands closer than the threshold: grid-snapped point (`grid_line`);
    otherwise free sketching in the plane (`free_planar`).
    """
    eq = plane_equation(plane)
    projected = project_point_plane(pen_tip, eq)
    if hand_distance < HAND_DISTANCE_THRESHOLD:
        u, v = plane_frame_coords(plane, projected)
        su, sv = snap_to_grid2d(u, v, plane.grid_cell)
        return plane_frame_point(plane, su, sv), "grid_line"
    return projected, "free_planar"


def laser_project_sample(pen_ray: Ray, scene: Scene) -> Vec3 | None:
    """Closest surface point under the pen ray, lifted 2 mm off the face."""
    hit = raycast_scene(pen_ray, scene)
    if hit is None:
        return None
    return hit.point + hit.normal * LASER_SURFACE_OFFSET
