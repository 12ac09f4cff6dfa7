"""Proxy plane placement, constrained sampling, laser projection."""

import math
import random

import pytest

from airsketch.constraints import (
    HAND_DISTANCE_THRESHOLD,
    LASER_SURFACE_OFFSET,
    SNAP_DISTANCE,
    constrained_sample,
    laser_project_sample,
    place_plane_freehand,
    place_plane_on_surface,
    plane_equation,
    plane_frame_coords,
    snap_pen_to_plane,
)
from airsketch.geom import Pose, Ray, Rotation, Vec3, ray_triangle
from airsketch.scene import PrimitiveRecord, Scene, StrokeRecord, primitive_mesh


def make_box_scene(center=Vec3(0, 1, -2), extents=Vec3(2, 2, 2)) -> Scene:
    s = Scene()
    s.primitives.append(PrimitiveRecord(
        id=s.allocate_id(), kind="box", pose=Pose(center, Rotation.identity()),
        extents=extents, color=(255, 255, 255, 255)))
    return s


class TestFreehandPlacement:
    def test_yaw_snap(self):
        pen = Pose(Vec3(0, 1, 0), Rotation.from_euler_deg(17, 0, 0))
        plane = place_plane_freehand(pen)
        yaw, pitch, roll = plane.pose.rotation.to_euler_deg()
        assert yaw == pytest.approx(15.0, abs=1e-9)
        assert pitch == pytest.approx(0.0, abs=1e-9)

    def test_axis_aligned_fixed_point(self):
        pen = Pose(Vec3(0.3, 1.1, -0.4), Rotation.from_euler_deg(30, -45, 90))
        plane = place_plane_freehand(pen)
        for a, b in zip(plane.pose.rotation.to_euler_deg(), (30, -45, 90)):
            assert a == pytest.approx(b, abs=1e-9)

    def test_tie_away_from_zero(self):
        pen = Pose(Vec3(), Rotation.from_euler_deg(7.5, 0, 0))
        plane = place_plane_freehand(pen)
        yaw, _, _ = plane.pose.rotation.to_euler_deg()
        assert yaw == pytest.approx(15.0, abs=1e-9)

    def test_centered_at_pen_with_default_extents(self):
        pen = Pose(Vec3(1, 2, 3), Rotation.identity())
        plane = place_plane_freehand(pen)
        assert plane.pose.position == Vec3(1, 2, 3)
        assert plane.half_extent_u == 1.0 and plane.half_extent_v == 1.0
        assert plane.present

    def test_euler_multiples_random(self):
        rng = random.Random(21)
        for _ in range(100):
            pen = Pose(Vec3(), Rotation.from_euler_deg(
                rng.uniform(-179, 179), rng.uniform(-85, 85), rng.uniform(-179, 179)))
            plane = place_plane_freehand(pen)
            for a in plane.pose.rotation.to_euler_deg():
                assert abs(a / 15.0 - round(a / 15.0)) < 1e-9


class TestSurfacePlacement:
    def test_box_face(self):
        scene = make_box_scene()
        # +z face of the box at z = -1
        ray = Ray(Vec3(0, 1, 2), Vec3(0, 0, -1))
        plane = place_plane_on_surface(ray, scene)
        assert plane is not None
        n = plane.pose.rotation.apply(Vec3(0, 1, 0))
        assert (n - Vec3(0, 0, 1)).norm() < 1e-9
        assert plane.half_extent_u == pytest.approx(1.0)
        assert plane.half_extent_v == pytest.approx(1.0)
        assert (plane.pose.position - Vec3(0, 1, -1)).norm() < 1e-9

    def test_miss_returns_none(self):
        scene = make_box_scene()
        assert place_plane_on_surface(Ray(Vec3(0, 10, 2), Vec3(0, 0, 1)), scene) is None

    def test_strokes_are_not_surfaces(self):
        scene = Scene()
        scene.strokes.append(StrokeRecord(
            id=scene.allocate_id(), samples=[Vec3(-1, 1, -2), Vec3(1, 1, -2)],
            radius=0.05, color=(0, 0, 0, 255), kind="air"))
        ray = Ray(Vec3(0, 1, 0), Vec3(0, 0, -1))
        assert place_plane_on_surface(ray, scene) is None

    def test_placed_plane_immediately_snappable(self):
        scene = make_box_scene()
        ray = Ray(Vec3(0.3, 0.8, 2), Vec3(0, 0, -1))
        plane = place_plane_on_surface(ray, scene)
        assert plane is not None
        hit_point = Vec3(0.3, 0.8, -1)
        assert snap_pen_to_plane(hit_point, plane) is not None


class TestPenSnap:
    def plane(self):
        return place_plane_freehand(Pose(Vec3(0, 1, 0), Rotation.identity()))

    def test_within_snap(self):
        p = snap_pen_to_plane(Vec3(0.1, 1.02, 0.1), self.plane())
        assert p is not None
        assert p.y == pytest.approx(1.0, abs=1e-12)

    def test_outside_snap(self):
        assert snap_pen_to_plane(Vec3(0, 1.10, 0), self.plane()) is None

    def test_on_plane_identity(self):
        p = snap_pen_to_plane(Vec3(0.2, 1.0, -0.3), self.plane())
        assert (p - Vec3(0.2, 1.0, -0.3)).norm() < 1e-12

    def test_just_inside_and_outside_snap_range(self):
        assert snap_pen_to_plane(Vec3(0, 1.0 + SNAP_DISTANCE - 1e-3, 0),
                                 self.plane()) is not None
        assert snap_pen_to_plane(Vec3(0, 1.0 + SNAP_DISTANCE + 1e-3, 0),
                                 self.plane()) is None


class TestConstrainedSample:
    def plane(self):
        return place_plane_freehand(Pose(Vec3(0, 1, 0), Rotation.identity()))

    def test_grid_mode_close_hands(self):
        point, mode = constrained_sample(Vec3(0.26, 1.01, 0.26), self.plane(), 0.10)
        assert mode == "grid_line"
        u, v = plane_frame_coords(self.plane(), point)
        assert u == pytest.approx(0.25, abs=1e-12)
        assert v == pytest.approx(0.25, abs=1e-12)

    def test_free_mode_far_hands(self):
        point, mode = constrained_sample(Vec3(0.26, 1.01, 0.26), self.plane(), 0.60)
        assert mode == "free_planar"
        assert (point - Vec3(0.26, 1.0, 0.26)).norm() < 1e-12

    def test_threshold_boundary_strict(self):
        _, mode = constrained_sample(Vec3(0, 1, 0), self.plane(),
                                     HAND_DISTANCE_THRESHOLD)
        assert mode == "free_planar"

    def test_samples_on_plane(self):
        plane = self.plane()
        eq = plane_equation(plane)
        for hand_d in (0.1, 0.5):
            p, _ = constrained_sample(Vec3(0.37, 1.04, -0.11), plane, hand_d)
            assert abs(eq.signed_distance(p)) < 1e-6


def brute_force_raycast(ray: Ray, scene: Scene):
    """All-triangle scan, no prefilter; independent of picking internals."""
    best = None
    for prim in scene.primitives:
        verts, tris, _ = primitive_mesh(prim)
        for a, b, c in tris:
            res = ray_triangle(ray, verts[a], verts[b], verts[c])
            if res and (best is None or res[0] < best[0]):
                best = (res[0], res[2])
    return best


class TestLaser:
    def test_offset_along_normal(self):
        scene = make_box_scene()
        ray = Ray(Vec3(0, 1, 2), Vec3(0, 0, -1))
        p = laser_project_sample(ray, scene)
        assert p is not None
        assert p.z == pytest.approx(-1.0 + LASER_SURFACE_OFFSET, abs=1e-9)

    def test_miss_none(self):
        scene = make_box_scene()
        assert laser_project_sample(Ray(Vec3(0, 1, 2), Vec3(0, 0, 1)), scene) is None

    def test_nearest_hit_chosen(self):
        scene = make_box_scene(center=Vec3(0, 1, -2))
        scene.primitives.append(PrimitiveRecord(
            id=scene.allocate_id(), kind="box",
            pose=Pose(Vec3(0, 1, -5), Rotation.identity()),
            extents=Vec3(2, 2, 2), color=(255, 255, 255, 255)))
        rng = random.Random(31)
        for _ in range(200):
            origin = Vec3(rng.uniform(-1.5, 1.5), rng.uniform(0, 2), 2.0)
            target = Vec3(rng.uniform(-1, 1), rng.uniform(0.2, 1.8),
                          rng.uniform(-6, -1))
            ray = Ray(origin, (target - origin).normalized())
            got = laser_project_sample(ray, scene)
            expect = brute_force_raycast(ray, scene)
            if expect is None:
                assert got is None
            else:
                t, n = expect
                p = ray.origin + ray.direction * t + n * LASER_SURFACE_OFFSET
                assert (got - p).norm() < 1e-9
