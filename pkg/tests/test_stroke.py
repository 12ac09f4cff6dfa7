"""Stroke capture filtering and tube tessellation."""

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from airsketch.geom import Vec3
from airsketch.scene import StyleState
from airsketch.stroke import (
    StrokeBuilder,
    begin_stroke,
    end_stroke,
    tessellate_tube,
)


class TestBuilder:
    def test_begin_uses_style(self):
        style = StyleState(current_color=(1, 2, 3, 255), current_radius=0.004)
        b = begin_stroke(style, "air")
        assert b.radius == 0.004
        assert b.color == (1, 2, 3, 255)
        assert b.samples == []

    def test_first_sample_accepted(self):
        b = begin_stroke(StyleState(), "air")
        assert b.append_sample(Vec3(0, 0, 0))

    def test_close_sample_rejected(self):
        b = begin_stroke(StyleState(), "air")
        b.append_sample(Vec3(0, 0, 0))
        assert not b.append_sample(Vec3(0.001, 0, 0))
        assert len(b.samples) == 1

    def test_boundary_distance_accepted(self):
        b = begin_stroke(StyleState(), "air")
        b.append_sample(Vec3(0, 0, 0))
        assert b.append_sample(Vec3(0.003, 0, 0))

    def test_single_sample_discarded(self):
        b = begin_stroke(StyleState(), "air")
        b.append_sample(Vec3(0, 0, 0))
        assert end_stroke(b, 1) is None

    def test_two_samples_commit(self):
        b = begin_stroke(StyleState(), "air")
        b.append_sample(Vec3(0, 0, 0))
        b.append_sample(Vec3(0.01, 0, 0))
        rec = end_stroke(b, 5)
        assert rec is not None
        assert rec.id == 5 and len(rec.samples) == 2

    def test_final_point_appended_even_when_close(self):
        b = begin_stroke(StyleState(), "air")
        b.append_sample(Vec3(0, 0, 0))
        rec = end_stroke(b, 1, final_p=Vec3(0.0005, 0, 0))
        assert rec is not None
        assert len(rec.samples) == 2

    def test_coincident_final_suppressed(self):
        b = begin_stroke(StyleState(), "air")
        for i in range(5):
            b.append_sample(Vec3(0.01 * i, 0, 0))
        rec = end_stroke(b, 1, final_p=Vec3(0.04, 0, 0))
        assert rec is not None
        assert len(rec.samples) == 5

    def test_pairwise_spacing_invariant(self):
        rng = random.Random(2)
        b = begin_stroke(StyleState(), "air")
        p = Vec3(0, 0, 0)
        for _ in range(500):
            p = p + Vec3(rng.uniform(-0.004, 0.004), rng.uniform(-0.004, 0.004),
                         rng.uniform(-0.004, 0.004))
            b.append_sample(p)
        for a, c in zip(b.samples, b.samples[1:]):
            assert (c - a).norm() >= b.min_sample_distance - 1e-12


def edge_counts(tris):
    counts = {}
    for a, b, c in tris:
        for e in ((a, b), (b, c), (c, a)):
            key = (min(e), max(e))
            counts[key] = counts.get(key, 0) + 1
    return counts


def point_line_distance(p: Vec3, a: Vec3, d: Vec3) -> float:
    """Distance from p to the infinite line through a with direction d."""
    w = p - a
    return (w - d * w.dot(d)).norm()


class TestTessellation:
    def test_counts_2_samples(self):
        m = tessellate_tube([Vec3(), Vec3(0, 0, 1)], 0.01, 12)
        assert len(m.vertices) == 26
        assert len(m.triangles) == 48

    def test_counts_10_samples(self):
        pts = [Vec3(0, 0, 0.1 * i) for i in range(10)]
        m = tessellate_tube(pts, 0.01, 12)
        assert len(m.vertices) == 122
        assert len(m.triangles) == 240

    @given(st.integers(2, 20), st.integers(3, 16))
    @settings(max_examples=30, deadline=None)
    def test_counts_formula(self, n, k):
        rng = random.Random(n * 100 + k)
        pts = [Vec3(0, 0, 0)]
        for _ in range(n - 1):
            pts.append(pts[-1] + Vec3(rng.uniform(0.01, 0.1),
                                      rng.uniform(-0.05, 0.05),
                                      rng.uniform(0.01, 0.1)))
        m = tessellate_tube(pts, 0.004, k)
        assert len(m.vertices) == n * k + 2
        assert len(m.triangles) == 2 * k * n

    def test_closed_manifold(self):
        rng = random.Random(9)
        pts = [Vec3(0, 0, 0)]
        for _ in range(7):
            pts.append(pts[-1] + Vec3(rng.uniform(0.02, 0.1),
                                      rng.uniform(-0.05, 0.05),
                                      rng.uniform(0.02, 0.1)))
        m = tessellate_tube(pts, 0.004, 12)
        counts = edge_counts(m.triangles)
        assert all(c == 2 for c in counts.values())
        v, e, f = len(m.vertices), len(counts), len(m.triangles)
        assert v - e + f == 2

    def test_ring_vertices_at_radius(self):
        rng = random.Random(4)
        pts = [Vec3(0, 0, 0)]
        for _ in range(9):
            pts.append(pts[-1] + Vec3(rng.uniform(0.02, 0.1),
                                      rng.uniform(-0.05, 0.05),
                                      rng.uniform(0.02, 0.1)))
        r = 0.006
        k = 12
        m = tessellate_tube(pts, r, k)
        # ring i's axis is the segment arriving at sample i (ring 0: first)
        for i, center in enumerate(pts):
            seg = (min(i, len(pts) - 2), min(i, len(pts) - 2) + 1) if i == 0 \
                else (i - 1, i)
            d = (pts[seg[1]] - pts[seg[0]]).normalized()
            for j in range(k):
                v = m.vertices[i * k + j]
                assert point_line_distance(v, center, d) == pytest.approx(r, abs=1e-9)

    def test_colinear_rings_parallel(self):
        pts = [Vec3(0, 0, 0), Vec3(0, 0, 0.1), Vec3(0, 0, 0.25)]
        m = tessellate_tube(pts, 0.01, 8)
        for j in range(8):
            a = m.vertices[j] - pts[0]
            b = m.vertices[8 + j] - pts[1]
            c = m.vertices[16 + j] - pts[2]
            assert (a - b).norm() < 1e-12
            assert (b - c).norm() < 1e-12

    def test_deterministic(self):
        pts = [Vec3(0.1 * i, 0.05 * math.sin(i), 0.02 * i * i) for i in range(6)]
        m1 = tessellate_tube(pts, 0.004, 12)
        m2 = tessellate_tube(pts, 0.004, 12)
        assert m1.vertices == m2.vertices
        assert m1.triangles == m2.triangles

    def test_reversal_keeps_frame(self):
        pts = [Vec3(0, 0, 0), Vec3(0, 0, 0.1), Vec3(0, 0, 0.0)]
        m = tessellate_tube(pts, 0.01, 8)
        assert len(m.vertices) == 26

    @pytest.mark.parametrize("pts,radius,k", [
        ([Vec3()], 0.01, 12),
        ([Vec3(), Vec3(0, 0, 1)], 0.0, 12),
        ([Vec3(), Vec3(0, 0, 1)], 0.01, 2),
    ])
    def test_invalid_inputs(self, pts, radius, k):
        with pytest.raises(ValueError):
            tessellate_tube(pts, radius, k)
