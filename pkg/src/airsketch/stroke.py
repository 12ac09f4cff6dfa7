"""Incremental stroke capture and polyline-to-tube tessellation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geom import Rotation, Vec3
from .scene import RGBA, StrokeRecord, StyleState

DEFAULT_MIN_SAMPLE_DISTANCE = 0.003  # world meters; decimates tracker noise
DEFAULT_RADIAL_SEGMENTS = 12
FINAL_POINT_EPSILON = 1e-6  # duplicate-final suppression, 1 um


@dataclass
class StrokeBuilder:
    """Accumulates distance-filtered samples for one in-progress stroke."""

    kind: str
    radius: float
    color: RGBA
    min_sample_distance: float = DEFAULT_MIN_SAMPLE_DISTANCE
    samples: list[Vec3] = field(default_factory=list)

    def append_sample(self, p: Vec3) -> bool:
        """Accept p iff it is the first sample or far enough from the last."""
        if not self.samples:
            self.samples.append(p)
            return True
        if (p - self.samples[-1]).norm() >= self.min_sample_distance:
            self.samples.append(p)
            return True
        return False


def begin_stroke(style: StyleState, kind: str,
                 min_sample_distance: float = DEFAULT_MIN_SAMPLE_DISTANCE) -> StrokeBuilder:
    return StrokeBuilder(
        kind=kind,
        radius=style.current_radius,
        color=style.current_color,
        min_sample_distance=min_sample_distance,
    )


def end_stroke(builder: StrokeBuilder, stroke_id: int,
               final_p: Vec3 | None = None) -> StrokeRecord | None:
    """Finish a stroke; returns None (discard) when fewer than 2 samples."""
    samples = list(builder.samples)
    if final_p is not None:
        if not samples or (final_p - samples[-1]).norm() > FINAL_POINT_EPSILON:
            samples.append(final_p)
    if len(samples) < 2:
        return None
    return StrokeRecord(
        id=stroke_id,
        samples=samples,
        radius=builder.radius,
        color=builder.color,
        kind=builder.kind,
    )


@dataclass
class TubeMesh:
    vertices: list[Vec3]
    normals: list[Vec3]
    triangles: list[tuple[int, int, int]]


def _initial_frame(tangent: Vec3) -> tuple[Vec3, Vec3]:
    ref = Vec3(0.0, 1.0, 0.0)
    if abs(tangent.dot(ref)) > 0.99:
        ref = Vec3(1.0, 0.0, 0.0)
    u = tangent.cross(ref).normalized()
    v = tangent.cross(u)
    return u, v


def tessellate_tube(samples: list[Vec3], radius: float,
                    radial_segments: int = DEFAULT_RADIAL_SEGMENTS) -> TubeMesh:
    """Sweep a circle of the given radius along the polyline.

    Ring i lies in the plane perpendicular to its segment (ring 0 uses the
    first segment, ring i>0 the segment arriving at sample i), so every ring
    vertex sits at exactly `radius` from that segment's axis.  Frames are
    parallel-transported between segments to avoid torsion flips; a 180
    degree reversal reuses the previous frame.  Two cap-center vertices and
    triangle fans close the mesh: n*k + 2 vertices, 2*k*n triangles.
    """
    n = len(samples)
    k = radial_segments
    if n < 2:
        raise ValueError("tube needs at least 2 samples")
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    if k < 3:
        raise ValueError("radial_segments must be >= 3")

    # per-ring tangents: segment directions, ring i>0 takes segment (i-1, i)
    seg_dirs: list[Vec3] = []
    for i in range(n - 1):
        d = samples[i + 1] - samples[i]
        if d.norm() < 1e-12:
            # coincident samples should not occur post-filtering; keep going
            d = seg_dirs[-1] if seg_dirs else Vec3(1.0, 0.0, 0.0)
        else:
            d = d.normalized()
        seg_dirs.append(d)
    ring_tangents = [seg_dirs[0]] + seg_dirs

    u, v = _initial_frame(ring_tangents[0])
    vertices: list[Vec3] = []
    normals: list[Vec3] = []
    prev_t = ring_tangents[0]
    cos_step = [math.cos(2 * math.pi * j / k) for j in range(k)]
    sin_step = [math.sin(2 * math.pi * j / k) for j in range(k)]
    for i in range(n):
        t = ring_tangents[i]
        if i > 0:
            d = prev_t.dot(t)
            if d < -1.0 + 1e-12:
                pass  # reversal: keep previous frame
            elif d < 1.0 - 1e-12:
                rot = Rotation.between(prev_t, t)
                u = rot.apply(u)
                v = rot.apply(v)
            prev_t = t
        c = samples[i]
        for j in range(k):
            nrm = u * cos_step[j] + v * sin_step[j]
            vertices.append(c + nrm * radius)
            normals.append(nrm)

    cap_start = len(vertices)
    vertices.append(samples[0])
    normals.append(-ring_tangents[0])
    vertices.append(samples[-1])
    normals.append(ring_tangents[-1])

    triangles: list[tuple[int, int, int]] = []
    for i in range(n - 1):
        a = i * k
        b = (i + 1) * k
        for j in range(k):
            j2 = (j + 1) % k
            triangles.append((a + j, b + j, b + j2))
            triangles.append((a + j, b + j2, a + j2))
    for j in range(k):
        j2 = (j + 1) % k
        triangles.append((cap_start, j2, j))
    last = (n - 1) * k
    for j in range(k):
        j2 = (j + 1) % k
        triangles.append((cap_start + 1, last + j, last + j2))

    return TubeMesh(vertices=vertices, normals=normals, triangles=triangles)
