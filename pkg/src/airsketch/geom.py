"""3D math primitives: vectors, quaternions, poses, rays, planes, snapping.

Conventions used across the engine:
  - right-handed coordinates, +Y up, meters everywhere
  - quaternions stored as (x, y, z, w), unit norm
  - Euler angles are intrinsic yaw(Y) -> pitch(X) -> roll(Z), degrees
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EPS_UNIT = 1e-9
EPS_PARALLEL = 1e-9
EPS_TRI_AREA = 1e-12


@dataclass(frozen=True)
class Vec3:
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, o: "Vec3") -> "Vec3":
        return Vec3(self.x + o.x, self.y + o.y, self.z + o.z)

    def __sub__(self, o: "Vec3") -> "Vec3":
        return Vec3(self.x - o.x, self.y - o.y, self.z - o.z)

    def __mul__(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "Vec3":
        return Vec3(self.x / s, self.y / s, self.z / s)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def dot(self, o: "Vec3") -> float:
        return self.x * o.x + self.y * o.y + self.z * o.z

    def cross(self, o: "Vec3") -> "Vec3":
        return Vec3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n < EPS_UNIT:
            raise ValueError("cannot normalize near-zero vector")
        return self / n

    def is_finite(self) -> bool:
        return all(math.isfinite(c) for c in (self.x, self.y, self.z))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


UP = Vec3(0.0, 1.0, 0.0)
DOWN = Vec3(0.0, -1.0, 0.0)


def distance(a: Vec3, b: Vec3) -> float:
    return (a - b).norm()


@dataclass(frozen=True)
class Rotation:
    """Unit quaternion; identity is (0, 0, 0, 1)."""

    qx: float = 0.0
    qy: float = 0.0
    qz: float = 0.0
    qw: float = 1.0

    def norm(self) -> float:
        return math.sqrt(self.qx**2 + self.qy**2 + self.qz**2 + self.qw**2)

    def normalized(self) -> "Rotation":
        n = self.norm()
        if n == 0.0:
            raise ValueError("zero quaternion")
        return Rotation(self.qx / n, self.qy / n, self.qz / n, self.qw / n)

    def __mul__(self, o: "Rotation") -> "Rotation":
        x1, y1, z1, w1 = self.qx, self.qy, self.qz, self.qw
        x2, y2, z2, w2 = o.qx, o.qy, o.qz, o.qw
        return Rotation(
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        )

    def inverse(self) -> "Rotation":
        return Rotation(-self.qx, -self.qy, -self.qz, self.qw)

    def apply(self, v: Vec3) -> Vec3:
        # v' = q v q*  via the expanded cross-product form
        qv = Vec3(self.qx, self.qy, self.qz)
        t = qv.cross(v) * 2.0
        return v + t * self.qw + qv.cross(t)

    @staticmethod
    def identity() -> "Rotation":
        return Rotation()

    @staticmethod
    def from_axis_angle(axis: Vec3, angle_rad: float) -> "Rotation":
        a = axis.normalized()
        h = angle_rad * 0.5
        s = math.sin(h)
        return Rotation(a.x * s, a.y * s, a.z * s, math.cos(h))

    @staticmethod
    def between(a: Vec3, b: Vec3) -> "Rotation":
        """Minimal rotation taking unit vector a onto unit vector b."""
        a = a.normalized()
        b = b.normalized()
        d = a.dot(b)
        if d > 1.0 - 1e-12:
            return Rotation.identity()
        if d < -1.0 + 1e-12:
            # 180 degrees: any axis perpendicular to a
            ref = Vec3(1.0, 0.0, 0.0) if abs(a.x) < 0.9 else Vec3(0.0, 1.0, 0.0)
            axis = a.cross(ref).normalized()
            return Rotation.from_axis_angle(axis, math.pi)
        axis = a.cross(b)
        w = 1.0 + d
        return Rotation(axis.x, axis.y, axis.z, w).normalized()

    @staticmethod
    def from_basis(xaxis: Vec3, yaxis: Vec3, zaxis: Vec3) -> "Rotation":
        """Quaternion for the rotation whose columns are the given orthonormal basis."""
        m00, m01, m02 = xaxis.x, yaxis.x, zaxis.x
        m10, m11, m12 = xaxis.y, yaxis.y, zaxis.y
        m20, m21, m22 = xaxis.z, yaxis.z, zaxis.z
        tr = m00 + m11 + m22
        if tr > 0.0:
            s = math.sqrt(tr + 1.0) * 2.0
            q = Rotation((m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s, 0.25 * s)
        elif m00 > m11 and m00 > m22:
            s = math.sqrt(1.0 + m00 - m11 - m22) * 2.0
            q = Rotation(0.25 * s, (m01 + m10) / s, (m02 + m20) / s, (m21 - m12) / s)
        elif m11 > m22:
            s = math.sqrt(1.0 + m11 - m00 - m22) * 2.0
            q = Rotation((m01 + m10) / s, 0.25 * s, (m12 + m21) / s, (m02 - m20) / s)
        else:
            s = math.sqrt(1.0 + m22 - m00 - m11) * 2.0
            q = Rotation((m02 + m20) / s, (m12 + m21) / s, 0.25 * s, (m10 - m01) / s)
        return q.normalized()

    @staticmethod
    def from_euler_deg(yaw: float, pitch: float, roll: float) -> "Rotation":
        """Intrinsic yaw(Y) * pitch(X) * roll(Z), degrees."""
        qy = Rotation.from_axis_angle(Vec3(0, 1, 0), math.radians(yaw))
        qx = Rotation.from_axis_angle(Vec3(1, 0, 0), math.radians(pitch))
        qz = Rotation.from_axis_angle(Vec3(0, 0, 1), math.radians(roll))
        return qy * qx * qz

    def to_euler_deg(self) -> tuple[float, float, float]:
        """Inverse of from_euler_deg; returns (yaw, pitch, roll) in degrees."""
        x, y, z, w = self.qx, self.qy, self.qz, self.qw
        # rotation matrix elements needed for the YXZ extraction
        m02 = 2.0 * (x * z + w * y)
        m10 = 2.0 * (x * y + w * z)
        m11 = 1.0 - 2.0 * (x * x + z * z)
        m12 = 2.0 * (y * z - w * x)
        m22 = 1.0 - 2.0 * (x * x + y * y)
        sp = max(-1.0, min(1.0, -m12))
        cp = math.hypot(m10, m11)  # |cos(pitch)|, well conditioned at the pole
        pitch = math.atan2(sp, cp)
        if cp < 1e-7:
            # gimbal lock: fold roll into yaw
            m01 = 2.0 * (x * y - w * z)
            m00 = 1.0 - 2.0 * (y * y + z * z)
            yaw = math.atan2(-m01, m00)
            roll = 0.0
        else:
            yaw = math.atan2(m02, m22)
            roll = math.atan2(m10, m11)
        return (math.degrees(yaw), math.degrees(pitch), math.degrees(roll))


@dataclass(frozen=True)
class Pose:
    position: Vec3 = Vec3()
    rotation: Rotation = Rotation()

    @staticmethod
    def identity() -> "Pose":
        return Pose()


def compose(parent: Pose, child: Pose) -> Pose:
    """Rigid composition: first apply child, then parent."""
    return Pose(
        parent.position + parent.rotation.apply(child.position),
        (parent.rotation * child.rotation).normalized(),
    )


def inverse(p: Pose) -> Pose:
    rinv = p.rotation.inverse()
    return Pose(rinv.apply(-p.position), rinv)


@dataclass(frozen=True)
class Ray:
    origin: Vec3
    direction: Vec3  # unit length


@dataclass(frozen=True)
class PlaneEq:
    """Plane as normal . p = offset, with unit normal."""

    normal: Vec3
    offset: float

    @staticmethod
    def from_point_normal(point: Vec3, normal: Vec3) -> "PlaneEq":
        n = normal.normalized()
        return PlaneEq(n, n.dot(point))

    def signed_distance(self, p: Vec3) -> float:
        return self.normal.dot(p) - self.offset


@dataclass(frozen=True)
class Aabb:
    min: Vec3
    max: Vec3

    def contains(self, p: Vec3) -> bool:
        return (
            self.min.x <= p.x <= self.max.x
            and self.min.y <= p.y <= self.max.y
            and self.min.z <= p.z <= self.max.z
        )

    def ray_hits(self, r: Ray) -> bool:
        """Slab test; inclusive, used only as a conservative prefilter."""
        tmin, tmax = 0.0, math.inf
        for lo, hi, o, d in (
            (self.min.x, self.max.x, r.origin.x, r.direction.x),
            (self.min.y, self.max.y, r.origin.y, r.direction.y),
            (self.min.z, self.max.z, r.origin.z, r.direction.z),
        ):
            if abs(d) < 1e-15:
                if o < lo or o > hi:
                    return False
                continue
            t1 = (lo - o) / d
            t2 = (hi - o) / d
            if t1 > t2:
                t1, t2 = t2, t1
            tmin = max(tmin, t1)
            tmax = min(tmax, t2)
            if tmin > tmax:
                return False
        return True


def _snap_value(v: float, step: float) -> float:
    """Nearest multiple of step, ties rounded away from zero.

    The tie test carries 1e-9 slack so quotients like 0.075/0.05, which float
    division lands infinitesimally below the true half, still round up.
    """
    q = abs(v) / step
    k = math.floor(q)
    if q - k > 0.5 - 1e-9:
        k += 1
    return math.copysign(k * step, v) if k != 0 else 0.0


def quantize_euler_15(angles_deg: Vec3) -> Vec3:
    """Snap each Euler component to the nearest 15 degree multiple.

    Ties round away from zero; results wrapped into [-180, 180].
    """
    out = []
    for a in (angles_deg.x, angles_deg.y, angles_deg.z):
        s = _snap_value(a, 15.0)
        while s > 180.0:
            s -= 360.0
        while s < -180.0:
            s += 360.0
        out.append(s)
    return Vec3(*out)


def project_point_plane(p: Vec3, plane: PlaneEq) -> Vec3:
    return p - plane.normal * plane.signed_distance(p)


def ray_plane(r: Ray, plane: PlaneEq) -> tuple[float, Vec3] | None:
    denom = plane.normal.dot(r.direction)
    if abs(denom) < EPS_PARALLEL:
        return None
    t = -plane.signed_distance(r.origin) / denom
    if t < 0.0:
        return None
    return t, r.origin + r.direction * t


def ray_triangle(
    r: Ray, a: Vec3, b: Vec3, c: Vec3
) -> tuple[float, tuple[float, float], Vec3] | None:
    """Moller-Trumbore intersection.

    Returns (t, (u, v), unit geometric normal) or None.  Barycentric hit
    region is inclusive: u, v >= 0 and u + v <= 1.  Degenerate triangles
    (area <= 1e-12 m^2) never hit.
    """
    e1 = b - a
    e2 = c - a
    n = e1.cross(e2)
    if n.norm() * 0.5 <= EPS_TRI_AREA:
        return None
    pvec = r.direction.cross(e2)
    det = e1.dot(pvec)
    if abs(det) < 1e-15:
        return None
    inv = 1.0 / det
    tvec = r.origin - a
    u = tvec.dot(pvec) * inv
    if u < 0.0 or u > 1.0:
        return None
    qvec = tvec.cross(e1)
    v = r.direction.dot(qvec) * inv
    if v < 0.0 or u + v > 1.0:
        return None
    t = e2.dot(qvec) * inv
    if t < 0.0:
        return None
    return t, (u, v), n.normalized()


def snap_to_grid2d(u: float, v: float, cell: float) -> tuple[float, float]:
    """Snap plane-frame coordinates to the nearest grid intersection."""
    if cell <= 0.0:
        raise ValueError(f"grid cell must be positive, got {cell}")
    return _snap_value(u, cell), _snap_value(v, cell)
