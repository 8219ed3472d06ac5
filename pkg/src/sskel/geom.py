"""Low-level 2D/3D primitives: tolerances, orientation test, points at
infinity, and the per-edge slab coordinate frame.

Coordinates are plain float tuples throughout; this module is on the hot
path of everything else, so it avoids numpy and object overhead.

Conventions
-----------
* Polygon walks are counter-clockwise; the interior is to the left of each
  directed edge.
* A slab frame attaches three unit vectors to a directed edge: ``E`` along
  the edge in the plane z=0, ``S`` rising over the interior side at 45
  degrees, and ``N = E x S``.  Local coordinates of a point ``p`` on the
  slab plane are ``(a, b)`` with ``p = origin + a*E + b*S``.
* Heights (z) equal wavefront time; along a slab plane ``b = sqrt(2) * z``.
"""

import math

from .errors import DegenerateEdge, OffPlane

SQRT2 = math.sqrt(2.0)
HALF_SQRT2 = SQRT2 / 2.0


class Tol:
    """Hybrid absolute/relative tolerance context.

    A quantity ``x`` with natural magnitude ``scale`` is considered zero
    when ``|x| <= eps_abs + eps_rel * scale``.  The default scale is set
    from the bounding-box diagonal of the input being processed.
    """

    __slots__ = ("eps_abs", "eps_rel", "scale", "length")

    def __init__(self, eps_abs=1e-9, eps_rel=1e-12, scale=1.0):
        if eps_abs <= 0 or eps_rel <= 0:
            raise ValueError("tolerances must be positive")
        self.eps_abs = eps_abs
        self.eps_rel = eps_rel
        self.scale = max(scale, 1e-300)
        # Cached length tolerance; the common test.
        self.length = eps_abs + eps_rel * self.scale

    def with_scale(self, scale):
        return Tol(self.eps_abs, self.eps_rel, scale)

    def zero_len(self, x):
        return abs(x) <= self.length

    def same_time(self, t1, t2):
        return abs(t1 - t2) <= self.eps_abs + self.eps_rel * max(abs(t1), abs(t2), 1.0)

    def same_xy(self, p, q):
        return abs(p[0] - q[0]) <= self.length and abs(p[1] - q[1]) <= self.length

    def same_xyz(self, p, q):
        return (abs(p[0] - q[0]) <= self.length
                and abs(p[1] - q[1]) <= self.length
                and abs(p[2] - q[2]) <= self.length)

    def __repr__(self):
        return "Tol(eps_abs=%g, eps_rel=%g, scale=%g)" % (
            self.eps_abs, self.eps_rel, self.scale)


DEFAULT_TOL = Tol()


def bbox_diagonal(points):
    """Diagonal length of the bounding box of 2D points."""
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return math.hypot(max(xs) - min(xs), max(ys) - min(ys))


# ---------------------------------------------------------------------------
# vector helpers (2D tuples / 3D tuples)

def sub2(p, q):
    return (p[0] - q[0], p[1] - q[1])


def add2(p, q):
    return (p[0] + q[0], p[1] + q[1])


def mul2(p, s):
    return (p[0] * s, p[1] * s)


def dot2(p, q):
    return p[0] * q[0] + p[1] * q[1]


def cross2(p, q):
    return p[0] * q[1] - p[1] * q[0]


def norm2(p):
    return math.hypot(p[0], p[1])


def unit2(p):
    n = math.hypot(p[0], p[1])
    if n == 0.0:
        raise ZeroDivisionError("cannot normalize zero vector")
    return (p[0] / n, p[1] / n)


def rot90(p):
    """Rotate a 2D vector by +90 degrees (counter-clockwise)."""
    return (-p[1], p[0])


def sub3(p, q):
    return (p[0] - q[0], p[1] - q[1], p[2] - q[2])


def add3(p, q):
    return (p[0] + q[0], p[1] + q[1], p[2] + q[2])


def mul3(p, s):
    return (p[0] * s, p[1] * s, p[2] * s)


def dot3(p, q):
    return p[0] * q[0] + p[1] * q[1] + p[2] * q[2]


def cross3(p, q):
    return (p[1] * q[2] - p[2] * q[1],
            p[2] * q[0] - p[0] * q[2],
            p[0] * q[1] - p[1] * q[0])


def norm3(p):
    return math.sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2])


def unit3(p):
    n = norm3(p)
    if n == 0.0:
        raise ZeroDivisionError("cannot normalize zero vector")
    return (p[0] / n, p[1] / n, p[2] / n)


def lerp3(p, q, t):
    return (p[0] + (q[0] - p[0]) * t,
            p[1] + (q[1] - p[1]) * t,
            p[2] + (q[2] - p[2]) * t)


# ---------------------------------------------------------------------------
# predicates

def orient2d(a, b, c, tol=DEFAULT_TOL):
    """Sign of the signed area of triangle abc: +1 CCW, -1 CW, 0 collinear.

    The zero band scales with the squared magnitude of the points so the
    test is meaningful for both tiny and huge inputs.
    """
    area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    span = max(abs(b[0] - a[0]), abs(b[1] - a[1]),
               abs(c[0] - a[0]), abs(c[1] - a[1]), 1.0)
    if abs(area) <= tol.eps_abs * span * span:
        return 0
    return 1 if area > 0.0 else -1


def seg_intersect_2d(p1, p2, q1, q2):
    """Parameters (s, t) with p1 + s*(p2-p1) = q1 + t*(q2-q1), or None if
    the supporting lines are parallel."""
    d1 = sub2(p2, p1)
    d2 = sub2(q2, q1)
    den = cross2(d1, d2)
    if den == 0.0:
        return None
    w = sub2(q1, p1)
    s = cross2(w, d2) / den
    t = cross2(w, d1) / den
    return s, t


# ---------------------------------------------------------------------------
# extended points

class ExtendedPoint:
    """A point of extended 3-space: finite coordinates or a point at
    infinity identified by a unit direction."""

    __slots__ = ("point", "direction")

    def __init__(self, point=None, direction=None):
        if (point is None) == (direction is None):
            raise ValueError("exactly one of point/direction required")
        if point is not None:
            x, y, z = point
            if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
                raise ValueError("finite point has non-finite coordinate")
            self.point = (float(x), float(y), float(z))
            self.direction = None
        else:
            d = unit3(direction)
            self.point = None
            self.direction = d

    @property
    def is_infinite(self):
        return self.direction is not None

    def same_as(self, other, tol=DEFAULT_TOL):
        if self.is_infinite != other.is_infinite:
            return False
        if self.is_infinite:
            d = sub3(self.direction, other.direction)
            return norm3(d) <= 1e-9
        return tol.same_xyz(self.point, other.point)

    def __repr__(self):
        if self.is_infinite:
            return "ExtendedPoint(dir=%r)" % (self.direction,)
        return "ExtendedPoint(%r)" % (self.point,)


def finite(x, y, z):
    return ExtendedPoint(point=(x, y, z))


def at_infinity(direction):
    return ExtendedPoint(direction=direction)


# ---------------------------------------------------------------------------
# slab frames

class SlabFrame:
    """Orthonormal frame (E, S, N) of the slab plane over a directed edge.

    ``E`` lies in the plane z=0 along the edge, ``S`` is orthogonal to
    ``E``, rises over the interior (left) side and makes a 45 degree angle
    with z=0, and ``N = E x S`` is the plane normal.  ``origin`` is the
    edge source lifted to z=0.
    """

    __slots__ = ("origin", "E", "S", "N", "inward")

    def __init__(self, origin, E, S):
        self.origin = origin
        self.E = E
        self.S = S
        self.N = cross3(E, S)
        # xy-projection of S, normalized: the inward edge normal.
        self.inward = (S[0] * SQRT2, S[1] * SQRT2)

    def local(self, p):
        """Local (a, b) coordinates of a 3D point assumed on the plane."""
        d = (p[0] - self.origin[0], p[1] - self.origin[1], p[2] - self.origin[2])
        return (dot3(d, self.E), dot3(d, self.S))

    def local_checked(self, p, tol=DEFAULT_TOL):
        d = (p[0] - self.origin[0], p[1] - self.origin[1], p[2] - self.origin[2])
        off = dot3(d, self.N)
        if abs(off) > 1e3 * tol.length:
            raise OffPlane("point %r lies %.3g off the slab plane" % (p, off))
        return (dot3(d, self.E), dot3(d, self.S))

    def local_dir(self, d):
        """Local direction (da, db) of a 3D direction in the plane."""
        return (dot3(d, self.E), dot3(d, self.S))

    def world(self, a, b):
        o, E, S = self.origin, self.E, self.S
        return (o[0] + a * E[0] + b * S[0],
                o[1] + a * E[1] + b * S[1],
                o[2] + a * E[2] + b * S[2])

    def world_dir(self, da, db):
        E, S = self.E, self.S
        return (da * E[0] + db * S[0],
                da * E[1] + db * S[1],
                da * E[2] + db * S[2])

    def plane_offset(self):
        """d in the plane equation N . p = d."""
        return dot3(self.N, self.origin)

    def height_at_xy(self, x, y):
        """z of the slab plane over (x, y): the distance from (x, y) to
        the supporting line of the base edge, signed toward the interior."""
        ox, oy = self.origin[0], self.origin[1]
        return (x - ox) * self.inward[0] + (y - oy) * self.inward[1]

    def __repr__(self):
        return "SlabFrame(origin=%r, E=%r, S=%r)" % (self.origin, self.E, self.S)


def slab_frame(src, dst, tol=DEFAULT_TOL, virtual_dir=None):
    """Frame for the directed edge src->dst with the interior on its left.

    Zero-length edges must supply ``virtual_dir``, the unit 2D direction
    the edge is considered to point along.
    """
    dx = dst[0] - src[0]
    dy = dst[1] - src[1]
    ln = math.hypot(dx, dy)
    if ln <= tol.length:
        if virtual_dir is None:
            raise DegenerateEdge("edge %r->%r has no direction" % (src, dst))
        ux, uy = unit2(virtual_dir)
    else:
        ux, uy = dx / ln, dy / ln
    nx, ny = -uy, ux  # interior (left) normal
    E = (ux, uy, 0.0)
    S = (nx * HALF_SQRT2, ny * HALF_SQRT2, HALF_SQRT2)
    return SlabFrame((src[0], src[1], 0.0), E, S)


def plane_intersection_dir(frame1, frame2):
    """Direction of the line where two slab planes meet, or None when the
    planes are parallel (their normals are parallel)."""
    d = cross3(frame1.N, frame2.N)
    n = norm3(d)
    if n <= 1e-12:
        return None
    return (d[0] / n, d[1] / n, d[2] / n)


def planes_coplanar(frame1, frame2, tol=DEFAULT_TOL):
    """True when the two slab planes coincide within tolerance."""
    d = cross3(frame1.N, frame2.N)
    if norm3(d) > 1e-9:
        return False
    # Same normal direction (up to sign); compare offsets along frame1.N.
    off = dot3(frame1.N, sub3(frame2.origin, frame1.origin))
    return abs(off) <= 1e3 * tol.length


def bisector_velocity(inward1, inward2):
    """Velocity of a wavefront vertex between two edges with the given
    inward unit normals: the unique v with v.n1 = v.n2 = 1.

    For an interior angle theta this has speed 1/sin(theta/2).  Parallel
    normals (a straight or completely degenerate corner) fall back to the
    shared normal, which is the correct unit-speed limit.
    """
    n1x, n1y = inward1
    n2x, n2y = inward2
    den = n1x * n2y - n1y * n2x
    if abs(den) <= 1e-14:
        # Nearly parallel fronts; move along the mean normal at speed ~1.
        mx, my = n1x + n2x, n1y + n2y
        m = math.hypot(mx, my)
        if m <= 1e-14:
            raise DegenerateEdge("opposite normals give no bisector")
        return (mx / m, my / m)
    vx = (n2y - n1y) / den
    vy = (n1x - n2x) / den
    return (vx, vy)
