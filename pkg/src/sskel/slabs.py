"""Slabs: the 45-degree strip over each edge, bounded by lifted
motorcycle tracks, plus slab/slab and slab/vertical-plane intersections.

A slab lives in the plane through its base edge rising over the interior.
In local (a, b) coordinates its region is

    { (a, b) :  a_min <= a <= a_max,  b >= G(a) }

where G is the lower envelope of the base edge and the lifted tracks of
every motorcycle listing this edge as one of its two wavefront edges
(chained crash-launched motorcycles included).  Escaped motorcycles make
the region unbounded sideways.  Heights satisfy z = b / sqrt(2).
"""

import math

from . import geom
from .geom import SQRT2, sub2, norm2, dot3, cross3, sub3
from . import envelope as envmod
from .errors import MissingMotorcycle

INF = math.inf


class LowerPiece:
    """One linear piece of a slab's lower boundary.

    ``a0``/``a1`` bound the horizontal extent (may be +-inf); the geometry
    is the line through the finite anchor point with the given slope.
    """

    __slots__ = ("a0", "a1", "anchor_a", "anchor_b", "slope", "kind", "moto")

    def __init__(self, a0, a1, anchor_a, anchor_b, slope, kind, moto):
        self.a0 = a0
        self.a1 = a1
        self.anchor_a = anchor_a
        self.anchor_b = anchor_b
        self.slope = slope
        self.kind = kind      # "base" or "moto"
        self.moto = moto      # Motorcycle or None

    def b_at(self, a):
        return self.anchor_b + self.slope * (a - self.anchor_a)

    def __repr__(self):
        return "LowerPiece(%s %g..%g)" % (self.kind, self.a0, self.a1)


class Slab:
    __slots__ = ("gid", "frame", "base_len", "lower", "a_min", "a_max",
                 "left_ray_dir", "right_ray_dir", "tol", "caps", "is_zero",
                 "motos")

    def __init__(self, gid, frame, base_len, lower, a_min, a_max,
                 left_ray_dir, right_ray_dir, tol, is_zero, motos=()):
        self.gid = gid
        self.frame = frame
        self.base_len = base_len
        self.lower = lower              # LowerPiece list, sorted by a
        self.a_min = a_min
        self.a_max = a_max
        # Local directions of unbounded chain ends (escaped riders);
        # None means the slab side is closed by an upward slope ray.
        self.left_ray_dir = left_ray_dir
        self.right_ray_dir = right_ray_dir
        self.tol = tol
        self.caps = None                # cell mode fills this in
        self.is_zero = is_zero
        self.motos = list(motos)        # every rider listing this edge

    # -- region queries ---------------------------------------------------

    def floor_at(self, a):
        """G(a): lower boundary height in local coordinates, or +inf when
        a is outside the horizontal extent."""
        lower = self.lower
        lo, hi = 0, len(lower)
        while lo < hi:
            mid = (lo + hi) // 2
            if lower[mid].a1 < a:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(lower) and lower[lo].a0 <= a <= lower[lo].a1:
            return lower[lo].b_at(a)
        # Tolerate endpoint roundoff.
        if lower:
            if a < lower[0].a0:
                return lower[0].b_at(lower[0].a0)
            if a > lower[-1].a1:
                return lower[-1].b_at(lower[-1].a1)
        return INF

    def contains_local(self, a, b, slack=None):
        eps = (self.tol.length if slack is None else slack) * SQRT2
        if a < self.a_min - eps or a > self.a_max + eps:
            return False
        return b >= self.floor_at(min(max(a, self.a_min), self.a_max)) - eps

    def contains_xy(self, q, slack=None):
        """Is q inside the slab's vertical projection?  If so the slab's
        height over q is its distance to the base line."""
        z = self.frame.height_at_xy(q[0], q[1])
        eps = self.tol.length if slack is None else slack
        if z < -eps:
            return False
        a, b = self.frame.local((q[0], q[1], z))
        return self.contains_local(a, b, slack)

    def height_at_xy(self, q, slack=None):
        if not self.contains_xy(q, slack):
            return INF
        return max(self.frame.height_at_xy(q[0], q[1]), 0.0)

    def boundary_points_local(self):
        pts = []
        for p in self.lower:
            if not math.isinf(p.a0):
                pts.append((p.a0, p.b_at(p.a0)))
        last = self.lower[-1]
        if not math.isinf(last.a1):
            pts.append((last.a1, last.b_at(last.a1)))
        return pts

    # -- intersections ----------------------------------------------------

    def clip_line_local(self, a0, b0, da, db):
        """Clip the local line (a0 + t*da, b0 + t*db) to the region.

        Returns a list of (t_lo, t_hi) intervals; infinite bounds allowed.
        """
        eps = self.tol.length * SQRT2
        lo, hi = -INF, INF
        if abs(da) > 1e-14:
            t1 = (self.a_min - a0) / da
            t2 = (self.a_max - a0) / da
            if t1 > t2:
                t1, t2 = t2, t1
            lo, hi = max(lo, t1), min(hi, t2)
        else:
            if not (self.a_min - eps <= a0 <= self.a_max + eps):
                return []
        if lo > hi:
            return []
        cuts = []
        pieces = list(self.lower)
        if self.caps:
            pieces.extend(self.caps)
        for p in pieces:
            den = db - p.slope * da
            if abs(den) <= 1e-16:
                continue
            t = (p.anchor_b + p.slope * (a0 - p.anchor_a) - b0) / den
            at = a0 + t * da
            if p.a0 - eps <= at <= p.a1 + eps:
                cuts.append(t)
        cuts = sorted(c for c in cuts if lo <= c <= hi)
        cuts.insert(0, lo)
        cuts.append(hi)
        out = []
        for i in range(len(cuts) - 1):
            t_a, t_b = cuts[i], cuts[i + 1]
            if not t_b > t_a:
                continue
            if math.isinf(t_a):
                t_mid = t_b - 1.0 if not math.isinf(t_b) else 0.0
            elif math.isinf(t_b):
                t_mid = t_a + 1.0
            else:
                t_mid = 0.5 * (t_a + t_b)
            am = a0 + t_mid * da
            bm = b0 + t_mid * db
            inside = self.contains_local(am, bm)
            if inside and self.caps:
                inside = not _above_caps(self.caps, am, bm, eps)
            if inside:
                if out and out[-1][1] == t_a:
                    out[-1] = (out[-1][0], t_b)
                else:
                    out.append((t_a, t_b))
        return out


def _above_caps(caps, a, b, eps):
    for p in caps:
        if p.a0 - eps <= a <= p.a1 + eps and b > p.b_at(a) + eps:
            return True
    return False


# ---------------------------------------------------------------------------
# construction

def build_slab(edge_gid, mg, tol=None):
    """slab(e): edge slab plus the motorcycle slabs of every rider listing
    edge e, chained through simultaneous crashes."""
    arena = mg.arena
    if tol is None:
        tol = mg.tol
    p, q, wi, li, inward, is_zero = arena.edges[edge_gid]
    walk = arena.walks[wi]
    if is_zero:
        frame = geom.slab_frame(p, q, tol, walk.virtual_dirs[li])
        base_len = 0.0
    else:
        frame = geom.slab_frame(p, q, tol)
        base_len = norm2(sub2(q, p))

    n = len(walk)
    walk_offset = edge_gid - li
    src_corner = walk_offset + li
    tgt_corner = walk_offset + (li + 1) % n

    pieces = []
    if base_len > 0:
        pieces.append(envmod.segment_piece(0.0, 0.0, base_len, 0.0,
                                           ("base", None)))
    sides = {}
    all_motos = []
    for side, corner in (("left", src_corner), ("right", tgt_corner)):
        ray_dir = None
        chain_pts = []
        first = None
        for m in mg.motorcycles:
            if m.source == ("reflex", corner) and edge_gid in (m.edge_a, m.edge_b):
                first = m
                break
        theta = arena.corners[corner][3]
        if theta > math.pi + 1e-9 and first is None:
            raise MissingMotorcycle(
                "no motorcycle for reflex corner %d of edge %d" % (corner, edge_gid))
        if first is not None:
            chain = mg.chain_for_edge(edge_gid, first)
            all_motos.extend(chain)
            for m in chain:
                o3 = (m.origin[0], m.origin[1], m.launch_time)
                a0, b0 = frame.local_checked(o3, tol)
                if m.escaped:
                    d3 = (m.velocity[0], m.velocity[1], 1.0)
                    da, db = frame.local_dir(d3)
                    nn = math.hypot(da, db)
                    ray_dir = (da / nn, db / nn)
                    slope = db / da if abs(da) > 1e-14 else INF
                    if abs(da) > 1e-14:
                        pieces.append(envmod.ray_piece(
                            a0, b0, slope, ("moto", m.mid), 1 if da > 0 else -1))
                        chain_pts.append(((a0, b0), None, m))
                    break
                c3 = (m.crash_point[0], m.crash_point[1], m.crash_time)
                a1, b1 = frame.local_checked(c3, tol)
                chain_pts.append(((a0, b0), (a1, b1), m))
                piece = envmod.segment_piece(a0, b0, a1, b1, ("moto", m.mid))
                if piece is not None:
                    pieces.append(piece)
        sides[side] = (ray_dir, chain_pts)

    env = envmod.envelope_of_pieces(pieces)
    if not env:
        raise MissingMotorcycle("slab %d has an empty boundary" % edge_gid)
    lower = []
    moto_by_id = {m.mid: m for m in mg.motorcycles}
    for piece in env:
        kind, ref = piece.tag
        moto = moto_by_id[ref] if kind == "moto" else None
        if math.isinf(piece.x0):
            anchor_a, anchor_b = piece.x1, piece.value(piece.x1)
        else:
            anchor_a, anchor_b = piece.x0, piece.y0
        lower.append(LowerPiece(piece.x0, piece.x1, anchor_a, anchor_b,
                                piece.slope, kind, moto))
    a_min = env[0].x0
    a_max = env[-1].x1
    return Slab(edge_gid, frame, base_len, lower, a_min, a_max,
                sides["left"][0], sides["right"][0], tol, is_zero,
                motos=all_motos)


def build_all_slabs(mg, tol=None):
    return {gid: build_slab(gid, mg, tol)
            for gid in range(len(mg.arena.edges))}


# ---------------------------------------------------------------------------
# slab x slab

class SlabIntersection:
    __slots__ = ("kind", "segments")

    def __init__(self, kind, segments=()):
        self.kind = kind            # "empty" | "segment" | "coplanar"
        self.segments = list(segments)

    def __repr__(self):
        return "SlabIntersection(%s, %d seg)" % (self.kind, len(self.segments))


def plane_line(frame1, frame2):
    """A point and unit direction of the intersection line of two slab
    planes, or None when parallel."""
    d = cross3(frame1.N, frame2.N)
    nd = geom.norm3(d)
    if nd <= 1e-12:
        return None
    d = (d[0] / nd, d[1] / nd, d[2] / nd)
    n1, n2 = frame1.N, frame2.N
    c1 = dot3(n1, frame1.origin)
    c2 = dot3(n2, frame2.origin)
    # p = alpha*n1 + beta*n2 solves n1.p=c1, n2.p=c2.
    n11 = dot3(n1, n1)
    n12 = dot3(n1, n2)
    n22 = dot3(n2, n2)
    den = n11 * n22 - n12 * n12
    alpha = (c1 * n22 - c2 * n12) / den
    beta = (c2 * n11 - c1 * n12) / den
    p = (alpha * n1[0] + beta * n2[0],
         alpha * n1[1] + beta * n2[1],
         alpha * n1[2] + beta * n2[2])
    return p, d


def intersect_slabs(s1, s2):
    if geom.planes_coplanar(s1.frame, s2.frame, s1.tol):
        if _regions_overlap(s1, s2):
            return SlabIntersection("coplanar")
        return SlabIntersection("empty")
    pl = plane_line(s1.frame, s2.frame)
    if pl is None:
        return SlabIntersection("empty")
    p, d = pl
    a1, b1 = s1.frame.local(p)
    da1, db1 = s1.frame.local_dir(d)
    iv1 = s1.clip_line_local(a1, b1, da1, db1)
    if not iv1:
        return SlabIntersection("empty")
    a2, b2 = s2.frame.local(p)
    da2, db2 = s2.frame.local_dir(d)
    iv2 = s2.clip_line_local(a2, b2, da2, db2)
    segs = []
    for (u0, u1) in iv1:
        for (v0, v1) in iv2:
            t0, t1 = max(u0, v0), min(u1, v1)
            if t1 > t0 + 1e-12:
                segs.append(_line_piece(p, d, t0, t1))
    if not segs:
        return SlabIntersection("empty")
    return SlabIntersection("segment", segs)


def _line_piece(p, d, t0, t1):
    if math.isinf(t0):
        e0 = geom.at_infinity((-d[0], -d[1], -d[2]))
    else:
        e0 = geom.finite(p[0] + t0 * d[0], p[1] + t0 * d[1], p[2] + t0 * d[2])
    if math.isinf(t1):
        e1 = geom.at_infinity(d)
    else:
        e1 = geom.finite(p[0] + t1 * d[0], p[1] + t1 * d[1], p[2] + t1 * d[2])
    return (e0, e1)


def _regions_overlap(s1, s2):
    # Coarse but adequate: sample lower-boundary midpoints of each slab a
    # little above the floor and test against the other.
    for (sa, sb) in ((s1, s2), (s2, s1)):
        for piece in sa.lower:
            if math.isinf(piece.a0) or math.isinf(piece.a1):
                continue
            am = 0.5 * (piece.a0 + piece.a1)
            bm = piece.b_at(am) + 10 * sa.tol.length
            w = sa.frame.world(am, bm)
            if sb.contains_xy((w[0], w[1])):
                z2 = sb.frame.height_at_xy(w[0], w[1])
                if abs(z2 - w[2]) <= 1e3 * sa.tol.length:
                    return True
    return False


# ---------------------------------------------------------------------------
# slab x vertical plane

def intersect_slab_vertical_plane(slab, x0):
    """Intersection with the vertical plane x = x0, as (y, z) segments.

    Returns a list of ((y0, z0), (y1, z1), t-interval) in plane
    coordinates; infinite ends carry None with the direction implied by
    the neighbouring finite point.
    """
    frame = slab.frame
    Ex, Sx = frame.E[0], frame.S[0]
    c = x0 - frame.origin[0]
    # Local line: Ex*a + Sx*b = c; direction (-Sx, Ex) normalized.
    nrm = math.hypot(Ex, Sx)
    if nrm <= 1e-14:
        return []
    da, db = -Sx / nrm, Ex / nrm
    # Anchor point on the line.
    a0 = c * Ex / (nrm * nrm)
    b0 = c * Sx / (nrm * nrm)
    intervals = slab.clip_line_local(a0, b0, da, db)
    out = []
    for (t0, t1) in intervals:
        def to_world(t):
            return frame.world(a0 + t * da, b0 + t * db)
        p0 = None if math.isinf(t0) else to_world(t0)
        p1 = None if math.isinf(t1) else to_world(t1)
        out.append((p0, p1, (t0, t1), (a0, b0, da, db)))
    return out
