"""Weakly simple polygons, PSLG boundary walks, and chain splitting.

A polygon or PSLG face boundary is stored as one or more *walks*: closed
vertex sequences traversed with the region interior on the left.  Walks
may revisit vertices and edges (weak simplicity); sharp 2*pi turns are
normalized into zero-length edges that carry a virtual direction so every
edge has a well-defined slab frame.
"""

import math

from . import geom
from .geom import (Tol, DEFAULT_TOL, sub2, dot2, cross2, norm2, unit2, rot90,
                   orient2d)
from .errors import (NotWeaklySimple, TooFewVertices, NonPlanar,
                     DanglingSegment, ChainTooShort)


class BoundaryWalk:
    """A closed edge walk with the region interior on its left.

    ``points[i]`` is the source of edge ``i``; edge ``i`` runs to
    ``points[(i+1) % n]``.  Corner ``i`` sits at ``points[i]`` between
    edges ``i-1`` and ``i``.
    """

    __slots__ = ("points", "virtual_dirs", "reflex", "interior_angles",
                 "edge_dirs", "edge_lens", "tol")

    def __init__(self, points, virtual_dirs, tol):
        self.points = points
        self.virtual_dirs = virtual_dirs  # edge index -> unit 2D direction
        self.tol = tol
        n = len(points)
        self.edge_dirs = []
        self.edge_lens = []
        for i in range(n):
            p = points[i]
            q = points[(i + 1) % n]
            d = sub2(q, p)
            ln = norm2(d)
            self.edge_lens.append(ln)
            if ln <= tol.length:
                self.edge_dirs.append(virtual_dirs[i])
            else:
                self.edge_dirs.append((d[0] / ln, d[1] / ln))
        self.interior_angles = []
        self.reflex = []
        for i in range(n):
            d_in = self.edge_dirs[i - 1]
            d_out = self.edge_dirs[i]
            theta = interior_angle(d_in, d_out)
            self.interior_angles.append(theta)
            self.reflex.append(theta > math.pi + 1e-9)

    def __len__(self):
        return len(self.points)

    def edge(self, i):
        n = len(self.points)
        return self.points[i % n], self.points[(i + 1) % n]

    def inward_normal(self, i):
        d = self.edge_dirs[i]
        return (-d[1], d[0])

    def is_zero_length(self, i):
        return i in self.virtual_dirs


def interior_angle(d_in, d_out):
    """Interior angle at a corner with incoming/outgoing unit directions,
    for a walk with interior on the left.  Range (0, 2*pi]."""
    turn = math.atan2(cross2(d_in, d_out), dot2(d_in, d_out))
    theta = math.pi - turn
    if theta <= 1e-12:
        theta += 2.0 * math.pi
    return theta


def signed_area(points):
    s = 0.0
    n = len(points)
    for i in range(n):
        p = points[i]
        q = points[(i + 1) % n]
        s += p[0] * q[1] - q[0] * p[1]
    return 0.5 * s


def winding_contains(points, q):
    """Point-in-polygon by winding number; boundary points unreliable."""
    wn = 0
    n = len(points)
    x, y = q
    for i in range(n):
        p0 = points[i]
        p1 = points[(i + 1) % n]
        if p0[1] <= y:
            if p1[1] > y and cross2(sub2(p1, p0), (x - p0[0], y - p0[1])) > 0:
                wn += 1
        else:
            if p1[1] <= y and cross2(sub2(p1, p0), (x - p0[0], y - p0[1])) < 0:
                wn -= 1
    return wn != 0


class WeaklySimplePolygon:
    """Normalized weakly simple polygon: one CCW boundary walk."""

    __slots__ = ("walk", "tol", "scale", "diagnostics")

    def __init__(self, walk, tol, diagnostics=None):
        self.walk = walk
        self.tol = tol
        self.scale = tol.scale
        self.diagnostics = diagnostics or []

    @property
    def points(self):
        return self.walk.points

    @property
    def reflex(self):
        return self.walk.reflex

    def __len__(self):
        return len(self.walk)


def build_polygon(loop, tol=None, validate=True):
    """Normalize and validate a coordinate loop into a weakly simple
    polygon.

    Normalization drops duplicate consecutive points and zero-angle
    spikes, enforces CCW orientation, and replaces every 2*pi sharp turn
    with a zero-length edge aimed perpendicular to the turn.
    """
    pts = [(float(x), float(y)) for x, y in loop]
    if len(pts) < 3:
        raise TooFewVertices("need at least 3 points, got %d" % len(pts))
    if tol is None:
        tol = DEFAULT_TOL.with_scale(max(geom.bbox_diagonal(pts), 1e-12))

    pts = _drop_duplicates(pts, tol)
    if len(pts) < 3:
        raise TooFewVertices("fewer than 3 distinct points after cleanup")

    area = signed_area(pts)
    if abs(area) <= tol.length * tol.length:
        raise NotWeaklySimple("walk bounds no area")
    if area < 0:
        pts.reverse()

    pts, diagnostics = _drop_spikes(pts, tol)
    if len(pts) < 3:
        raise TooFewVertices("fewer than 3 points after spike removal")

    points, virtual_dirs = _insert_cap_edges(pts, tol)
    walk = BoundaryWalk(points, virtual_dirs, tol)

    if validate:
        _check_weak_simplicity(walk, tol)
    return WeaklySimplePolygon(walk, tol, diagnostics)


def _drop_duplicates(pts, tol):
    out = []
    for p in pts:
        if out and tol.same_xy(out[-1], p):
            continue
        out.append(p)
    while len(out) > 1 and tol.same_xy(out[0], out[-1]):
        out.pop()
    return out


def _is_reversal(d_in, d_out):
    return dot2(d_in, d_out) < -1.0 + 1e-9 and abs(cross2(d_in, d_out)) <= 1e-9


def _drop_spikes(pts, tol):
    """Remove zero-angle spikes: corners where the walk doubles back with
    no interior on the tip side.  Slit tips (interior angle 2*pi) stay."""
    diagnostics = []
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        n = len(pts)
        for i in range(n):
            p_prev = pts[(i - 1) % n]
            p = pts[i]
            p_next = pts[(i + 1) % n]
            d_in = sub2(p, p_prev)
            d_out = sub2(p_next, p)
            if norm2(d_in) <= tol.length or norm2(d_out) <= tol.length:
                continue
            d_in = unit2(d_in)
            d_out = unit2(d_out)
            if not _is_reversal(d_in, d_out):
                continue
            # Probe just left of the incoming edge near the tip: interior
            # there means a slit tip; no interior means a spike.
            eps = 1e-6 * tol.scale
            probe = (p[0] - eps * d_in[0] + eps * 0.1 * -d_in[1],
                     p[1] - eps * d_in[1] + eps * 0.1 * d_in[0])
            if winding_contains(pts, probe):
                continue  # slit tip, handled by cap-edge insertion
            diagnostics.append(("spike_removed", p))
            del pts[i]
            changed = True
            break
    return pts, diagnostics


def _insert_cap_edges(pts, tol):
    """Duplicate every sharp-turn vertex into a zero-length cap edge.

    The cap edge points along the incoming direction rotated clockwise by
    90 degrees, which puts its interior side straight past the tip; both
    new corners then have interior angle 3*pi/2.
    """
    points = []
    virtual_dirs = {}
    n = len(pts)
    for i in range(n):
        p_prev = pts[(i - 1) % n]
        p = pts[i]
        p_next = pts[(i + 1) % n]
        d_in = unit2(sub2(p, p_prev))
        d_out = unit2(sub2(p_next, p))
        points.append(p)
        if _is_reversal(d_in, d_out):
            virtual_dirs[len(points) - 1] = (d_in[1], -d_in[0])
            points.append(p)
    return points, virtual_dirs


def _check_weak_simplicity(walk, tol):
    """Reject walks whose edges properly cross or whose vertices touch
    non-incident edge interiors.  Coincident collinear edges pass."""
    pts = walk.points
    n = len(pts)
    segs = [walk.edge(i) for i in range(n)]
    eps = 10.0 * tol.length
    for i in range(n):
        p1, p2 = segs[i]
        if walk.edge_lens[i] <= tol.length:
            continue
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if walk.edge_lens[j] <= tol.length:
                continue
            q1, q2 = segs[j]
            hit = geom.seg_intersect_2d(p1, p2, q1, q2)
            if hit is None:
                continue  # parallel/collinear: treated disjoint
            s, t = hit
            li = walk.edge_lens[i]
            lj = walk.edge_lens[j]
            si, ti = eps / li, eps / lj
            if si < s < 1.0 - si and ti < t < 1.0 - ti:
                raise NotWeaklySimple(
                    "edges %d and %d cross at s=%.4g t=%.4g" % (i, j, s, t))
            # A vertex resting on the interior of a far edge pinches the
            # region; reject those too.
            if -si <= s <= 1.0 + si and ti < t < 1.0 - ti and (
                    abs(s) <= si or abs(s - 1.0) <= si):
                raise NotWeaklySimple(
                    "vertex of edge %d touches interior of edge %d" % (i, j))
            if -ti <= t <= 1.0 + ti and si < s < 1.0 - si and (
                    abs(t) <= ti or abs(t - 1.0) <= ti):
                raise NotWeaklySimple(
                    "vertex of edge %d touches interior of edge %d" % (j, i))


# ---------------------------------------------------------------------------
# PSLGs

class Face:
    """A face of a PSLG: one or more boundary walks, interior on the left
    of each."""

    __slots__ = ("walks", "is_outer", "walk_edge_segments")

    def __init__(self, walks, is_outer, walk_edge_segments):
        self.walks = walks
        self.is_outer = is_outer
        # Per walk: list of input segment indices (or None for cap edges).
        self.walk_edge_segments = walk_edge_segments


class Pslg:
    """Planar straight line graph with derived face walks."""

    __slots__ = ("vertices", "segments", "faces", "outer_face", "tol")

    def __init__(self, vertices, segments, faces, outer_face, tol):
        self.vertices = vertices
        self.segments = segments
        self.faces = faces
        self.outer_face = outer_face
        self.tol = tol


def build_pslg(vertices, segments, tol=None):
    """Build a PSLG and compute the boundary walks of all its faces.

    Walk edges visiting a vertex or segment twice are duplicated so every
    walk is combinatorially simple; each degree-1 tip becomes a
    zero-length cap edge.
    """
    verts = [(float(x), float(y)) for x, y in vertices]
    if tol is None:
        scale = max(geom.bbox_diagonal(verts), 1e-12) if verts else 1.0
        tol = DEFAULT_TOL.with_scale(scale)

    segs = []
    for a, b in segments:
        if not (0 <= a < len(verts)) or not (0 <= b < len(verts)):
            raise DanglingSegment("segment (%d, %d) out of range" % (a, b))
        if a == b or tol.same_xy(verts[a], verts[b]):
            raise DanglingSegment("segment (%d, %d) has zero length" % (a, b))
        segs.append((a, b))

    _check_planarity(verts, segs, tol)

    # Half edges: (seg_index, forward?) -> directed a->b or b->a.
    out_edges = {i: [] for i in range(len(verts))}
    for k, (a, b) in enumerate(segs):
        out_edges[a].append((k, True))
        out_edges[b].append((k, False))

    def he_src(he):
        k, fwd = he
        return segs[k][0] if fwd else segs[k][1]

    def he_dst(he):
        k, fwd = he
        return segs[k][1] if fwd else segs[k][0]

    def he_angle(he):
        s, d = verts[he_src(he)], verts[he_dst(he)]
        return math.atan2(d[1] - s[1], d[0] - s[0])

    for v in out_edges:
        out_edges[v].sort(key=he_angle)

    # next(he) leaves he's target along the direction clockwise-adjacent
    # to the reversed edge, which traverses faces with interior on the left.
    def next_he(he):
        k, fwd = he
        rev = (k, not fwd)
        ring = out_edges[he_dst(he)]
        i = ring.index(rev)
        return ring[(i - 1) % len(ring)]

    visited = set()
    orbits = []
    for v in sorted(out_edges):
        for he in out_edges[v]:
            if he in visited:
                continue
            orbit = []
            cur = he
            while cur not in visited:
                visited.add(cur)
                orbit.append(cur)
                cur = next_he(cur)
            orbits.append(orbit)

    faces = _group_orbits_into_faces(orbits, verts, he_src, he_dst, tol)
    outer = next(i for i, f in enumerate(faces) if f.is_outer)
    return Pslg(verts, segs, faces, outer, tol)


def _check_planarity(verts, segs, tol):
    eps = 10.0 * tol.length
    for i in range(len(segs)):
        a1, b1 = segs[i]
        p1, p2 = verts[a1], verts[b1]
        l1 = norm2(sub2(p2, p1))
        for j in range(i + 1, len(segs)):
            a2, b2 = segs[j]
            if a1 in (a2, b2) or b1 in (a2, b2):
                continue
            q1, q2 = verts[a2], verts[b2]
            hit = geom.seg_intersect_2d(p1, p2, q1, q2)
            if hit is None:
                # Parallel; overlap would be non-planar input.
                d = unit2(sub2(p2, p1))
                off = cross2(d, sub2(q1, p1))
                if abs(off) <= eps:
                    s1 = dot2(d, sub2(q1, p1))
                    s2 = dot2(d, sub2(q2, p1))
                    lo, hi = min(s1, s2), max(s1, s2)
                    if hi > eps and lo < l1 - eps:
                        raise NonPlanar("segments %d and %d overlap" % (i, j))
                continue
            s, t = hit
            l2 = norm2(sub2(q2, q1))
            si, ti = eps / l1, eps / l2
            if -si < s < 1.0 + si and -ti < t < 1.0 + ti:
                if si < s < 1 - si or ti < t < 1 - ti:
                    raise NonPlanar(
                        "segments %d and %d intersect away from shared "
                        "endpoints" % (i, j))
    # Vertices on segment interiors also break planarity.
    for v, p in enumerate(verts):
        for j, (a, b) in enumerate(segs):
            if v in (a, b):
                continue
            q1, q2 = verts[a], verts[b]
            d = sub2(q2, q1)
            l2 = norm2(d)
            u = (d[0] / l2, d[1] / l2)
            w = sub2(p, q1)
            along = dot2(u, w)
            if eps < along < l2 - eps and abs(cross2(u, w)) <= eps:
                raise NonPlanar("vertex %d lies inside segment %d" % (v, j))


def _group_orbits_into_faces(orbits, verts, he_src, he_dst, tol):
    """Assign each walk orbit to a face: a CCW orbit is the outer boundary
    of a bounded face; CW orbits are inner boundaries of the face that
    immediately encloses them (the unbounded face if none)."""
    infos = []
    for orbit in orbits:
        pts = [verts[he_src(he)] for he in orbit]
        infos.append({"orbit": orbit, "pts": pts, "area": signed_area(pts)})

    def encloses(outer_pts, probe):
        return winding_contains(outer_pts, probe)

    ccw = [i for i, o in enumerate(infos) if o["area"] > 0]
    cw = [i for i, o in enumerate(infos) if o["area"] <= 0]

    face_groups = {i: [i] for i in ccw}
    outer_group = []
    for i in cw:
        # Probe just left of the first walk edge (inside the face).
        he = infos[i]["orbit"][0]
        s, d = verts[he_src(he)], verts[he_dst(he)]
        u = unit2(sub2(d, s))
        eps = 1e-7 * tol.scale
        mid = ((s[0] + d[0]) / 2 - eps * u[1], (s[1] + d[1]) / 2 + eps * u[0])
        best = None
        best_area = math.inf
        for j in ccw:
            if infos[j]["area"] < best_area and encloses(infos[j]["pts"], mid):
                best = j
                best_area = infos[j]["area"]
        if best is None:
            outer_group.append(i)
        else:
            face_groups[best].append(i)

    faces = []
    for key, members in face_groups.items():
        walks, seg_lists = _make_walks([infos[m]["orbit"] for m in members],
                                       verts, he_src, he_dst, tol)
        faces.append(Face(walks, False, seg_lists))
    walks, seg_lists = _make_walks([infos[m]["orbit"] for m in outer_group],
                                   verts, he_src, he_dst, tol)
    faces.append(Face(walks, True, seg_lists))
    return faces


def _make_walks(orbits, verts, he_src, he_dst, tol):
    walks = []
    seg_lists = []
    for orbit in orbits:
        points = []
        virtual_dirs = {}
        seg_ids = []
        m = len(orbit)
        for idx, he in enumerate(orbit):
            p = verts[he_src(he)]
            nxt = orbit[(idx + 1) % m]
            points.append(p)
            seg_ids.append(he[0])
            d_in = unit2(sub2(verts[he_dst(he)], p))
            d_out = unit2(sub2(verts[he_dst(nxt)], verts[he_src(nxt)]))
            if he_dst(he) == he_src(nxt) and _is_reversal(d_in, d_out):
                # Degree-1 tip (or sharp turn): insert the cap edge.
                points.append(verts[he_dst(he)])
                virtual_dirs[len(points) - 1] = (d_in[1], -d_in[0])
                seg_ids.append(None)
        walks.append(BoundaryWalk(points, virtual_dirs, tol))
        seg_lists.append(seg_ids)
    return walks, seg_lists


# ---------------------------------------------------------------------------
# chains

class Chain:
    """A contiguous run of walk edges, identified by edge ids, used by the
    divide-and-conquer drivers.  ``weights`` lets PSLG cells split by slab
    multiplicity instead of edge count."""

    __slots__ = ("edge_ids", "weights")

    def __init__(self, edge_ids, weights=None):
        if not edge_ids:
            raise ChainTooShort("empty chain")
        self.edge_ids = list(edge_ids)
        self.weights = list(weights) if weights is not None else None

    def __len__(self):
        return len(self.edge_ids)


def split_chain(chain):
    """Split into two subchains sharing one gluing position.

    Without weights the split is at the midpoint (sizes differ by at most
    one).  With weights, edges with equal consecutive weight keys stay
    together and the split balances total edge counts across groups.
    """
    n = len(chain.edge_ids)
    if n < 2:
        raise ChainTooShort("cannot split a chain of %d edge(s)" % n)
    if chain.weights is None:
        k = n // 2
        return Chain(chain.edge_ids[:k]), Chain(chain.edge_ids[k:])

    # Group consecutive edges sharing a weight key (slab id).
    groups = []
    start = 0
    for i in range(1, n):
        if chain.weights[i] != chain.weights[i - 1]:
            groups.append((start, i))
            start = i
    groups.append((start, n))
    if len(groups) < 2:
        raise ChainTooShort("all edges share one slab; cannot split")
    best, best_diff = None, None
    for g in range(1, len(groups)):
        cut = groups[g][0]
        diff = abs(cut - (n - cut))
        if best is None or diff < best_diff:
            best, best_diff = cut, diff
    return (Chain(chain.edge_ids[:best], chain.weights[:best]),
            Chain(chain.edge_ids[best:], chain.weights[best:]))
