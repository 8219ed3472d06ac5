"""Partial roofs: intrinsic piecewise-linear disks stored as half-edge
surfaces, one face per slab of a boundary chain.

The mesh is a topological disk.  Boundary edges have ``twin = None``; all
other edges are glued pairs.  Vertices carry their canonical world
position (or a unit direction for points at infinity); per-face local
coordinates are derived through the face's slab frame on demand, so the
surface stays intrinsically consistent even when its realization
self-intersects.

Edge kinds:
  BASE      defining chain edges (z=0 base edges, or lifted defining edges)
  MOTO      lifted motorcycle track pieces on a slab border
  SLOPE     rays/risers along the slab's slope vector
  CAP       cell-mode cap along a lifted subdivision line
  ATINF     combinatorial filler between two distinct infinite vertices
  INTERIOR  face/face intersection edges created by merging
"""

import math

from . import geom

BASE = "base"
MOTO = "moto"
SLOPE = "slope"
CAP = "cap"
ATINF = "atinf"
INTERIOR = "interior"

INF = math.inf


class Vertex:
    __slots__ = ("point", "inf_dir", "he")

    def __init__(self, point=None, inf_dir=None):
        self.point = point
        self.inf_dir = inf_dir
        self.he = None

    @property
    def is_infinite(self):
        return self.inf_dir is not None

    def __repr__(self):
        if self.is_infinite:
            return "V(inf %s)" % (tuple(round(c, 3) for c in self.inf_dir),)
        return "V%s" % (tuple(round(c, 4) for c in self.point),)


class HalfEdge:
    __slots__ = ("origin", "twin", "nxt", "prv", "face", "kind", "moto_id")

    def __init__(self, origin, face=None, kind=INTERIOR, moto_id=None):
        self.origin = origin
        self.twin = None
        self.nxt = None
        self.prv = None
        self.face = face
        self.kind = kind
        self.moto_id = moto_id

    @property
    def head(self):
        return self.nxt.origin

    def __repr__(self):
        head = self.nxt.origin if self.nxt else None
        return "HE(%r->%r %s)" % (self.origin, head, self.kind)


class Face:
    __slots__ = ("slab", "he", "mark", "shoot_cache")

    def __init__(self, slab):
        self.slab = slab
        self.he = None
        self.mark = 0
        self.shoot_cache = None

    def cycle(self):
        out = []
        e = self.he
        while True:
            out.append(e)
            e = e.nxt
            if e is self.he:
                return out

    def __repr__(self):
        return "Face(slab %s)" % (self.slab.gid,)


def close_cycle(hes):
    n = len(hes)
    for i in range(n):
        hes[i].nxt = hes[(i + 1) % n]
        hes[(i + 1) % n].prv = hes[i]


def next_boundary(he):
    """Next boundary half-edge along the surface boundary after ``he``
    (rotate around the head vertex through glued edges)."""
    e = he.nxt
    guard = 0
    while e.twin is not None:
        e = e.twin.nxt
        guard += 1
        if guard > 1000000:
            raise RuntimeError("boundary walk stuck; mesh corrupt")
    return e


def out_edges(vertex):
    """Half edges leaving a vertex in rotational order, spanning both
    directions up to boundary gaps (or the full cycle)."""
    start = vertex.he
    if start is None:
        return []
    out = [start]
    e = start.prv.twin
    while e is not None and e is not start:
        out.append(e)
        e = e.prv.twin
    if e is start:
        return out
    e = start.twin.nxt if start.twin is not None else None
    while e is not None and e is not start:
        out.insert(0, e)
        e = e.twin.nxt if e.twin is not None else None
    return out


class PartialRoof:
    """One face per chain edge, glued along interior edges; a disk."""

    __slots__ = ("faces", "chain_gids", "face_by_gid", "start_vertex",
                 "end_vertex", "tol")

    def __init__(self, faces, chain_gids, face_by_gid, start_vertex,
                 end_vertex, tol):
        self.faces = faces
        self.chain_gids = chain_gids
        self.face_by_gid = face_by_gid
        self.start_vertex = start_vertex
        self.end_vertex = end_vertex
        self.tol = tol

    def half_edges(self):
        seen = set()
        out = []
        for f in self.faces:
            for e in f.cycle():
                if id(e) not in seen:
                    seen.add(id(e))
                    out.append(e)
        return out

    def vertices(self):
        seen = {}
        for e in self.half_edges():
            seen.setdefault(id(e.origin), e.origin)
        return list(seen.values())

    def boundary_half_edges(self):
        return [e for e in self.half_edges() if e.twin is None]

    def boundary_loop(self):
        boundary = self.boundary_half_edges()
        if not boundary:
            return []
        start = boundary[0]
        loop = []
        e = start
        while True:
            loop.append(e)
            e = next_boundary(e)
            if e is start:
                break
            if len(loop) > len(boundary) + 4:
                raise RuntimeError("boundary loop does not close")
        return loop

    def end_face(self):
        return self.face_by_gid[self.chain_gids[-1]]

    def start_face(self):
        return self.face_by_gid[self.chain_gids[0]]

    def stats(self):
        hes = self.half_edges()
        n_b = sum(1 for e in hes if e.twin is None)
        n_i = sum(1 for e in hes if e.twin is not None)
        return {
            "V": len(self.vertices()),
            "E": n_b + n_i // 2,
            "F": len(self.faces),
            "boundary_len": n_b,
        }


# ---------------------------------------------------------------------------
# construction

def initial_roof(slab):
    """The slab itself as a one-face partial roof (the base case of the
    divide and conquer)."""
    tol = slab.tol
    f = Face(slab)
    frame = slab.frame
    pieces = slab.lower
    left_open = math.isinf(pieces[0].a0)
    right_open = math.isinf(pieces[-1].a1)

    # Finite lower-chain vertices, left to right.
    low_pts = []
    if not left_open:
        low_pts.append((pieces[0].a0, pieces[0].b_at(pieces[0].a0)))
    for p in pieces:
        if not math.isinf(p.a1):
            low_pts.append((p.a1, p.b_at(p.a1)))
    low_vs = [Vertex(point=frame.world(a, b)) for (a, b) in low_pts]

    def inf_vertex(local_dir):
        return Vertex(inf_dir=geom.unit3(frame.world_dir(*local_dir)))

    if left_open:
        v_left = inf_vertex((-1.0, -pieces[0].slope))
    else:
        v_left = inf_vertex((0.0, 1.0))
    if right_open:
        v_right = inf_vertex((1.0, pieces[-1].slope))
    else:
        v_right = inf_vertex((0.0, 1.0))
    same_top = geom.norm3(geom.sub3(v_left.inf_dir, v_right.inf_dir)) <= 1e-9
    if same_top:
        v_right = v_left

    def kind_of(p):
        if p.kind == "base":
            return (BASE, None)
        return (MOTO, p.moto.mid)

    ring = []   # (origin vertex, kind, moto_id); heads implicit (cyclic)
    idx = 0
    for p in pieces:
        if math.isinf(p.a0):
            origin = v_left
        else:
            origin = low_vs[idx]
            idx += 1
        k, mid = kind_of(p)
        ring.append((origin, k, mid))
    if not right_open:
        ring.append((low_vs[idx], SLOPE, None))
    if v_right is not v_left:
        ring.append((v_right, ATINF, None))
    if not left_open:
        ring.append((v_left, SLOPE, None))

    # Zero-length base edge: split the chain-junction vertex in two so the
    # defining chain has an actual (degenerate) edge.
    start_v = end_v = None
    if slab.is_zero:
        j = None
        for i, (v, k, mid) in enumerate(ring):
            if not v.is_infinite:
                a, b = frame.local(v.point)
                if abs(a) <= 10 * tol.length and abs(b) <= 10 * tol.length:
                    j = i
                    break
        if j is None:
            raise RuntimeError("zero-length slab has no junction vertex")
        v_b = ring[j][0]
        v_a = Vertex(point=v_b.point)
        # Edge j-1 ends at the junction: redirect to v_a, then insert the
        # zero-length base edge v_a -> v_b before entry j.
        ring.insert(j, (v_a, BASE, None))
        start_v, end_v = v_a, v_b
    else:
        # Base piece endpoints: local (0, 0) and (base_len, 0).
        for v in low_vs:
            a, b = frame.local(v.point)
            if abs(b) <= 10 * tol.length:
                if abs(a) <= 10 * tol.length:
                    start_v = v
                elif abs(a - slab.base_len) <= 10 * tol.length:
                    end_v = v
        if start_v is None or end_v is None:
            raise RuntimeError("slab %d lower chain misses base endpoints"
                               % slab.gid)

    hes = [HalfEdge(v, f, k, mid) for (v, k, mid) in ring]
    close_cycle(hes)
    f.he = hes[0]
    for e in hes:
        if e.origin.he is None:
            e.origin.he = e
    return PartialRoof([f], [slab.gid], {slab.gid: f}, start_v, end_v, tol)


# ---------------------------------------------------------------------------
# geometry helpers on faces

def he_local_geometry(he, frame):
    """Local (a, b) geometry of a half edge in a face's frame.

    Returns ("seg", p0, p1), ("ray", anchor, dir), or ("atinf",).
    Rays always point away from their finite anchor.
    """
    v0, v1 = he.origin, he.nxt.origin
    if v0.is_infinite and v1.is_infinite:
        return ("atinf",)
    if v0.is_infinite:
        anchor = frame.local(v1.point)
        d = frame.local_dir(v0.inf_dir)
        return ("ray", anchor, d)
    if v1.is_infinite:
        anchor = frame.local(v0.point)
        d = frame.local_dir(v1.inf_dir)
        return ("ray", anchor, d)
    return ("seg", frame.local(v0.point), frame.local(v1.point))


def face_contains_local(face, a, b, eps):
    """Point-in-face test in local coordinates by ray parity with a
    skewed probe ray (retried when it grazes a vertex); points on the
    boundary are not reliable and should be caught by the caller."""
    elems = []
    for he in face.cycle():
        g = he_local_geometry(he, face.slab.frame)
        if g[0] != "atinf":
            elems.append(g)
    for (wx, wy) in ((1.0, 0.017839), (0.7421, 1.0), (1.0, -0.40571)):
        crossings = 0
        clean = True
        for g in elems:
            if g[0] == "seg":
                (x0, y0), (x1, y1) = g[1], g[2]
                ex, ey = x1 - x0, y1 - y0
                smax = 1.0
            else:
                (x0, y0) = g[1]
                ex, ey = g[2]
                smax = math.inf
            den = wx * ey - wy * ex
            if abs(den) <= 1e-14 * max(abs(ex), abs(ey), 1.0):
                continue
            dx0, dy0 = x0 - a, y0 - b
            t = (dx0 * ey - dy0 * ex) / den
            s = (dx0 * wy - dy0 * wx) / den
            if t <= 0:
                continue
            margin = 1e-9 * max(abs(ex), abs(ey), 1.0) / abs(den) + 1e-12
            if -margin < s < margin or (smax - margin < s < smax + margin):
                clean = False
                break
            if 0.0 < s < smax:
                crossings += 1
        if clean:
            return crossings % 2 == 1
    return crossings % 2 == 1


# ---------------------------------------------------------------------------
# validation

def validate(roof, check_geometry=True):
    """Structural invariants; returns a list of violation strings."""
    bad = []
    hes = roof.half_edges()
    # link consistency
    for e in hes:
        if e.nxt.prv is not e or e.prv.nxt is not e:
            bad.append("broken next/prev links")
            break
        if e.twin is not None and e.twin.twin is not e:
            bad.append("broken twin link")
            break
    st = roof.stats()
    if st["V"] - st["E"] + st["F"] != 1:
        bad.append("Euler characteristic %d != 1" %
                   (st["V"] - st["E"] + st["F"]))
    try:
        loop = roof.boundary_loop()
        if len(loop) != st["boundary_len"]:
            bad.append("boundary is not a single cycle (%d of %d edges)" %
                       (len(loop), st["boundary_len"]))
    except RuntimeError as exc:
        bad.append(str(exc))
        loop = []

    if set(roof.face_by_gid) != set(roof.chain_gids):
        bad.append("face/chain gid mismatch")
    for gid, f in roof.face_by_gid.items():
        if f.slab.gid != gid:
            bad.append("face of gid %s built on slab %s" % (gid, f.slab.gid))

    # interior edges form a forest
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    seen = set()
    for e in hes:
        if e.twin is None or id(e) in seen or id(e.twin) in seen:
            continue
        seen.add(id(e))
        a, b = find(id(e.origin)), find(id(e.nxt.origin))
        if a == b:
            bad.append("interior edges contain a cycle")
            break
        parent[a] = b

    if check_geometry:
        tol = roof.tol
        for f in roof.faces:
            frame = f.slab.frame
            for e in f.cycle():
                for v in (e.origin,):
                    if v.is_infinite:
                        continue
                    off = geom.dot3(geom.sub3(v.point, frame.origin), frame.N)
                    if abs(off) > 1e4 * tol.length:
                        bad.append("vertex off supporting plane of slab %s "
                                   "by %.3g" % (f.slab.gid, off))
                        break
        # interior edges realize on both supporting planes
        for e in hes:
            if e.twin is None or e.kind == ATINF:
                continue
            f1, f2 = e.face, e.twin.face
            for v in (e.origin, e.nxt.origin):
                if v.is_infinite:
                    continue
                for f in (f1, f2):
                    off = geom.dot3(geom.sub3(v.point, f.slab.frame.origin),
                                    f.slab.frame.N)
                    if abs(off) > 1e4 * roof.tol.length:
                        bad.append("interior edge off plane of slab %s" %
                                   f.slab.gid)
                        break
    # face monotonicity: boundary splits into one lower and one upper chain
    for f in roof.faces:
        if not _face_is_monotone(f, roof.tol):
            bad.append("face of slab %s is not base-monotone" % f.slab.gid)
    return bad


def _face_is_monotone(face, tol):
    """The face cycle, read in local coordinates, must change horizontal
    direction at most twice (one left run, one right run), ignoring
    vertical edges and the filler at infinity."""
    frame = face.slab.frame
    eps = 10 * tol.length
    signs = []
    for he in face.cycle():
        g = he_local_geometry(he, frame)
        if g[0] == "atinf":
            continue
        if g[0] == "ray":
            d = g[2]
            if he.origin.is_infinite:
                d = (-d[0], -d[1])
            da = d[0]
        else:
            da = g[2][0] - g[1][0]
            if abs(da) <= eps:
                continue
        if abs(da) <= 1e-12:
            continue
        s = 1 if da > 0 else -1
        if not signs or signs[-1] != s:
            signs.append(s)
    if len(signs) > 2 and signs[0] == signs[-1]:
        signs = signs[1:]
    return len(signs) <= 2


def complexity_stats(roof):
    st = roof.stats()
    st["chain_len"] = len(roof.chain_gids)
    return st
