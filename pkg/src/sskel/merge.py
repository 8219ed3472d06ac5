"""Merging partial roofs along a locally-computed splicing path.

The walk starts at the gluing vertex shared by the two defining chains and
advances along the intersection of the current pair of faces, one per
surface.  It stops on surface boundaries, face revisits, monotonicity
breaks, valley/track mismatches, and coplanar ambiguity.  The surfaces are
then cut along the walked path (completing the last face with a riser
along the slope vector where needed), the side away from the defining
chain is discarded, the two surfaces are glued along the path, and exposed
interior edges are swept back up the slope (fringe simplification).

Everything is intrinsic: ray shooting happens in each face's own local
coordinates; only path endpoints are reconciled in world coordinates.
"""

import math

from . import geom
from . import roof as roofmod
from .roof import (BASE, MOTO, SLOPE, CAP, ATINF, INTERIOR, Vertex, HalfEdge,
                   Face, PartialRoof, he_local_geometry, out_edges)
from .counters import COUNTER
from .errors import (NoInitialIntersection, DefiningChainCut, ChainMismatch,
                     DisconnectedViolation)

INF = math.inf
TWO_PI = 2 * math.pi

BOUNDARY_HIT = "BoundaryHit"
FACE_REVISIT = "FaceRevisit"
MONOTONE_STOP = "MonotonicityStop"
VALLEY_STOP = "ValleyMismatchStop"
COPLANAR_STOP = "CoplanarStop"
ESCAPE_STOP = "EscapeStop"
FAN_STOP = "FanStop"

SLAB_BORDER_KINDS = (BASE, MOTO, CAP)

_merge_serial = [0]


class FaceTraversal:
    __slots__ = ("face", "entry_vertex", "pts", "exit_vertex", "end_pt",
                 "completed")

    def __init__(self, face, entry_vertex):
        self.face = face
        self.entry_vertex = entry_vertex
        self.pts = []
        self.exit_vertex = None
        self.end_pt = None
        self.completed = False   # riser appended at the end

    def __repr__(self):
        return "FaceTraversal(%r, %d pts)" % (self.face, len(self.pts))


class SideState:
    __slots__ = ("surf", "face", "records", "marks", "a_dir", "side",
                 "serial")

    def __init__(self, surf, face, side, serial):
        self.surf = surf
        self.face = face
        self.records = []
        self.marks = set()
        self.a_dir = {}
        self.side = side
        self.serial = serial

    def begin(self, face, entry_vertex):
        self.face = face
        self.marks.add(id(face))
        self.records.append(FaceTraversal(face, entry_vertex))

    @property
    def record(self):
        return self.records[-1]


class SplicingPath:
    __slots__ = ("points", "cause", "edges")

    def __init__(self):
        self.points = []
        self.edges = 0
        self.cause = None


# ---------------------------------------------------------------------------
# face-local ray shooting

def _face_elems(face, serial):
    cache = face.shoot_cache
    if cache is not None and cache[0] == serial:
        return cache[1]
    frame = face.slab.frame
    elems = []
    for he in face.cycle():
        elems.append((he, he_local_geometry(he, frame)))
    face.shoot_cache = (serial, elems)
    COUNTER.trapezoids += len(elems)
    return elems


def ray_exit(face, p3, d3, tol, serial, avoid_point=None):
    """First boundary crossing of p3 + t*d3 within the face.  Returns
    (t, kind, he, q3, vertex) with kind in {"edge", "vertex"} or
    (inf, None, None, None, None) when the ray escapes."""
    frame = face.slab.frame
    a0, b0 = frame.local(p3)
    da, db = frame.local_dir(d3)
    eps = 10.0 * tol.length
    best = (INF, None, None, None, None)
    for (he, g) in _face_elems(face, serial):
        COUNTER.steps += 1
        if g[0] == "atinf":
            continue
        if g[0] == "seg":
            (x0, y0), (x1, y1) = g[1], g[2]
            ex, ey = x1 - x0, y1 - y0
        else:
            (x0, y0) = g[1]
            ex, ey = g[2]
        den = da * ey - db * ex
        # Nearly parallel elements (e.g. the ray running along a track
        # edge) produce garbage intersection parameters; skip them.  The
        # shooting direction is unit length in local coordinates.
        if abs(den) <= 1e-9 * math.hypot(ex, ey):
            continue
        wx, wy = x0 - a0, y0 - b0
        t = (wx * ey - wy * ex) / den
        if t <= 1e-12 or t >= best[0]:
            continue
        s = (wx * db - wy * da) / den
        if g[0] == "seg":
            elen = math.hypot(ex, ey)
            if elen <= 0.0:
                continue
            tol_s = eps / elen
            if s < -tol_s or s > 1.0 + tol_s:
                continue
        else:
            if s < -eps:
                continue
        qa, qb = a0 + t * da, b0 + t * db
        q3 = frame.world(qa, qb)
        if avoid_point is not None and _same_pt(q3, avoid_point, eps):
            continue
        vertex = None
        v0, v1 = he.origin, he.nxt.origin
        if not v0.is_infinite and _same_pt(q3, v0.point, eps):
            vertex, q3 = v0, v0.point
        elif not v1.is_infinite and _same_pt(q3, v1.point, eps):
            vertex, q3 = v1, v1.point
        best = (t, "vertex" if vertex is not None else "edge", he, q3, vertex)
    return best


def _same_pt(p, q, eps):
    return (abs(p[0] - q[0]) <= eps and abs(p[1] - q[1]) <= eps
            and abs(p[2] - q[2]) <= eps)


def locate_in_face(face, p3, tol):
    """("vertex", v) | ("edge", he) | ("interior",) for a point in the
    closure of the face."""
    eps = 10.0 * tol.length
    cyc = face.cycle()
    for he in cyc:
        v = he.origin
        if not v.is_infinite and _same_pt(v.point, p3, eps):
            return ("vertex", v)
    frame = face.slab.frame
    pa, pb = frame.local(p3)
    for he in cyc:
        g = he_local_geometry(he, frame)
        if g[0] == "atinf":
            continue
        if g[0] == "seg":
            (x0, y0), (x1, y1) = g[1], g[2]
            ex, ey = x1 - x0, y1 - y0
            ll = math.hypot(ex, ey)
            if ll <= 1e-300:
                continue
            s = ((pa - x0) * ex + (pb - y0) * ey) / (ll * ll)
            if s < -1e-9 or s > 1.0 + 1e-9:
                continue
        else:
            (x0, y0) = g[1]
            ex, ey = g[2]
            ll = math.hypot(ex, ey)
            s = ((pa - x0) * ex + (pb - y0) * ey) / (ll * ll)
            if s < -1e-9:
                continue
        dist = abs((pa - x0) * ey - (pb - y0) * ex) / ll
        if dist <= eps:
            return ("edge", he)
    return ("interior",)


# ---------------------------------------------------------------------------
# direction selection and stopping conditions

def _plane_dir(f1, f2):
    return geom.plane_intersection_dir(f1.slab.frame, f2.slab.frame)


def _shared_track(f1, f2):
    gids = {f1.slab.gid, f2.slab.gid}
    for m in f1.slab.motos:
        if {m.edge_a, m.edge_b} == gids:
            return m
    return None


def _tracks_at(f1, f2, q3, tol):
    """Motorcycles shared by both slabs whose lifted track passes through
    q3 (crash-chained tracks make several possible)."""
    gids = {f1.slab.gid, f2.slab.gid}
    out = []
    for m in f1.slab.motos:
        if {m.edge_a, m.edge_b} == gids and _point_on_track(q3, m, tol):
            out.append(m)
    return out


def _point_on_track(p3, moto, tol):
    t = p3[2]
    eps = 100 * tol.length
    hi = moto.crash_time if moto.crash_time is not None else INF
    if not (moto.launch_time - eps <= t <= hi + eps):
        return False
    pos = moto.position(t)
    return abs(pos[0] - p3[0]) <= eps and abs(pos[1] - p3[1]) <= eps


def _segment_on_shared_track(p3, q3, f1, f2, tol):
    for m in _tracks_at(f1, f2, p3, tol):
        if _point_on_track(q3, m, tol):
            return m
    return None


def _dir_on_shared_track(p3, d, f1, f2, tol):
    """Leaving p3 along d runs on a lifted track shared by both slabs
    (in either direction along the track)."""
    eps_t = 100 * tol.length
    for m in _tracks_at(f1, f2, p3, tol):
        v3 = (m.velocity[0], m.velocity[1], 1.0)
        nv = geom.norm3(v3)
        if geom.norm3(geom.cross3(d, v3)) > 1e-7 * nv:
            continue
        t_here = p3[2]
        hi = m.crash_time if m.crash_time is not None else INF
        if geom.dot3(d, v3) > 0:
            if t_here < hi - eps_t:
                return True
        else:
            if t_here > m.launch_time + eps_t:
                return True
    return False


def _grad_z(frame):
    n = frame.N
    return (-n[0] / n[2], -n[1] / n[2])


def classify_crease(d3, fL, fR):
    """"valley" | "ridge" | "flat" for a crease along d3 with face fL kept
    on the left of travel and fR on the right."""
    dx, dy = d3[0], d3[1]
    nn = math.hypot(dx, dy)
    if nn <= 1e-15:
        return "flat"
    lx, ly = -dy / nn, dx / nn
    gl = _grad_z(fL.slab.frame)
    gr = _grad_z(fR.slab.frame)
    s_left = gl[0] * lx + gl[1] * ly
    s_right = -(gr[0] * lx + gr[1] * ly)
    if s_left > 1e-9 and s_right > 1e-9:
        return "valley"
    if s_left < -1e-9 and s_right < -1e-9:
        return "ridge"
    return "flat"


def _check_candidate(p, d, s1, s2, tol, first=False):
    """Stopping conditions for the next path edge leaving p along d."""
    f1, f2 = s1.face, s2.face
    coplanar = geom.planes_coplanar(f1.slab.frame, f2.slab.frame, tol)
    on_track = _dir_on_shared_track(p, d, f1, f2, tol)
    if coplanar and not on_track and not first:
        return False, COPLANAR_STOP
    fL, fR = (f1, f2) if s1.side == 1 else (f2, f1)
    crease = classify_crease(d, fL, fR)
    if crease == "valley" and not on_track:
        return False, VALLEY_STOP
    if crease == "ridge" and on_track:
        return False, VALLEY_STOP
    # Motorcycle edges do not take part in a face's upper monotone chain,
    # so on-track segments neither set nor break the direction.
    if not on_track:
        for ss in (s1, s2):
            E = ss.face.slab.frame.E
            da = d[0] * E[0] + d[1] * E[1] + d[2] * E[2]
            est = ss.a_dir.get(id(ss.face))
            if est is not None and abs(da) > 1e-9 and da * est < 0:
                return False, MONOTONE_STOP
    return True, None


def _commit_direction(p, q, s1, s2, tol):
    if _segment_on_shared_track(p, q, s1.face, s2.face, tol) is not None:
        return
    for ss in (s1, s2):
        E = ss.face.slab.frame.E
        da = (q[0] - p[0]) * E[0] + (q[1] - p[1]) * E[1] + \
            (q[2] - p[2]) * E[2]
        if abs(da) > 1e-9 and id(ss.face) not in ss.a_dir:
            ss.a_dir[id(ss.face)] = 1 if da > 0 else -1


def _inward_of(face, he_in_face):
    """In-plane normal of a boundary half-edge pointing into its face."""
    d_e = _he_dir(he_in_face)
    n = face.slab.frame.N
    return geom.cross3(n, d_e)


def _next_direction(q3, d_old, f1, f2, tol, entered=()):
    """Continuation along the new face pair.  ``entered`` lists
    (face, half_edge_in_that_face) for faces just crossed into; the
    direction must point across those edges into their faces."""
    if geom.planes_coplanar(f1.slab.frame, f2.slab.frame, tol):
        for m in _tracks_at(f1, f2, q3, tol):
            v = geom.unit3((m.velocity[0], m.velocity[1], 1.0))
            if geom.dot3(v, d_old) >= -1e-9:
                return v
        return None
    d = _plane_dir(f1, f2)
    if d is None:
        return None
    if entered:
        face, he = entered[0]
        inward = _inward_of(face, he)
        s = geom.dot3(d, inward)
        if abs(s) <= 1e-12:
            return None
        if s < 0:
            d = (-d[0], -d[1], -d[2])
        for (face2, he2) in entered[1:]:
            if geom.dot3(d, _inward_of(face2, he2)) < -1e-9:
                return None
        return d
    if geom.dot3(d, d_old) < 0:
        d = (-d[0], -d[1], -d[2])
    return d


def _initial_direction(p, f1, f2, tol):
    if geom.planes_coplanar(f1.slab.frame, f2.slab.frame, tol):
        return f1.slab.frame.S
    d = _plane_dir(f1, f2)
    if d is None:
        return None
    if d[2] < 0 or (abs(d[2]) <= 1e-12 and
                    geom.dot3(d, f1.slab.frame.S) < 0):
        d = (-d[0], -d[1], -d[2])
    return d


def _side_check_on_exit(ss, exit_vertex, tol):
    """The defining chain of the face just exited must lie on ss.side of
    the directed path: walk the cycle from the exit corner back to the
    entry corner; meeting a BASE edge there means the kept part is left."""
    rec = ss.record
    f = rec.face
    entry = rec.entry_vertex
    start = None
    for he in f.cycle():
        if he.origin is exit_vertex:
            start = he
            break
    if start is None or entry is None:
        return True
    base_after_exit = False
    e = start
    guard = 0
    while e.origin is not entry:
        if e.kind == BASE:
            base_after_exit = True
            break
        e = e.nxt
        guard += 1
        if guard > 200000:
            return True
    side = 1 if base_after_exit else -1
    return side == ss.side


def _vertex_on_defining_chain(v):
    for e in out_edges(v):
        if e.kind == BASE or e.prv.kind == BASE:
            return True
    return False


# ---------------------------------------------------------------------------
# the walk

def splicing_walk(r1, r2, tol):
    _merge_serial[0] += 1
    serial = _merge_serial[0]
    vhat1, vhat2 = r1.end_vertex, r2.start_vertex
    if not tol.same_xyz(vhat1.point, vhat2.point):
        raise ChainMismatch("gluing vertices disagree: %r vs %r"
                            % (vhat1.point, vhat2.point))
    f1, f2 = r1.end_face(), r2.start_face()
    s1 = SideState(r1, f1, 1, serial)
    s2 = SideState(r2, f2, -1, serial)
    path = SplicingPath()
    p = vhat1.point
    path.points.append(p)

    d = _initial_direction(p, f1, f2, tol)
    if d is None:
        raise NoInitialIntersection("faces at the gluing vertex do not meet")
    s1.begin(f1, vhat1)
    s2.begin(f2, vhat2)
    ok, cause = _check_candidate(p, d, s1, s2, tol, first=True)
    if not ok:
        raise NoInitialIntersection("first path edge rejected: %s" % cause)

    guard = 8 * (len(r1.faces) + len(r2.faces)) + 64
    steps = 0
    while True:
        steps += 1
        if steps > guard:
            raise RuntimeError("splicing walk did not terminate")
        h1 = ray_exit(s1.face, p, d, tol, serial, avoid_point=p)
        h2 = ray_exit(s2.face, p, d, tol, serial, avoid_point=p)
        t1, t2 = h1[0], h2[0]
        if math.isinf(t1) and math.isinf(t2):
            _stop_mid(s1, p)
            _stop_mid(s2, p)
            path.cause = ESCAPE_STOP
            return path, s1, s2
        eps = 10 * tol.length
        q3 = h1[3] if t1 <= t2 else h2[3]
        hit1 = h1[1] is not None and t1 <= t2 + eps
        hit2 = h2[1] is not None and t2 <= t1 + eps
        # A side without a hit must still contain the landing point; the
        # candidate edge is discarded otherwise (conservative stop).
        off_surface = False
        for ss, hit in ((s1, hit1), (s2, hit2)):
            if hit:
                continue
            where = locate_in_face(ss.face, q3, tol)
            if where[0] == "interior":
                frame = ss.face.slab.frame
                qa, qb = frame.local(q3)
                if not roofmod.face_contains_local(ss.face, qa, qb,
                                                   10 * tol.length):
                    off_surface = True
        if off_surface:
            _stop_mid(s1, p)
            _stop_mid(s2, p)
            path.cause = FAN_STOP
            return path, s1, s2
        path.points.append(q3)
        path.edges += 1
        COUNTER.path_edges += 1
        _commit_direction(p, q3, s1, s2, tol)

        ended, result = _resolve_hits(p, q3, d, s1, s2,
                                      (h1 if hit1 else None),
                                      (h2 if hit2 else None), tol, serial)
        if ended:
            path.cause = result
            return path, s1, s2
        p, d = result


def _stop_mid(ss, q3):
    rec = ss.record
    if rec.exit_vertex is not None:
        return
    # The stop point may already sit at the end of pts (stops decided
    # after the records advanced); keep it only once.
    if rec.pts and _same_pt(rec.pts[-1], q3, 1e-7):
        rec.pts.pop()
    if rec.entry_vertex is not None and not rec.pts and \
            rec.entry_vertex.point is not None and \
            _same_pt(rec.entry_vertex.point, q3, 1e-7):
        ss.records.pop()
        return
    rec.end_pt = q3


def _stop_at_vertex(ss, v):
    rec = ss.record
    if rec.entry_vertex is v and not rec.pts:
        ss.records.pop()
        return
    rec.exit_vertex = v


def _resolve_hits(p, q3, d, s1, s2, h1, h2, tol, serial):
    """Handle the hit(s) at q3; either terminate (True, cause) or continue
    with (False, (q3, d_new))."""
    # Materialize crossing vertices; classify locations.  A side with no
    # transversal hit may still sit on its face boundary (the ray grazing
    # along an edge); upgrade those to vertex locations too.
    locs = {}
    for ss, h in ((s1, h1), (s2, h2)):
        if h is None:
            where = locate_in_face(ss.face, q3, tol)
            if where[0] == "vertex":
                locs[id(ss)] = ("vertex", where[1])
            elif where[0] == "edge":
                locs[id(ss)] = ("vertex", split_edge(where[1], q3))
            else:
                locs[id(ss)] = ("mid",)
            continue
        t, kind, he, _, v = h
        if kind == "vertex":
            locs[id(ss)] = ("vertex", v)
        elif he.twin is None:
            v = split_edge(he, q3)
            locs[id(ss)] = ("bedge", v)
        else:
            v = split_edge(he, q3)
            locs[id(ss)] = ("edge", v, he)

    # Hard ending: the path lands on the defining chain (the closing
    # corner of a cyclic merge).  Boundary-edge hits go through the fan:
    # a shared motorcycle edge is a turn onto the valley, anything else
    # stops there for lack of candidates.
    hard_end = False
    for ss in (s1, s2):
        loc = locs[id(ss)]
        if loc[0] in ("vertex", "bedge") and \
                _vertex_on_defining_chain(loc[1]):
            hard_end = True
    if hard_end:
        for ss in (s1, s2):
            loc = locs[id(ss)]
            if loc[0] in ("bedge", "edge", "vertex"):
                _stop_at_vertex(ss, loc[1])
            else:
                _stop_mid(ss, q3)
        return True, BOUNDARY_HIT

    if any(locs[id(ss)][0] in ("vertex", "bedge") for ss in (s1, s2)):
        return _fan_advance(p, q3, d, s1, s2, locs, tol, serial)

    # Plain transversal crossings.
    for ss in (s1, s2):
        loc = locs[id(ss)]
        if loc[0] != "edge":
            continue
        vq, he = loc[1], loc[2]
        nf = he.twin.face
        if id(nf) in ss.marks:
            _terminate_all(s1, s2, locs, q3)
            return True, FACE_REVISIT
        if not _side_check_on_exit(ss, vq, tol):
            _terminate_all(s1, s2, locs, q3)
            return True, MONOTONE_STOP
    entered = []
    for ss in (s1, s2):
        loc = locs[id(ss)]
        if loc[0] == "edge":
            vq, he = loc[1], loc[2]
            ss.record.exit_vertex = vq
            ss.begin(he.twin.face, vq)
            entered.append((he.twin.face, he.twin))
        else:
            ss.record.pts.append(q3)

    d_new = _next_direction(q3, d, s1.face, s2.face, tol, entered)
    if d_new is None:
        _terminate_all(s1, s2, locs, q3, after_advance=True)
        return True, COPLANAR_STOP
    ok, cause = _check_candidate(q3, d_new, s1, s2, tol)
    if not ok:
        _terminate_all(s1, s2, locs, q3, after_advance=True)
        return True, cause
    return False, (q3, d_new)


def _terminate_all(s1, s2, locs, q3, after_advance=False):
    for ss in (s1, s2):
        loc = locs[id(ss)]
        rec = ss.record
        if rec.exit_vertex is not None and not after_advance:
            continue
        if after_advance:
            # Records were already advanced into the new faces; those
            # zero-length tails collapse.
            if loc[0] == "edge":
                _stop_at_vertex(ss, loc[1])
                continue
        if loc[0] in ("edge", "vertex", "bedge"):
            _stop_at_vertex(ss, loc[1])
        else:
            _stop_mid(ss, q3)


# ---------------------------------------------------------------------------
# fan resolution

def _he_dir(he):
    v0, v1 = he.origin, he.nxt.origin
    if v0.is_infinite:
        d = v0.inf_dir
        return (-d[0], -d[1], -d[2])
    if v1.is_infinite:
        return v1.inf_dir
    d = geom.sub3(v1.point, v0.point)
    n = geom.norm3(d)
    if n <= 1e-300:
        return (1.0, 0.0, 0.0)
    return (d[0] / n, d[1] / n, d[2] / n)


def _ccw_span(lo, hi):
    return (hi - lo) % TWO_PI


def _in_ccw(az, lo, hi, slack=1e-7):
    off = (az - lo) % TWO_PI
    return off <= _ccw_span(lo, hi) + slack or off >= TWO_PI - slack


def _sector_side(az, lo, hi, slack=1e-7):
    """Which side of direction az the sector [lo, hi] lies on: +1 left,
    -1 right, 0 when the sector straddles az."""
    span = _ccw_span(lo, hi)
    off = (az - lo) % TWO_PI
    if slack < off < span - slack:
        return 0
    mid = (lo + span / 2.0) % TWO_PI
    return 1 if (mid - az) % TWO_PI < math.pi else -1


def _corners_at(v, anchor_face):
    """Intrinsic corner fan at vertex v in the pencil reachable from
    anchor_face: list of (face, az_out, az_in_rev, out_he, in_he)."""
    anchor = None
    for he in anchor_face.cycle():
        if he.origin is v:
            anchor = he
            break
    if anchor is None:
        return []
    ring = [anchor]
    e = anchor.prv.twin
    while e is not None and e is not anchor:
        ring.append(e)
        e = e.prv.twin
    if e is not anchor:
        e = anchor.twin.nxt if anchor.twin is not None else None
        while e is not None and e is not anchor:
            ring.insert(0, e)
            e = e.twin.nxt if e.twin is not None else None
    corners = []
    for out_he in ring:
        if out_he.face is None:
            continue
        in_he = out_he.prv
        d_out = _he_dir(out_he)
        d_in = _he_dir(in_he)
        az0 = math.atan2(d_out[1], d_out[0]) % TWO_PI
        az1 = math.atan2(-d_in[1], -d_in[0]) % TWO_PI
        corners.append((out_he.face, az0, az1, out_he, in_he))
    return corners


def _fan_corners(ss, q3, loc, tol):
    """Corner list around q3 for one surface; None means the full circle
    of the current face (interior point)."""
    if loc[0] == "mid":
        return None
    v = loc[1]
    return _corners_at(v, ss.face)


def _fan_advance(p, q3, d, s1, s2, locs, tol, serial):
    """Continue the walk through a vertex (or degenerate) hit at q3."""
    # Shared-track continuation: the valley proceeds along the (possibly
    # chained) lifted motorcycle edge through this point -- but only while
    # both faces still carry material along it.
    for cand in _tracks_at(s1.face, s2.face, q3, tol):
        v3 = (cand.velocity[0], cand.velocity[1], 1.0)
        extends = cand.crash_time is None or \
            cand.time_at((q3[0], q3[1])) < cand.crash_time - 100 * tol.length
        if geom.dot3(v3, d) > 1e-12 and extends:
            d_new = geom.unit3(v3)
            if not all(_face_continues_along(ss, locs[id(ss)], d_new)
                       for ss in (s1, s2)):
                continue
            for ss in (s1, s2):
                loc = locs[id(ss)]
                if loc[0] in ("vertex", "edge", "bedge"):
                    _advance_through_vertex(ss, loc[1], ss.face)
                else:
                    ss.record.pts.append(q3)
            ok, cause = _check_candidate(q3, d_new, s1, s2, tol)
            if not ok:
                _fan_stop(s1, s2, locs, q3)
                return True, cause
            return False, (q3, d_new)

    fans = {id(ss): _fan_corners(ss, q3, locs[id(ss)], tol)
            for ss in (s1, s2)}
    az_back = math.atan2(-d[1], -d[0]) % TWO_PI

    def sectors_for(ss):
        fan = fans[id(ss)]
        if fan is None:
            return [(ss.face, None, None, None, None)]
        return fan

    prior_marks = {id(s1): set(s1.marks), id(s2): set(s2.marks)}
    # Mark every face touched at this point (the path meets them here).
    for ss in (s1, s2):
        for (f, *_rest) in sectors_for(ss):
            ss.marks.add(id(f))

    candidates = []
    for (fA, azA0, azA1, *_r1) in sectors_for(s1):
        if id(fA) in prior_marks[id(s1)] and fA is not s1.face:
            continue
        for (fB, azB0, azB1, *_r2) in sectors_for(s2):
            if id(fB) in prior_marks[id(s2)] and fB is not s2.face:
                continue
            if geom.planes_coplanar(fA.slab.frame, fB.slab.frame, tol):
                # Coplanar faces only meet along a shared lifted track.
                tracks = _tracks_at(fA, fB, q3, tol)
                if not tracks:
                    continue
                m = tracks[0]
                line = geom.unit3((m.velocity[0], m.velocity[1], 1.0))
            else:
                line = _plane_dir(fA, fB)
            if line is None:
                continue
            for u in (line, (-line[0], -line[1], -line[2])):
                az = math.atan2(u[1], u[0]) % TWO_PI
                circ = abs((az - az_back + math.pi) % TWO_PI - math.pi)
                if circ <= 1e-7:
                    continue
                if azA0 is not None and not _in_ccw(az, azA0, azA1):
                    continue
                if azB0 is not None and not _in_ccw(az, azB0, azB1):
                    continue
                # Each surface's material stays on its own side of the
                # path; corners lying wholly on the wrong side are out.
                if azA0 is not None and \
                        _sector_side(az, azA0, azA1) == -s1.side:
                    continue
                if azB0 is not None and \
                        _sector_side(az, azB0, azB1) == -s2.side:
                    continue
                ok, _cause = _probe(q3, u, fA, fB, s1, s2, tol)
                if not ok:
                    continue
                candidates.append((circ, az, fA, fB, u))

    if not candidates:
        _fan_stop(s1, s2, locs, q3)
        return True, FAN_STOP
    candidates.sort(key=lambda c: c[0])
    _, az, fA, fB, d_new = candidates[0]

    for ss, f_new in ((s1, fA), (s2, fB)):
        loc = locs[id(ss)]
        if loc[0] in ("vertex", "edge", "bedge"):
            vtx = loc[1]
            if f_new is not ss.face:
                if not _side_check_on_exit(ss, vtx, tol):
                    _fan_stop(s1, s2, locs, q3)
                    return True, MONOTONE_STOP
                rec = ss.record
                rec.exit_vertex = vtx
                if rec.entry_vertex is vtx and not rec.pts:
                    ss.records.pop()
                ss.begin(f_new, vtx)
            else:
                _advance_through_vertex(ss, vtx, f_new)
        else:
            if f_new is not ss.face:
                raise RuntimeError("interior point cannot change face")
            ss.record.pts.append(q3)
    ok, cause = _check_candidate(q3, d_new, s1, s2, tol)
    if not ok:
        _fan_stop(s1, s2, locs, q3)
        return True, cause
    return False, (q3, d_new)


def _face_continues_along(ss, loc, d_new):
    """True when the surface still has an edge leaving this location in
    direction d_new (the face was not cut away past it)."""
    if loc[0] == "mid":
        return True
    v = loc[1]
    for e in out_edges(v):
        if e.face is not ss.face and (e.twin is None or
                                      e.twin.face is not ss.face):
            continue
        de = _he_dir(e)
        if geom.norm3(geom.cross3(de, d_new)) <= 1e-7 and \
                geom.dot3(de, d_new) > 0:
            return True
    return False


def _advance_through_vertex(ss, vtx, face):
    """Path continues in the same face after touching its corner."""
    rec = ss.record
    rec.exit_vertex = vtx
    if rec.entry_vertex is vtx and not rec.pts:
        ss.records.pop()
    ss.begin(face, vtx)


def _probe(q3, d_new, fA, fB, s1, s2, tol):
    old1, old2 = s1.face, s2.face
    s1.face, s2.face = fA, fB
    try:
        return _check_candidate(q3, d_new, s1, s2, tol)
    finally:
        s1.face, s2.face = old1, old2


def _fan_stop(s1, s2, locs, q3):
    for ss in (s1, s2):
        loc = locs[id(ss)]
        if loc[0] in ("vertex", "edge", "bedge"):
            _stop_at_vertex(ss, loc[1])
        else:
            _stop_mid(ss, q3)


# ---------------------------------------------------------------------------
# surgery

def split_edge(he, q3):
    v = Vertex(point=q3)
    e2 = HalfEdge(v, he.face, he.kind, he.moto_id)
    e2.nxt = he.nxt
    he.nxt.prv = e2
    he.nxt = e2
    e2.prv = he
    t = he.twin
    if t is not None:
        t2 = HalfEdge(v, t.face, t.kind, t.moto_id)
        t2.nxt = t.nxt
        t.nxt.prv = t2
        t.nxt = t2
        t2.prv = t
        he.twin = t2
        t2.twin = he
        e2.twin = t
        t.twin = e2
        if t.face is not None:
            t.face.shoot_cache = None
    v.he = e2
    if he.face is not None:
        he.face.shoot_cache = None
    COUNTER.steps += 1
    return v


def _pick_corner_he(face, v, toward):
    """Half-edge of the face cycle with origin v whose corner sector
    contains the direction ``toward`` (for multiply-visited vertices)."""
    cands = [e for e in face.cycle() if e.origin is v]
    if len(cands) == 1 or toward is None:
        return cands[0] if cands else None
    az = math.atan2(toward[1], toward[0]) % TWO_PI
    for e in cands:
        d_out = _he_dir(e)
        d_in = _he_dir(e.prv)
        lo = math.atan2(d_out[1], d_out[0]) % TWO_PI
        hi = math.atan2(-d_in[1], -d_in[0]) % TWO_PI
        if _in_ccw(az, lo, hi, slack=1e-7):
            return e
    return cands[0]


def split_face(face, chain_vs, tol):
    """Cut the face along a vertex chain whose endpoints already sit on
    its cycle; the face object keeps the side containing a BASE edge.
    Returns (kept_path_hes_in_chain_order, discarded_face)."""
    A, B = chain_vs[0], chain_vs[-1]
    if A is B:
        raise RuntimeError("degenerate cut (single point)")
    toward_b = None
    if not A.is_infinite and not B.is_infinite:
        toward_b = geom.sub3((chain_vs[1].point if chain_vs[1].point
                              else B.point), A.point)
    a_he = _pick_corner_he(face, A, toward_b)
    toward_a = None
    if toward_b is not None:
        prev = chain_vs[-2]
        if prev.point is not None and not B.is_infinite:
            toward_a = geom.sub3(prev.point, B.point)
    b_he = _pick_corner_he(face, B, toward_a)
    if a_he is None or b_he is None:
        raise RuntimeError("cut endpoints not on face cycle")

    n_seg = len(chain_vs) - 1
    fwd = [HalfEdge(chain_vs[i], None, INTERIOR) for i in range(n_seg)]
    rev = [HalfEdge(chain_vs[i + 1], None, INTERIOR) for i in range(n_seg)]
    for i in range(n_seg):
        fwd[i].twin = rev[i]
        rev[i].twin = fwd[i]
    for i in range(n_seg - 1):
        fwd[i].nxt = fwd[i + 1]
        fwd[i + 1].prv = fwd[i]
        rev[i + 1].nxt = rev[i]
        rev[i].prv = rev[i + 1]

    a_prev = a_he.prv
    b_prev = b_he.prv
    a_prev.nxt = fwd[0]
    fwd[0].prv = a_prev
    fwd[-1].nxt = b_he
    b_he.prv = fwd[-1]
    b_prev.nxt = rev[-1]
    rev[-1].prv = b_prev
    rev[0].nxt = a_he
    a_he.prv = rev[0]
    for i in range(n_seg):
        if fwd[i].origin.he is None:
            fwd[i].origin.he = fwd[i]
        if rev[i].origin.he is None:
            rev[i].origin.he = rev[i]

    loop1 = _collect_loop(fwd[0])
    g = Face(face.slab)
    if any(e.kind == BASE for e in loop1):
        kept_loop, lost_loop, kept_path = loop1, _collect_loop(rev[0]), fwd
    else:
        lost_loop = loop1
        kept_loop = _collect_loop(rev[0])
        kept_path = rev
        if not any(e.kind == BASE for e in kept_loop):
            raise DefiningChainCut(
                "cut separated slab %s from its defining edge"
                % face.slab.gid)
    for e in kept_loop:
        e.face = face
    face.he = kept_path[0]
    face.shoot_cache = None
    for e in lost_loop:
        e.face = g
    g.he = lost_loop[0]
    COUNTER.steps += len(loop1)
    return kept_path, g


def _collect_loop(he):
    out = []
    e = he
    while True:
        out.append(e)
        e = e.nxt
        if e is he:
            return out
        if len(out) > 2000000:
            raise RuntimeError("face loop does not close")


def cut_surface(surf, ss, tol):
    """Subdivide faces along the recorded traversals, discard the
    non-defining sides.  Returns the glue run: path half-edges in walk
    order (completion risers excluded)."""
    runs = []
    doomed = []
    for rec in ss.records:
        if rec.exit_vertex is None and rec.end_pt is not None:
            _complete_record(rec, tol, ss.serial)
        if rec.entry_vertex is None or rec.exit_vertex is None:
            raise RuntimeError("incomplete traversal record %r" % rec)
        if rec.entry_vertex is rec.exit_vertex and not rec.pts:
            continue
        chain = [rec.entry_vertex] + \
            [Vertex(point=pt) for pt in rec.pts] + [rec.exit_vertex]
        kept_path, lost = split_face(rec.face, chain, tol)
        # Both fwd and rev lists are indexed by path segment already.
        hes = list(kept_path)
        if rec.completed:
            riser = hes.pop()
            riser.kind = SLOPE
            if riser.twin is not None:
                riser.twin.kind = SLOPE
        runs.append(hes)
        doomed.append(lost)
    _discard_faces(surf, doomed)
    return [e for hes in runs for e in hes]


def _complete_record(rec, tol, serial):
    face = rec.face
    frame = face.slab.frame
    p3 = rec.end_pt
    rec.pts.append(p3)
    kind, he, q3, vtx = _exit_upward(face, p3, tol)
    if kind is None:
        w = _find_top_vertex(face, frame.S)
        if w is None:
            raise RuntimeError("unbounded face lacks slope-direction vertex")
        rec.exit_vertex = w
    elif kind == "vertex":
        rec.exit_vertex = vtx
    else:
        rec.exit_vertex = split_edge(he, q3)
    rec.completed = True


def _exit_upward(face, p3, tol):
    """First boundary element straight up the slope vector from p3, found
    analytically (the vertical shot grazes vertical slope edges, so the
    generic ray shoot cannot be used here)."""
    frame = face.slab.frame
    pa, pb = frame.local(p3)
    eps = 10.0 * tol.length
    best = None   # (b, kind, he, q3, vertex)
    for he in face.cycle():
        g = he_local_geometry(he, frame)
        if g[0] == "atinf":
            continue
        if g[0] == "seg":
            (x0, y0), (x1, y1) = g[1], g[2]
            lo, hi = (x0, x1) if x0 <= x1 else (x1, x0)
            if not (lo - eps <= pa <= hi + eps):
                continue
            if abs(x1 - x0) <= eps:
                # vertical piece straddling pa: exit at its lower end
                yb = min(y0, y1)
                if yb > pb + eps and (best is None or yb < best[0]):
                    v = he.origin if y0 <= y1 else he.nxt.origin
                    best = (yb, "vertex", he, v.point, v)
                continue
            t = (pa - x0) / (x1 - x0)
            yb = y0 + t * (y1 - y0)
        else:
            (x0, y0) = g[1]
            ex, ey = g[2]
            if abs(ex) <= 1e-12:
                if abs(x0 - pa) <= eps and ey > 0 and y0 > pb + eps:
                    if best is None or y0 < best[0]:
                        anchor = he.origin if not he.origin.is_infinite \
                            else he.nxt.origin
                        best = (y0, "vertex", he, anchor.point, anchor)
                continue
            s = (pa - x0) / ex
            if s < -eps:
                continue
            yb = y0 + s * ey
        if yb <= pb + eps:
            continue
        if best is not None and yb >= best[0]:
            continue
        q3 = frame.world(pa, yb)
        vertex = None
        v0, v1 = he.origin, he.nxt.origin
        if not v0.is_infinite and _same_pt(q3, v0.point, eps):
            vertex, q3 = v0, v0.point
        elif not v1.is_infinite and _same_pt(q3, v1.point, eps):
            vertex, q3 = v1, v1.point
        best = (yb, "vertex" if vertex else "edge", he, q3, vertex)
    if best is None:
        return (None, None, None, None)
    return best[1], best[2], best[3], best[4]


def _find_top_vertex(face, S):
    for he in face.cycle():
        v = he.origin
        if v.is_infinite and geom.norm3(geom.sub3(v.inf_dir, S)) <= 1e-9:
            return v
    return None


def _discard_faces(surf, doomed):
    if not doomed:
        return
    doomed_ids = {id(f) for f in doomed}
    for f in doomed:
        for e in f.cycle():
            t = e.twin
            if t is not None and id(t.face) not in doomed_ids:
                t.twin = None
            e.twin = None
    for f in surf.faces:
        for e in f.cycle():
            e.origin.he = e


def glue(r1, r2, run1, run2, tol):
    if len(run1) != len(run2):
        raise ChainMismatch("cut runs differ: %d vs %d edges"
                            % (len(run1), len(run2)))
    # Unify vertices first (r1's objects win), then set twins.
    mapping = {}
    for e1, e2 in zip(run1, run2):
        v1a, v1b = e1.origin, e1.nxt.origin
        v2a, v2b = e2.origin, e2.nxt.origin
        if _verts_match(v1a, v2b, tol) and _verts_match(v1b, v2a, tol):
            pairs = ((v2b, v1a), (v2a, v1b))
        elif _verts_match(v1a, v2a, tol) and _verts_match(v1b, v2b, tol):
            raise ChainMismatch("glue runs share orientation")
        else:
            raise ChainMismatch("glue geometry mismatch at %r / %r"
                                % (e1, e2))
        for old, new in pairs:
            if old is not new:
                cur = mapping.get(id(old), (old, new))[1]
                mapping[id(old)] = (old, new)
    for old, new in mapping.values():
        _replace_vertex(old, new)
    for e1, e2 in zip(run1, run2):
        e1.twin = e2
        e2.twin = e1


def _verts_match(u, v, tol):
    if u is v:
        return True
    if u.is_infinite != v.is_infinite:
        return False
    if u.is_infinite:
        return geom.norm3(geom.sub3(u.inf_dir, v.inf_dir)) <= 1e-7
    return tol.same_xyz(u.point, v.point)


def _replace_vertex(old, new):
    if old is new:
        return
    for e in out_edges(old):
        e.origin = new
    if new.he is None:
        new.he = old.he


# ---------------------------------------------------------------------------
# fringe simplification

def fringe_simplify(surf, tol):
    for face in list(surf.faces):
        _simplify_face(surf, face, tol)


def _simplify_face(surf, face, tol):
    cyc = face.cycle()
    n = len(cyc)

    def is_fringe(e):
        return e.twin is None and e.kind not in SLAB_BORDER_KINDS

    def dirty(e):
        if e.twin is not None:
            return False
        if e.kind == INTERIOR:
            return True
        if e.kind == SLOPE:
            return not (e.origin.is_infinite or e.nxt.origin.is_infinite)
        return False

    if not any(dirty(e) for e in cyc):
        return
    start = next((k for k in range(n) if not is_fringe(cyc[k])), None)
    if start is None:
        raise DisconnectedViolation(
            "face of slab %s has no anchored boundary" % face.slab.gid)
    runs = []
    run = []
    for k in range(start, start + n):
        e = cyc[k % n]
        if is_fringe(e):
            run.append(e)
        elif run:
            runs.append(run)
            run = []
    if run:
        runs.append(run)
    dirty_runs = [r for r in runs if any(dirty(e) for e in r)]
    if len(dirty_runs) != 1:
        raise DisconnectedViolation(
            "face of slab %s has %d dirty fringe runs"
            % (face.slab.gid, len(dirty_runs)))
    run = dirty_runs[0]
    u = run[0].origin
    v = run[-1].nxt.origin
    prev_he = run[0].prv
    next_he = run[-1].nxt
    frame = face.slab.frame
    if face.slab.caps:
        new_hes = _cap_detour(face, u, v)
    else:
        w = Vertex(inf_dir=frame.S)
        h1 = HalfEdge(u, face, SLOPE)
        h2 = HalfEdge(w, face, SLOPE)
        w.he = h2
        new_hes = [h1, h2]
    prev_he.nxt = new_hes[0]
    new_hes[0].prv = prev_he
    for i in range(len(new_hes) - 1):
        new_hes[i].nxt = new_hes[i + 1]
        new_hes[i + 1].prv = new_hes[i]
    new_hes[-1].nxt = next_he
    next_he.prv = new_hes[-1]
    face.he = prev_he
    face.shoot_cache = None
    if u.he in run:
        u.he = new_hes[0]
    for f in surf.faces:
        pass


def _cap_detour(face, u, v):
    """Cell-mode replacement: rise to the slab's caps and walk along them
    between the two riser feet."""
    frame = face.slab.frame
    slab = face.slab
    ua, ub = frame.local(u.point)
    va, vb = frame.local(v.point)
    top_u = _cap_hit(slab, ua)
    top_v = _cap_hit(slab, va)
    pts = [(ua, top_u)]
    lo, hi = min(ua, va), max(ua, va)
    corner_as = []
    for c in slab.caps:
        for a_end in (c.a0, c.a1):
            if lo + 1e-9 < a_end < hi - 1e-9:
                corner_as.append(a_end)
    corner_as.sort(reverse=ua > va)
    for a_end in corner_as:
        pts.append((a_end, _cap_hit(slab, a_end)))
    pts.append((va, top_v))
    clean = [pts[0]]
    for pt in pts[1:]:
        if abs(pt[0] - clean[-1][0]) > 1e-12 or \
                abs(pt[1] - clean[-1][1]) > 1e-12:
            clean.append(pt)
    verts = [u] + [Vertex(point=frame.world(a, b)) for (a, b) in clean] + [v]
    out = []
    for i in range(len(verts) - 1):
        kind = SLOPE if i == 0 or i == len(verts) - 2 else CAP
        he = HalfEdge(verts[i], face, kind)
        out.append(he)
        if verts[i].he is None:
            verts[i].he = he
    return out


def _cap_hit(slab, a):
    best = INF
    for c in slab.caps or ():
        if c.a0 - 1e-9 <= a <= c.a1 + 1e-9:
            best = min(best, c.b_at(a))
    if math.isinf(best):
        raise RuntimeError("cap expected above a=%g on slab %s"
                           % (a, slab.gid))
    return best


# ---------------------------------------------------------------------------
# merge

def merge(r1, r2, tol=None, validate_result=False):
    """Merge two partial roofs over co-incident chains; returns the merged
    roof and the splicing path record."""
    if tol is None:
        tol = r1.tol
    COUNTER.merges += 1
    path, s1, s2 = splicing_walk(r1, r2, tol)
    run1 = cut_surface(r1, s1, tol)
    run2 = cut_surface(r2, s2, tol)
    glue(r1, r2, run1, run2, tol)

    faces = r1.faces + r2.faces
    fb = dict(r1.face_by_gid)
    fb.update(r2.face_by_gid)
    out = PartialRoof(faces, r1.chain_gids + r2.chain_gids, fb,
                      r1.start_vertex, r2.end_vertex, tol)
    # On the closing merge of a polygon the glue welds the far junction;
    # pick up the surviving vertex object.
    if r2.end_vertex.he is None and r1.start_vertex.he is not None and \
            _verts_match(r1.start_vertex, r2.end_vertex, tol):
        out.end_vertex = r1.start_vertex
    fringe_simplify(out, tol)
    for f in out.faces:
        f.shoot_cache = None
    if validate_result:
        bad = roofmod.validate(out)
        if bad:
            raise RuntimeError("merge produced invalid roof: %s" % bad)
    return out, path
