"""Divide-and-conquer straight-skeleton driver for polygons, and
extraction of the skeleton graph from a finished roof."""

import math

from . import geom
from .polygon import build_polygon
from .motorcycle import Arena, induce, simulate
from .slabs import build_all_slabs
from . import roof as roofmod
from .roof import BASE, INTERIOR, initial_roof
from . import merge as mergemod
from .errors import SkelError


class RoofGraph:
    """Vertices (x, y, z), edges tagged boundary/ridge/valley, and a
    face -> base-edge map.  z equals the wavefront arrival time."""

    __slots__ = ("vertices", "edges", "faces", "infinite_dirs", "tol")

    def __init__(self, vertices, edges, faces, infinite_dirs, tol):
        self.vertices = vertices      # list of (x, y, z)
        self.edges = edges            # list of (i, j, kind, (gid_l, gid_r))
        self.faces = faces            # gid -> list of vertex index cycles
        self.infinite_dirs = infinite_dirs  # vertex index -> unit dir or None
        self.tol = tol

    def interior_edges(self):
        return [e for e in self.edges if e[2] in ("ridge", "valley")]

    def skeleton_vertices(self):
        out = set()
        for (i, j, kind, _) in self.edges:
            if kind in ("ridge", "valley"):
                out.add(i)
                out.add(j)
        return sorted(out)


def motorcycle_graph_for(P):
    arena = Arena([P.walk], P.tol)
    return simulate(induce(arena), arena)


def compute_roof(P, mg=None, validate_merges=False, collect=None):
    """Straight-skeleton roof of a weakly simple polygon by recursive
    halving of the boundary chain and merging of partial roofs."""
    if mg is None:
        mg = motorcycle_graph_for(P)
    slabs = build_all_slabs(mg)
    n = len(P)
    surface = _build_chain(list(range(n)), slabs, P.tol,
                           validate_merges, collect)
    bad = roofmod.validate(surface)
    if bad:
        raise SkelError("final roof invalid: %s" % bad)
    boundary_kinds = {e.kind for e in surface.boundary_half_edges()}
    if boundary_kinds - {BASE}:
        raise SkelError("final roof keeps fringe edges: %s" % boundary_kinds)
    return extract_roof_graph(surface, mg), surface


def _build_chain(gids, slabs, tol, validate_merges, collect):
    if len(gids) == 1:
        return initial_roof(slabs[gids[0]])
    k = len(gids) // 2
    r1 = _build_chain(gids[:k], slabs, tol, validate_merges, collect)
    r2 = _build_chain(gids[k:], slabs, tol, validate_merges, collect)
    merged, path = mergemod.merge(r1, r2, tol,
                                  validate_result=validate_merges)
    if collect is not None:
        collect(merged, path, len(r1.faces), len(r2.faces))
    return merged


def extract_roof_graph(surface, mg):
    """Flatten the half-edge surface into an indexed graph."""
    tol = surface.tol
    verts = []
    index = {}

    def vid(v):
        if id(v) in index:
            return index[id(v)]
        i = len(verts)
        index[id(v)] = i
        verts.append(v)
        return i

    edges = []
    seen = set()
    for f in surface.faces:
        for e in f.cycle():
            if id(e) in seen or (e.twin is not None and id(e.twin) in seen):
                continue
            seen.add(id(e))
            i, j = vid(e.origin), vid(e.nxt.origin)
            gl = e.face.slab.gid if e.face else None
            gr = e.twin.face.slab.gid if e.twin is not None and e.twin.face \
                else None
            if e.twin is None:
                kind = "boundary"
            else:
                kind = _classify_interior(e, mg, tol)
            edges.append((i, j, kind, (gl, gr)))
    coords = []
    inf_dirs = {}
    for i, v in enumerate(verts):
        if v.is_infinite:
            coords.append(None)
            inf_dirs[i] = v.inf_dir
        else:
            coords.append(v.point)
    faces = {}
    for f in surface.faces:
        faces[f.slab.gid] = [vid(e.origin) for e in f.cycle()]
    return RoofGraph(coords, edges, faces, inf_dirs, tol)


def _classify_interior(e, mg, tol):
    """valley iff the edge lies on a lifted motorcycle track (within
    tolerance); everything else glued is a ridge."""
    v0, v1 = e.origin, e.nxt.origin
    if v0.is_infinite or v1.is_infinite:
        return "ridge"
    p, q = v0.point, v1.point
    for m in mg.motorcycles:
        if mergemod._point_on_track(p, m, tol) and \
                mergemod._point_on_track(q, m, tol):
            mid = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2, (p[2] + q[2]) / 2)
            if mergemod._point_on_track(mid, m, tol):
                return "valley"
    return "ridge"


def roof_to_skeleton(rg):
    """Planar straight-skeleton graph: interior roof edges with z kept as
    per-vertex wavefront time."""
    arcs = []
    for (i, j, kind, gids) in rg.edges:
        if kind in ("ridge", "valley"):
            arcs.append((i, j, kind))
    return {"vertices": rg.vertices, "arcs": arcs,
            "infinite_dirs": rg.infinite_dirs,
            "faces": rg.faces}


# ---------------------------------------------------------------------------
# queries used by tests and the oracle comparisons

def roof_height_at(surface, q, slack=None):
    """Height of the roof over an interior point: the height of the face
    whose kept region contains the point.  Returns inf when no face covers
    the point (outside the polygon)."""
    best = math.inf
    tol = surface.tol
    eps = (tol.length if slack is None else slack)
    for f in surface.faces:
        frame = f.slab.frame
        z = frame.height_at_xy(q[0], q[1])
        if z < -eps:
            continue
        a, b = frame.local((q[0], q[1], z))
        if roofmod.face_contains_local(f, a, b, eps):
            best = min(best, max(z, 0.0))
    return best


def interior_edge_tree_check(rg):
    """Union-find acyclicity check over interior edges."""
    parent = {}

    def find(x):
        r = x
        while parent.get(r, r) != r:
            r = parent[r]
        while parent.get(x, x) != x:
            parent[x], x = r, parent[x]
        return r

    for (i, j, kind, _) in rg.edges:
        if kind not in ("ridge", "valley"):
            continue
        a, b = find(i), find(j)
        if a == b:
            return False
        parent[a] = b
    return True


def wavefront_time_consistency(rg, tol_val=1e-9):
    """Every finite interior vertex's z equals its xy-distance to each
    incident face's base line."""
    worst = 0.0
    incident = {}
    for (i, j, kind, (gl, gr)) in rg.edges:
        for v in (i, j):
            incident.setdefault(v, set()).update(
                g for g in (gl, gr) if g is not None)
    for f_gid, cyc in rg.faces.items():
        for v in cyc:
            incident.setdefault(v, set()).add(f_gid)
    return incident
