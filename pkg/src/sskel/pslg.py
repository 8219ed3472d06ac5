"""Straight skeletons of PSLG faces by vertical subdivision into cells.

The face interior is split by vertical planes through one subdivision
point per boundary component.  Each split intersects the (unknown) roof
with the plane by taking the lower envelope of the slab sections, traces
descent paths from the breakpoints, and subdivides both the cells and the
slabs.  Final cells are filled with the polygon merge machinery running
on subdivided slabs whose defining chains are lifted cell-boundary edges;
fragments are then merged back across cell boundaries.

A preprocessing rotation keeps edges and pairwise bisectors away from the
axes so no vertical edge degenerates.
"""

import math

from . import geom
from .geom import (SQRT2, sub2, add2, mul2, dot2, cross2, norm2, unit2)
from . import envelope as envmod
from .polygon import build_pslg, BoundaryWalk, Chain, split_chain
from .motorcycle import Arena, induce, simulate
from .slabs import Slab, build_all_slabs, intersect_slab_vertical_plane
from . import roof as roofmod
from . import merge as mergemod
from .errors import SkelError, SeamMismatch, OffSlab

INF = math.inf


# ---------------------------------------------------------------------------
# rotation preprocessing

def rotation_angle(vertices, segments):
    """Angle that moves every edge direction and every pairwise bisector
    direction off the coordinate axes: half the smallest nonzero clearance
    found by sorting edge angles and bisector slopes."""
    dirs = []
    for (a, b) in segments:
        d = sub2(vertices[b], vertices[a])
        n = norm2(d)
        if n <= 0:
            continue
        dirs.append((d[0] / n, d[1] / n))
    if not dirs:
        return 0.0
    # clearance of edge angles from the axes (mod pi/2)
    quarter = math.pi / 2
    eps_axis = quarter
    angles = []
    for (dx, dy) in dirs:
        ang = math.atan2(dy, dx) % math.pi
        angles.append(ang)
        for axis in (0.0, quarter):
            off = abs((ang - axis + quarter / 2) % quarter - quarter / 2)
            if off > 1e-12:
                eps_axis = min(eps_axis, off)
    # bisector directions of all pairs: (ang_i + ang_j) / 2 mod pi/2
    theta = quarter
    m = len(angles)
    for i in range(m):
        for j in range(i, m):
            bis = ((angles[i] + angles[j]) / 2.0) % quarter
            for axis in (0.0, quarter):
                off = abs((bis - axis + quarter / 2) % quarter - quarter / 2)
                if off > 1e-12:
                    theta = min(theta, off)
    need = 0.0
    for (dx, dy) in dirs:
        ang = math.atan2(dy, dx) % quarter
        if min(ang, quarter - ang) <= 1e-12:
            need = 1.0
            break
    if need == 0.0:
        # also check bisectors already on axes
        for i in range(m):
            for j in range(i, m):
                bis = ((angles[i] + angles[j]) / 2.0) % quarter
                if min(bis, quarter - bis) <= 1e-12:
                    need = 1.0
                    break
            if need:
                break
    if need == 0.0:
        return 0.0
    return min(eps_axis, theta) / 2.0


def rotate_points(points, angle):
    c, s = math.cos(angle), math.sin(angle)
    return [(c * x - s * y, s * x + c * y) for (x, y) in points]


# ---------------------------------------------------------------------------
# per-face pipeline data

class FaceJob:
    """A PSLG face prepared for subdivision: rotated walks, motorcycle
    graph, slabs, and subdivision points."""

    __slots__ = ("pslg", "face_index", "angle", "walks", "arena", "mg",
                 "slabs", "vpoints", "tol")

    def __init__(self, pslg, face_index, angle, walks, arena, mg, slabs,
                 vpoints):
        self.pslg = pslg
        self.face_index = face_index
        self.angle = angle
        self.walks = walks
        self.arena = arena
        self.mg = mg
        self.slabs = slabs
        self.vpoints = vpoints
        self.tol = arena.tol


def prepare_face(vertices, segments, face_index=None, tol=None):
    """Rotate the input, build the face walks, the induced motorcycles and
    slabs, and pick one subdivision point per boundary component."""
    angle = rotation_angle(vertices, segments)
    rotated = rotate_points(vertices, angle)
    G = build_pslg(rotated, segments, tol)
    if face_index is None:
        face_index = G.outer_face
    face = G.faces[face_index]
    arena = Arena(face.walks, G.tol)
    mg = simulate(induce(arena), arena)
    slabs = build_all_slabs(mg)
    vpoints = choose_subdivision_points(face.walks)
    return FaceJob(G, face_index, angle, face.walks, arena, mg, slabs,
                   vpoints)


def choose_subdivision_points(walks):
    """One point per boundary component: its lexicographically smallest
    vertex (deterministic)."""
    out = []
    for walk in walks:
        out.append(min(walk.points))
    return out


# ---------------------------------------------------------------------------
# vertical sections and descent paths

def roof_section(slab_list, x0, tol):
    """Lower envelope of the slab sections in the vertical plane x = x0:
    a piece list over y with tags (slab gid)."""
    pieces = []
    for s in slab_list:
        for (p0, p1, (t0, t1), frameinfo) in \
                intersect_slab_vertical_plane(s, x0):
            if p0 is not None and p1 is not None:
                pieces.append(envmod.segment_piece(p0[1], p0[2],
                                                   p1[1], p1[2], s.gid))
            elif p0 is None and p1 is None:
                continue
            else:
                frame = s.frame
                a0, b0, da, db = frameinfo
                w = frame.world_dir(da, db)
                if abs(w[1]) <= 1e-13:
                    continue
                slope = w[2] / w[1]
                if p1 is None:
                    anchor = p0
                    ydir = 1 if w[1] > 0 else -1
                else:
                    anchor = p1
                    ydir = -1 if w[1] > 0 else 1
                pieces.append(envmod.ray_piece(anchor[1], anchor[2], slope,
                                               s.gid, ydir))
    return envmod.envelope_of_pieces(pieces)


def descend(slab, p3, tol):
    """Steepest-descent path from a point on the slab down to z = 0.

    Returns a list of 3D segments (top to bottom): the riser down the
    slope vector, then pieces of the motorcycle chain."""
    frame = slab.frame
    a, b = frame.local(p3)
    eps = 100 * tol.length
    if not slab.contains_local(a, b, 100 * tol.length):
        raise OffSlab("descent start %r not on slab %d" % (p3, slab.gid))
    floor_b = slab.floor_at(a)
    out = []
    foot = frame.world(a, floor_b)
    if b > floor_b + eps:
        out.append((p3, foot))
    # locate the lower piece we landed on
    idx = None
    for i, piece in enumerate(slab.lower):
        if piece.a0 - eps <= a <= piece.a1 + eps and \
                abs(piece.b_at(a) - floor_b) <= 10 * eps:
            idx = i
            break
    if idx is None or slab.lower[idx].kind == "base":
        return out
    # Walk the lower chain toward decreasing height until the base.
    pt_here = foot
    i = idx
    while 0 <= i < len(slab.lower):
        piece = slab.lower[i]
        if piece.kind == "base" or pt_here[2] <= eps:
            break
        lo_a = max(piece.a0, slab.a_min)
        hi_a = min(piece.a1, slab.a_max)
        b_lo = piece.b_at(lo_a)
        b_hi = piece.b_at(hi_a)
        if b_lo < b_hi:
            nxt_a, nxt_b, step = lo_a, b_lo, -1
        else:
            nxt_a, nxt_b, step = hi_a, b_hi, +1
        nxt = frame.world(nxt_a, nxt_b)
        if abs(nxt[2] - pt_here[2]) > eps:
            out.append((pt_here, nxt))
        pt_here = nxt
        i += step
    return out
