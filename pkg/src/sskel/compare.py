"""Canonical skeleton graphs and comparisons between the main pipeline
and the brute-force oracles."""

import math

from .geom import sub2


class SkeletonGraph:
    """Canonicalized straight skeleton: merged vertices, dissolved
    degree-2 collinear joints, arcs tagged with their two face gids."""

    __slots__ = ("verts", "arcs", "tol")

    def __init__(self, verts, arcs, tol):
        self.verts = verts          # [(x, y, z)]
        self.arcs = arcs            # [(i, j, frozenset(faces))]
        self.tol = tol

    def interior_vertices(self):
        return [v for v in self.verts if v[2] > 1e-9]

    def arc_count(self):
        return len(self.arcs)

    def face_arc_counts(self):
        out = {}
        for (i, j, faces) in self.arcs:
            for g in faces:
                out[g] = out.get(g, 0) + 1
        return out


def _merge_key(p, eps):
    return (round(p[0] / eps), round(p[1] / eps), round(p[2] / eps))


def build_skeleton_graph(segments, tol, eps=1e-7):
    """segments: iterable of ((x,y,z), (x,y,z), faces-iterable).

    Vertices within eps are merged; degree-2 vertices joining collinear
    arcs with identical face sets are dissolved.
    """
    verts = []
    index = {}

    def vid(p):
        for dk in _keys_near(p, eps):
            if dk in index:
                return index[dk]
        i = len(verts)
        verts.append(p)
        index[_merge_key(p, eps)] = i
        return i

    arcs = {}
    for (a, b, faces) in segments:
        ia, ib = vid(a), vid(b)
        if ia == ib:
            continue
        key = (min(ia, ib), max(ia, ib))
        fs = frozenset(faces)
        if key in arcs:
            arcs[key] = arcs[key] | fs
        else:
            arcs[key] = fs
    # dissolve degree-2 collinear joints
    changed = True
    while changed:
        changed = False
        incident = {}
        for (i, j) in arcs:
            incident.setdefault(i, []).append((i, j))
            incident.setdefault(j, []).append((i, j))
        for v, edges in incident.items():
            if len(edges) != 2 or verts[v][2] <= 1e-9:
                continue
            (e1, e2) = edges
            if e1 == e2:
                continue
            o1 = e1[0] if e1[1] == v else e1[1]
            o2 = e2[0] if e2[1] == v else e2[1]
            if o1 == o2:
                continue
            if arcs[e1] != arcs[e2]:
                continue
            d1 = _unit3(sub3(verts[v], verts[o1]))
            d2 = _unit3(sub3(verts[o2], verts[v]))
            if d1 is None or d2 is None:
                continue
            dev = max(abs(d1[k] - d2[k]) for k in range(3))
            if dev > 1e-6:
                continue
            fs = arcs.pop(e1)
            arcs.pop(e2)
            key = (min(o1, o2), max(o1, o2))
            arcs[key] = arcs.get(key, frozenset()) | fs
            changed = True
            break
    out_arcs = [(i, j, fs) for ((i, j), fs) in sorted(arcs.items())]
    return SkeletonGraph(verts, out_arcs, tol)


def _keys_near(p, eps):
    base = _merge_key(p, eps)
    for dx in (0, -1, 1):
        for dy in (0, -1, 1):
            for dz in (0, -1, 1):
                yield (base[0] + dx, base[1] + dy, base[2] + dz)


def sub3(p, q):
    return (p[0] - q[0], p[1] - q[1], p[2] - q[2])


def _unit3(d):
    n = math.sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
    if n <= 1e-300:
        return None
    return (d[0] / n, d[1] / n, d[2] / n)


def graph_from_roof(rg):
    """SkeletonGraph of a RoofGraph's interior edges."""
    segs = []
    for (i, j, kind, (gl, gr)) in rg.edges:
        if kind not in ("ridge", "valley"):
            continue
        a, b = rg.vertices[i], rg.vertices[j]
        if a is None or b is None:
            continue   # infinite: polygon roofs have none
        segs.append((a, b, [g for g in (gl, gr) if g is not None]))
    return build_skeleton_graph(segs, rg.tol)


def graph_from_oracle(sk):
    segs = [(a, b, (l, r)) for (a, b, l, r) in sk.arcs]
    return build_skeleton_graph(segs, sk.tol)


def hausdorff_vertices(A, B):
    """Bidirectional Hausdorff distance between interior vertex sets."""
    va = A.interior_vertices()
    vb = B.interior_vertices()
    if not va and not vb:
        return 0.0
    if not va or not vb:
        return math.inf

    def one_way(xs, ys):
        worst = 0.0
        for x in xs:
            best = min(math.dist(x, y) for y in ys)
            worst = max(worst, best)
        return worst

    return max(one_way(va, vb), one_way(vb, va))


def same_combinatorics(A, B, eps=1e-6):
    """Vertex sets match 1:1 within eps and arcs agree (as vertex pairs
    with identical face sets)."""
    va, vb = A.verts, B.verts
    if len(A.arcs) != len(B.arcs):
        return False, "arc counts differ: %d vs %d" % (len(A.arcs),
                                                       len(B.arcs))
    mapping = {}
    used = set()
    for i, v in enumerate(va):
        best, best_d = None, math.inf
        for j, w in enumerate(vb):
            if j in used:
                continue
            d = math.dist(v, w)
            if d < best_d:
                best, best_d = j, d
        if best is None or best_d > eps:
            return False, "unmatched vertex %r (closest %.3g)" % (v, best_d)
        mapping[i] = best
        used.add(best)
    if len(used) != len(vb):
        return False, "vertex counts differ: %d vs %d" % (len(va), len(vb))
    arcs_b = {(min(i, j), max(i, j)): fs for (i, j, fs) in B.arcs}
    for (i, j, fs) in A.arcs:
        mi, mj = mapping[i], mapping[j]
        key = (min(mi, mj), max(mi, mj))
        if key not in arcs_b:
            return False, "arc %r missing in oracle" % ((i, j),)
        if fs != arcs_b[key]:
            return False, "face sets differ on arc %r: %r vs %r" % (
                (i, j), sorted(fs), sorted(arcs_b[key]))
    return True, "ok"
