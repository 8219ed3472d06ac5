"""Brute-force reference implementations used as test-time ground truth.

* ``envelope_height``: pointwise lower envelope of slabs.
* ``wavefront_skeleton``: event-driven kinetic wavefront with batched
  simultaneous events and point-probe reconnection, O(n^2) per event.
* ``convex_medial_axis``: incremental bisector-intersection construction
  for convex polygons.

These are deliberately simple and quadratic/cubic; they exist to check
the divide-and-conquer pipeline, not to be fast.
"""

import math

from .geom import (sub2, add2, mul2, dot2, cross2, norm2,
                   bisector_velocity)
from .errors import OracleScaleExceeded, NotConvex

INF = math.inf


def envelope_height(slabs, q):
    """min over slabs covering q of the slab height at q; +inf outside."""
    best = INF
    for s in (slabs.values() if isinstance(slabs, dict) else slabs):
        h = s.height_at_xy(q)
        if h < best:
            best = h
    return best


# ---------------------------------------------------------------------------
# kinetic wavefront

class _Node:
    __slots__ = ("pos", "birth", "vel", "left", "right", "prev", "nxt",
                 "alive", "nid", "instant")

    def __init__(self, nid, pos, birth, vel, left, right, instant=False):
        self.nid = nid
        self.pos = pos
        self.birth = birth
        self.vel = vel
        self.left = left
        self.right = right
        self.prev = None
        self.nxt = None
        self.alive = True
        self.instant = instant

    def at(self, t):
        dt = t - self.birth
        return (self.pos[0] + dt * self.vel[0], self.pos[1] + dt * self.vel[1])

    def __repr__(self):
        return "N%d(%s|%s)" % (self.nid, self.left, self.right)


class WavefrontSkeleton:
    """Traced arcs ((x,y,z), (x,y,z), left_gid, right_gid); z is time."""

    __slots__ = ("arcs", "n_edges", "tol")

    def __init__(self, arcs, n_edges, tol):
        self.arcs = arcs
        self.n_edges = n_edges
        self.tol = tol

    def vertices(self):
        seen = []
        for (a, b, l, r) in self.arcs:
            for p in (a, b):
                if p[2] <= 1e-12:
                    continue
                if not any(abs(p[0] - s[0]) <= 1e-9 and
                           abs(p[1] - s[1]) <= 1e-9 and
                           abs(p[2] - s[2]) <= 1e-9 for s in seen):
                    seen.append(p)
        return seen

    def face_arcs(self, gid):
        return [(a, b) for (a, b, l, r) in self.arcs if l == gid or r == gid]

    def height_at(self, q):
        """Arrival time at q: needs the polygon, provided for cross-checks
        through arcs is impossible; left to envelope oracle."""
        raise NotImplementedError


def wavefront_skeleton(P, arena=None, max_n=64):
    from .motorcycle import Arena
    if arena is None:
        arena = Arena([P.walk], P.tol)
    if len(arena.edges) > max_n:
        raise OracleScaleExceeded("oracle supports up to %d edges" % max_n)
    sim = _Wavefront(arena, arena.tol)
    sim.run()
    return WavefrontSkeleton(sim.arcs, len(arena.edges), arena.tol)


class _Wavefront:
    def __init__(self, arena, tol):
        self.arena = arena
        self.tol = tol
        self.eps = 1e3 * tol.length
        self.arcs = []
        self.nodes = []
        self.time = 0.0
        self.lines = {}
        for gid, (p, q, wi, li, inward, is_zero) in enumerate(arena.edges):
            self.lines[gid] = (inward, dot2(inward, p))
        offset = 0
        for wi, walk in enumerate(arena.walks):
            nn = len(walk)
            ring = []
            for i in range(nn):
                gin = offset + (i - 1) % nn
                gout = offset + i
                vel = bisector_velocity(arena.inward(gin), arena.inward(gout))
                node = _Node(len(self.nodes), walk.points[i], 0.0, vel,
                             gin, gout)
                self.nodes.append(node)
                ring.append(node)
            for i in range(nn):
                ring[i].nxt = ring[(i + 1) % nn]
                ring[i].prev = ring[i - 1]
            offset += nn

    # -- queries -----------------------------------------------------------

    def _alive_rings(self):
        rings = []
        seen = set()
        for u in self.nodes:
            if not u.alive or u.nid in seen:
                continue
            ring = []
            w = u
            while True:
                ring.append(w)
                seen.add(w.nid)
                w = w.nxt
                if w is u:
                    break
                if len(ring) > len(self.nodes) + 4:
                    raise RuntimeError("wavefront ring corrupt")
            rings.append(ring)
        return rings

    def _edge_event(self, u, v):
        r0 = sub2(v.at(0.0), u.at(0.0))
        dv = sub2(v.vel, u.vel)
        den = dot2(dv, dv)
        if den <= 1e-18:
            return None
        t = -dot2(r0, dv) / den
        if t < self.time - self.tol.eps_abs:
            return None
        # Nodes born coincident that separate (zero-length cap edges)
        # have their closest approach at birth; that is not a collision.
        if t < max(u.birth, v.birth) + self.tol.eps_abs:
            return None
        rem = add2(r0, mul2(dv, t))
        if norm2(rem) > self.eps:
            return None
        return t

    def _reflex(self, u):
        return cross2(self.arena.inward(u.left),
                      self.arena.inward(u.right)) < -1e-12

    def _split_event(self, u, ring):
        best = None
        for w in ring:
            gid = w.right
            if gid == u.left or gid == u.right or w is u or w.nxt is u:
                continue
            n, c = self.lines[gid]
            vn = dot2(n, u.vel)
            if abs(vn - 1.0) <= 1e-12:
                continue
            lhs0 = dot2(n, u.pos) - dot2(n, u.vel) * u.birth
            t = (lhs0 - c) / (1.0 - vn)
            if t < max(self.time, u.birth + self.tol.eps_abs):
                continue
            q = u.at(t)
            a, b = w.at(t), w.nxt.at(t)
            d = sub2(b, a)
            ll = norm2(d)
            if ll <= self.eps:
                continue
            s = dot2(sub2(q, a), d) / (ll * ll)
            if s < -self.eps / ll or s > 1 + self.eps / ll:
                continue
            if best is None or t < best[0]:
                best = (t, q)
        return best

    def _next_event_time(self):
        cands = []
        for ring in self._alive_rings():
            for u in ring:
                t = self._edge_event(u, u.nxt)
                if t is not None:
                    cands.append((t, u.at(t)))
                if len(ring) > 3 and self._reflex(u):
                    sp = self._split_event(u, ring)
                    if sp is not None:
                        cands.append(sp)
        if not cands:
            return None, []
        cands.sort(key=lambda c: c[0])
        t0 = cands[0][0]
        pts = []
        for (t, q) in cands:
            if not self.tol.same_time(t, t0) and t > t0 + self.eps:
                continue
            if not any(abs(q[0] - p[0]) <= self.eps and
                       abs(q[1] - p[1]) <= self.eps for p in pts):
                pts.append(q)
        return t0, pts

    # -- main loop -----------------------------------------------------------

    def run(self):
        guard = 0
        while any(u.alive for u in self.nodes):
            guard += 1
            if guard > 8 * len(self.nodes) + 64:
                raise RuntimeError("wavefront simulation did not terminate")
            t0, pts = self._next_event_time()
            if t0 is None:
                raise RuntimeError("alive wavefront without events")
            for q in pts:
                self._process(t0, q)
            self._collapse_instants(t0)
            self.time = t0

    def _process(self, t, q):
        eps = self.eps
        dead = [u for u in self.nodes
                if u.alive and self._near(u.at(t), q)]
        if not dead:
            return
        involved = []
        seen = set()
        for ring in self._alive_rings():
            if any(u in dead for u in ring):
                involved.append(ring)
        for u in dead:
            u.alive = False
            self._emit_arc(u, t, q)

        runs = []
        for ring in involved:
            if not any(w.alive for w in ring):
                continue
            start = None
            nn = len(ring)
            for i in range(nn):
                if ring[i].alive and not ring[i - 1].alive:
                    start = i
                    break
            if start is None:
                raise RuntimeError("event point with no dying node on ring")
            run = []
            for k in range(nn):
                w = ring[(start + k) % nn]
                if w.alive:
                    run.append(w)
                elif run:
                    runs.append(run)
                    run = []
            if run:
                runs.append(run)
        # Split runs at interior edges whose moving front passes through q
        # (split events cut the opposite edge there).
        final_runs = []
        for run in runs:
            pieces = [[run[0]]]
            for w_next in run[1:]:
                w_prev = pieces[-1][-1]
                if self._edge_through(w_prev, w_next, t, q):
                    pieces.append([])
                pieces[-1].append(w_next)
            final_runs.extend(pieces)
        self._reconnect(t, q, final_runs)

    def _ring(self, u):
        ring = [u]
        w = u.nxt
        while w is not u:
            ring.append(w)
            w = w.nxt
        return ring

    def _near(self, p, q):
        return abs(p[0] - q[0]) <= self.eps and abs(p[1] - q[1]) <= self.eps

    def _edge_through(self, u, v, t, q):
        a, b = u.at(t), v.at(t)
        d = sub2(b, a)
        ll = norm2(d)
        if ll <= self.eps:
            return False
        s = dot2(sub2(q, a), d) / (ll * ll)
        if s < self.eps / ll or s > 1 - self.eps / ll:
            return False
        return abs(cross2(d, sub2(q, a))) / ll <= self.eps

    def _emit_arc(self, u, t, q):
        p0 = u.pos
        if abs(t - u.birth) <= 1e-15 and self._near(p0, q):
            return
        self.arcs.append(((p0[0], p0[1], u.birth), (q[0], q[1], t),
                          u.left, u.right))

    def _unswept_probe(self, t, q, u_dir, involved_rings_nodes, vmax):
        """Is q + delta*u inside the wavefront region just before t?"""
        delta = max(64 * self.eps, 1e-7 * self.tol.scale)
        dt = t - delta / (2.0 * max(vmax, 1.0))
        x = (q[0] + delta * u_dir[0], q[1] + delta * u_dir[1])
        for ring in involved_rings_nodes:
            pts = [w.at(dt) for w in ring]
            if _winding(pts, x):
                return True
        return False

    def _reconnect(self, t, q, runs):
        if not runs:
            return
        arena = self.arena
        node_set = {w.nid for run in runs for w in run}
        pre_rings = []
        recorded = set()
        for ring in self._alive_rings():
            if any(w.nid in node_set for w in ring):
                key = min(w.nid for w in ring)
                if key not in recorded:
                    recorded.add(key)
                    pre_rings.append(ring)
        vmax = 1.0
        for ring in pre_rings:
            for w in ring:
                vmax = max(vmax, math.hypot(w.vel[0], w.vel[1]))

        rays = []
        for i, run in enumerate(runs):
            d_tail = self._front_dir(run[-1].right, run[-1], t, q)
            d_head = self._front_dir(run[0].left, run[0], t, q)
            rays.append((math.atan2(d_tail[1], d_tail[0]) % (2 * math.pi),
                         1, "tail", i))
            rays.append((math.atan2(d_head[1], d_head[0]) % (2 * math.pi),
                         0, "head", i))
        rays.sort()
        k = len(rays)
        joins = []
        for j in range(k):
            a0, _o0, kind0, i0 = rays[j]
            a1, _o1, kind1, i1 = rays[(j + 1) % k]
            if j == k - 1:
                a1 += 2 * math.pi
            if a1 - a0 <= 1e-9:
                continue
            mid = 0.5 * (a0 + a1)
            u_dir = (math.cos(mid), math.sin(mid))
            if not self._unswept_probe(t, q, u_dir, pre_rings, vmax):
                continue
            if kind0 != "head" or kind1 != "tail":
                raise RuntimeError(
                    "wavefront reconnection mismatch at %r" % (q,))
            joins.append((i1, i0, False))
        used_tails = {ti for (ti, hi, inst) in joins}
        used_heads = {hi for (ti, hi, inst) in joins}
        # Anti-parallel leftovers: parallel fronts meeting along a flat
        # ridge swept instantaneously; pair them with instant nodes.
        for j in range(k):
            a0, _o0, kind0, i0 = rays[j]
            if kind0 != "tail" or i0 in used_tails:
                continue
            n_t, _c = self.lines[runs[i0][-1].right]
            for j2 in range(k):
                a1, _o1, kind1, i1 = rays[j2]
                if kind1 != "head" or i1 in used_heads:
                    continue
                if abs((a0 - a1 + math.pi) % (2 * math.pi) - math.pi) > 1e-7:
                    continue
                n_h, _c2 = self.lines[runs[i1][0].left]
                if dot2(n_t, n_h) > -1.0 + 1e-7:
                    continue
                joins.append((i0, i1, True))
                used_tails.add(i0)
                used_heads.add(i1)
                break
        for (ti, hi, instant) in joins:
            u_tail = runs[ti][-1]
            v_head = runs[hi][0]
            if instant:
                vel = (0.0, 0.0)
            else:
                vel = bisector_velocity(arena.inward(u_tail.right),
                                        arena.inward(v_head.left))
            node = _Node(len(self.nodes), q, t, vel,
                         u_tail.right, v_head.left, instant=instant)
            self.nodes.append(node)
            u_tail.nxt = node
            node.prev = u_tail
            node.nxt = v_head
            v_head.prev = node
        for i, run in enumerate(runs):
            if i not in used_tails or i not in used_heads:
                raise RuntimeError("wavefront run left dangling at %r"
                                   % (q,))

    def _collapse_instants(self, t):
        """Rings containing instant nodes are degenerate slivers between
        parallel fronts: the whole ring collapses onto its ridge line at
        time t.  Regular nodes on the ring trace their arcs; the ridge is
        emitted piecewise between consecutive node positions."""
        for ring in self._alive_rings():
            if not any(w.instant for w in ring):
                continue
            pts = [w.at(t) for w in ring]
            # flatness check: all positions collinear
            if len(pts) > 2:
                d = None
                for i in range(1, len(pts)):
                    v = sub2(pts[i], pts[0])
                    if norm2(v) > self.eps:
                        d = (v[0] / norm2(v), v[1] / norm2(v))
                        break
                if d is not None:
                    for p in pts:
                        if abs(cross2(d, sub2(p, pts[0]))) > 10 * self.eps:
                            raise RuntimeError(
                                "instant ridge node in a non-flat ring")
            for w in ring:
                w.alive = False
                if not w.instant:
                    self._emit_arc(w, t, w.at(t))
            # ridge pieces: split every front span at all node positions
            order = sorted(range(len(ring)),
                           key=lambda i: (pts[i][0], pts[i][1]))
            stations = []
            for i in order:
                if not stations or norm2(sub2(pts[i],
                                              stations[-1])) > self.eps:
                    stations.append(pts[i])
            for i, w in enumerate(ring):
                a = pts[i]
                b = pts[(i + 1) % len(ring)]
                if norm2(sub2(a, b)) <= self.eps:
                    continue
                gid = w.right
                lo = min((a, b))
                hi = max((a, b))
                inner = [s for s in stations if lo <= tuple(s) <= hi]
                inner.sort()
                for j in range(len(inner) - 1):
                    p0, p1 = inner[j], inner[j + 1]
                    if norm2(sub2(p0, p1)) <= self.eps:
                        continue
                    self.arcs.append(((p0[0], p0[1], t), (p1[0], p1[1], t),
                                      gid, gid))

    def _alive_rings_snapshot(self):
        return self._alive_rings()

    def _front_dir(self, gid, toward_node, t, q):
        n, c = self.lines[gid]
        d = (n[1], -n[0])
        p = toward_node.at(t)
        if dot2(d, sub2(p, q)) < 0:
            d = (-d[0], -d[1])
        return d


def _winding(pts, x):
    wn = 0
    n = len(pts)
    for i in range(n):
        p0 = pts[i]
        p1 = pts[(i + 1) % n]
        if p0[1] <= x[1]:
            if p1[1] > x[1] and cross2(sub2(p1, p0),
                                       (x[0] - p0[0], x[1] - p0[1])) > 0:
                wn += 1
        else:
            if p1[1] <= x[1] and cross2(sub2(p1, p0),
                                        (x[0] - p0[0], x[1] - p0[1])) < 0:
                wn -= 1
    return wn != 0


# ---------------------------------------------------------------------------
# convex medial axis

def convex_medial_axis(P):
    """Straight skeleton of a convex polygon by repeated contraction of
    the earliest bisector intersection; also its medial axis."""
    walk = P.walk
    n = len(walk)
    if any(walk.reflex):
        raise NotConvex("polygon has a reflex vertex")
    lines = []
    for i in range(n):
        p, _ = walk.edge(i)
        nrm = walk.inward_normal(i)
        lines.append((nrm, dot2(nrm, p)))

    # active list of (vertex point, birth, left line idx, right line idx)
    items = []
    for i in range(n):
        items.append((walk.points[i], 0.0, (i - 1) % n, i))
    arcs = []

    def meet(li, lj, lk):
        """Point equidistant from three lines (offset intersection)."""
        (n1, c1), (n2, c2), (n3, c3) = lines[li], lines[lj], lines[lk]
        # Solve n1.p - t = c1 etc: 3 unknowns (px, py, t).
        a = [[n1[0], n1[1], -1.0], [n2[0], n2[1], -1.0], [n3[0], n3[1], -1.0]]
        b = [c1, c2, c3]
        det = _det3(a)
        if abs(det) <= 1e-14:
            return None
        px = _det3([[b[0], a[0][1], a[0][2]],
                    [b[1], a[1][1], a[1][2]],
                    [b[2], a[2][1], a[2][2]]]) / det
        py = _det3([[a[0][0], b[0], a[0][2]],
                    [a[1][0], b[1], a[1][2]],
                    [a[2][0], b[2], a[2][2]]]) / det
        tt = _det3([[a[0][0], a[0][1], b[0]],
                    [a[1][0], a[1][1], b[1]],
                    [a[2][0], a[2][1], b[2]]]) / det
        return (px, py), tt

    guard = 0
    while len(items) > 2:
        guard += 1
        if guard > 4 * n + 16:
            raise RuntimeError("medial axis contraction stuck")
        best = None
        m = len(items)
        for i in range(m):
            (pv, birth, l, r) = items[i]
            (pw, birthw, l2, r2) = items[(i + 1) % m]
            got = meet(l, r, r2)
            if got is None:
                continue
            (pt, tt) = got
            if tt < max(birth, birthw) - 1e-12:
                continue
            if best is None or tt < best[0]:
                best = (tt, i, pt)
        if best is None:
            raise RuntimeError("no contraction event on convex polygon")
        tt, i, pt = best
        m = len(items)
        batch = [i]
        # collapse every consecutive pair meeting at this point & time
        for j in range(m):
            if j == i:
                continue
            (pv, birth, l, r) = items[j]
            (pw, birthw, l2, r2) = items[(j + 1) % m]
            got = meet(l, r, r2)
            if got is not None and abs(got[1] - tt) <= 1e-9 and \
                    norm2(sub2(got[0], pt)) <= 1e-9 * max(1.0, abs(tt)):
                batch.append(j)
        dead = set()
        for j in batch:
            dead.add(j)
            dead.add((j + 1) % m)
        for j in sorted(dead):
            (pv, birth, l, r) = items[j]
            arcs.append(((pv[0], pv[1], birth), (pt[0], pt[1], tt), l, r))
        if len(dead) == m:
            items = []
            break
        # The dead indices form one contiguous cyclic block; the new
        # vertex carries the block's outermost lines.
        first = next(j for j in dead if (j - 1) % m not in dead)
        last = next(j for j in dead if (j + 1) % m not in dead)
        new_item = (pt, tt, items[first][2], items[last][3])
        out = []
        placed = False
        j = first
        order = [(first + k) % m for k in range(m)]
        for j in order:
            if j in dead:
                if not placed:
                    out.append(new_item)
                    placed = True
                continue
            out.append(items[j])
        items = out
    if len(items) == 2:
        (pv, b1, l1, r1) = items[0]
        (pw, b2, l2, r2) = items[1]
        got = meet(l1, r1, r2)
        if got is not None:
            pt, tt = got
            arcs.append(((pv[0], pv[1], b1), (pt[0], pt[1], tt), l1, r1))
            arcs.append(((pw[0], pw[1], b2), (pt[0], pt[1], tt), l2, r2))
    return WavefrontSkeleton(arcs, n, P.tol)


def _det3(a):
    return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
