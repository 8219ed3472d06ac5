"""Induced motorcycle graphs by event-driven simulation.

A motorcycle is the trace of a reflex wavefront vertex: it starts at the
vertex, rides the interior-angle bisector at speed 1/sin(theta/2), and
crashes on the first wall or earlier-laid track it meets.  Simultaneous
crashes at one point stop every rider involved and, when the surviving
local wavefront still has a reflex (or straight) gap, launch a fresh
motorcycle from the crash point — the scheme needed for degenerate
inputs, where tracks chain end to end.

Each motorcycle knows the two wavefront edges whose fronts its vertex
rides (``edge_a``/``edge_b`` as global wall-edge ids); the slab of an edge
is later bounded by the lifted tracks of every motorcycle that lists it.
"""

import heapq
import math

from .geom import (DEFAULT_TOL, sub2, add2, mul2, dot2, cross2, norm2, unit2,
                   bisector_velocity)
from .errors import SimulationDiverged


class Motorcycle:
    __slots__ = ("mid", "origin", "velocity", "speed", "launch_time",
                 "edge_a", "edge_b", "source", "crash_time", "crash_point",
                 "stopped_by")

    def __init__(self, mid, origin, velocity, launch_time, edge_a, edge_b,
                 source):
        self.mid = mid
        self.origin = origin
        self.velocity = velocity
        self.speed = norm2(velocity)
        self.launch_time = launch_time
        self.edge_a = edge_a
        self.edge_b = edge_b
        self.source = source
        self.crash_time = None     # None while riding; math.inf if escaped
        self.crash_point = None
        self.stopped_by = None

    @property
    def escaped(self):
        return self.crash_time == math.inf

    def position(self, t):
        dt = t - self.launch_time
        return (self.origin[0] + dt * self.velocity[0],
                self.origin[1] + dt * self.velocity[1])

    def time_at(self, q):
        """Arrival time at a point assumed on the ray."""
        v = self.velocity
        s2 = v[0] * v[0] + v[1] * v[1]
        dt = ((q[0] - self.origin[0]) * v[0] + (q[1] - self.origin[1]) * v[1]) / s2
        return self.launch_time + dt

    def __repr__(self):
        return "Motorcycle(%d at %r v=%r t0=%.4g)" % (
            self.mid, self.origin, self.velocity, self.launch_time)


class Arena:
    """Walls and corners of one region: a polygon walk or all walks of a
    PSLG face.  Edges get global ids; corners know their two edges."""

    __slots__ = ("edges", "corners", "tol", "walks")

    def __init__(self, walks, tol):
        self.walks = walks
        self.tol = tol
        self.edges = []    # (p, q, walk_idx, local_idx, inward, is_zero)
        self.corners = []  # (gid_in, gid_out, point, theta)
        gid_of = {}
        for wi, walk in enumerate(walks):
            n = len(walk)
            for i in range(n):
                p, q = walk.edge(i)
                gid_of[(wi, i)] = len(self.edges)
                self.edges.append((p, q, wi, i, walk.inward_normal(i),
                                   walk.is_zero_length(i)))
        for wi, walk in enumerate(walks):
            n = len(walk)
            for i in range(n):
                self.corners.append((gid_of[(wi, i - 1)] if i > 0 else gid_of[(wi, n - 1)],
                                     gid_of[(wi, i)],
                                     walk.points[i],
                                     walk.interior_angles[i]))

    def wall_ids(self):
        return [g for g, e in enumerate(self.edges) if not e[5]]

    def inward(self, gid):
        return self.edges[gid][4]


class MotorcycleGraph:
    __slots__ = ("motorcycles", "arena", "launched_at", "tol")

    def __init__(self, motorcycles, arena, launched_at, tol):
        self.motorcycles = motorcycles
        self.arena = arena
        # crash event key -> list of motorcycle ids launched there
        self.launched_at = launched_at
        self.tol = tol

    def tracks(self):
        """Realized track segments (origin, crash_point_or_None, motorcycle)."""
        out = []
        for m in self.motorcycles:
            out.append((m.origin, m.crash_point, m))
        return out

    def chain_for_edge(self, gid, first):
        """Chained motorcycles bounding slab(gid) starting from motorcycle
        ``first``: follow crash-launched successors that also list gid."""
        chain = [first]
        cur = first
        while cur.crash_time is not None and not cur.escaped:
            key = cur.stopped_by
            if not (isinstance(key, tuple) and key[0] == "multi"):
                break
            nxt = None
            for mid in self.launched_at.get(key[1], ()):
                m = self.motorcycles[mid]
                if gid in (m.edge_a, m.edge_b):
                    nxt = m
                    break
            if nxt is None:
                break
            chain.append(nxt)
            cur = nxt
        return chain

    def motorcycles_at_corner(self, corner_index):
        return [m for m in self.motorcycles
                if m.source == ("reflex", corner_index)]


def induce(arena):
    """One motorcycle per reflex corner: velocity solves v.n = 1 against
    both incident edges' inward normals."""
    out = []
    for ci, (gin, gout, point, theta) in enumerate(arena.corners):
        if theta <= math.pi + 1e-9:
            continue
        v = bisector_velocity(arena.inward(gin), arena.inward(gout))
        out.append(Motorcycle(len(out), point, v, 0.0, gin, gout,
                              ("reflex", ci)))
    return out


def simulate(motorcycles, arena, tol=None, max_launch_factor=4):
    """Run the crash simulation to completion.

    Returns a MotorcycleGraph whose motorcycles all carry a crash time
    (math.inf for escapes) such that crash ordering is a consistent event
    order and no two tracks cross transversally.
    """
    if tol is None:
        tol = arena.tol
    sim = _Simulation(motorcycles, arena, tol, max_launch_factor)
    sim.run()
    return MotorcycleGraph(sim.moto, arena, sim.launched_at, tol)


class _Simulation:
    def __init__(self, motorcycles, arena, tol, max_launch_factor):
        self.moto = [Motorcycle(m.mid, m.origin, m.velocity, m.launch_time,
                                m.edge_a, m.edge_b, m.source)
                     for m in motorcycles]
        self.arena = arena
        self.tol = tol
        self.max_count = max(8, max_launch_factor * max(len(arena.edges), 1))
        self.walls = [(arena.edges[g][0], arena.edges[g][1], g)
                      for g in arena.wall_ids()]
        self.heap = []
        self.launched_at = {}
        self.event_serial = 0

    # -- candidate generation -------------------------------------------

    def _wall_hit(self, m):
        """Earliest wall crossing strictly after launch."""
        best_t, best_q, best_w = math.inf, None, None
        o, v, t0 = m.origin, m.velocity, m.launch_time
        t_eps = self.tol.length / max(m.speed, 1e-12)
        for (p, q, gid) in self.walls:
            d = sub2(q, p)
            den = cross2(v, d)
            if den == 0.0:
                continue
            w = sub2(p, o)
            dt = cross2(w, d) / den
            s = cross2(w, v) / den
            if dt <= t_eps or s < -1e-9 or s > 1.0 + 1e-9:
                continue
            t = t0 + dt
            if t < best_t:
                best_t, best_w = t, gid
                best_q = (o[0] + dt * v[0], o[1] + dt * v[1])
        return best_t, best_q, best_w

    def _pair_candidate(self, i, j):
        """Candidate crash events between motorcycles i and j; yields
        (t, point, rider, other)."""
        mi, mj = self.moto[i], self.moto[j]
        oi, vi, ti0 = mi.origin, mi.velocity, mi.launch_time
        oj, vj, tj0 = mj.origin, mj.velocity, mj.launch_time
        den = cross2(vi, vj)
        out = []
        if abs(den) <= 1e-14 * max(mi.speed * mj.speed, 1.0):
            # Parallel rays: only collinear ones interact.
            w = sub2(oj, oi)
            si = max(mi.speed, 1e-12)
            if abs(cross2(vi, w)) > self.tol.length * si:
                return out
            u = (vi[0] / si, vi[1] / si)
            # Position coincidence along the line (head-on or catch-up):
            # solve dot(u, o_i + (t-ti0) vi) = dot(u, o_j + (t-tj0) vj).
            dv = dot2(u, vi) - dot2(u, vj)
            if abs(dv) > 1e-14:
                a_i = dot2(u, oi) - ti0 * dot2(u, vi)
                a_j = dot2(u, oj) - tj0 * dot2(u, vj)
                t = (a_j - a_i) / dv
                if t > max(ti0, tj0):
                    q = mi.position(t)
                    out.append((t, q, i, j))
                    out.append((t, q, j, i))
            # A rider reaching the other's origin after its launch.
            for a, b in ((i, j), (j, i)):
                ma, mb = self.moto[a], self.moto[b]
                ta = ma.time_at(mb.origin)
                if ta > ma.launch_time and ta > mb.launch_time:
                    out.append((ta, mb.origin, a, b))
            return out
        w = sub2(oj, oi)
        # Crossing point: o_i + dti*vi = o_j + dtj*vj.
        dti = cross2(w, vj) / den
        dtj = cross2(w, vi) / den
        ti = ti0 + dti
        tj = tj0 + dtj
        if dti <= 0 or dtj <= 0:
            return out
        q = (oi[0] + dti * vi[0], oi[1] + dti * vi[1])
        out.append(((ti if ti >= tj else tj), q,
                    (i if ti >= tj else j), (j if ti >= tj else i)))
        if abs(ti - tj) <= self.tol.eps_abs + self.tol.eps_rel * max(ti, tj, 1.0):
            # Simultaneous: schedule both so the batch sees both riders.
            out.append((max(ti, tj), q,
                        (j if ti >= tj else i), (i if ti >= tj else j)))
        return out

    def _push(self, t, q, rider, cause):
        self.event_serial += 1
        heapq.heappush(self.heap, (t, round(q[0], 12), round(q[1], 12),
                                   rider, self.event_serial, cause))

    def _seed_candidates(self, i):
        t, q, w = self._wall_hit(self.moto[i])
        if q is not None:
            self._push(t, q, i, ("wall", w))
        for j in range(len(self.moto)):
            if j == i:
                continue
            for (t, q, rider, other) in self._pair_candidate(i, j):
                if rider == i or other == i:
                    self._push(t, q, rider, ("track", other))

    # -- event loop ------------------------------------------------------

    def run(self):
        n0 = len(self.moto)
        for i in range(n0):
            t, q, w = self._wall_hit(self.moto[i])
            if q is not None:
                self._push(t, q, i, ("wall", w))
            for j in range(i + 1, n0):
                for (t, q, rider, other) in self._pair_candidate(i, j):
                    self._push(t, q, rider, ("track", other))

        while self.heap:
            batch = self._pop_batch()
            for (t, q, events) in batch:
                self._process_point_event(t, q, events)

        for m in self.moto:
            if m.crash_time is None:
                m.crash_time = math.inf

    def _pop_batch(self):
        """Pop all events sharing (within tolerance) the time of the top
        event, grouped by location."""
        tol = self.tol
        first = heapq.heappop(self.heap)
        t0 = first[0]
        taken = [first]
        while self.heap and tol.same_time(self.heap[0][0], t0):
            taken.append(heapq.heappop(self.heap))
        groups = []
        for ev in taken:
            t, qx, qy, rider, _, cause = ev
            placed = False
            for g in groups:
                if tol.same_xy((qx, qy), g[1]):
                    g[2].append((rider, cause, t))
                    placed = True
                    break
            if not placed:
                groups.append((t, (qx, qy), [(rider, cause, t)]))
        return groups

    def _track_contains(self, j, q, t_rider):
        """Does j's realized track contain q strictly before t_rider?"""
        mj = self.moto[j]
        tj = mj.time_at(q)
        if tj < mj.launch_time - self.tol.eps_abs:
            return False, tj
        end = mj.crash_time if mj.crash_time is not None else t_rider
        if tj > end + self.tol.eps_abs:
            return False, tj
        # Off-ray guard.
        pos = mj.position(tj)
        if not self.tol.same_xy(pos, q):
            return False, tj
        return True, tj

    def _process_point_event(self, t, q, events):
        tol = self.tol
        arrivals = []   # (mid, cause) riders genuinely arriving at q now
        for rider, cause, te in events:
            m = self.moto[rider]
            if m.crash_time is not None:
                continue
            if not tol.same_xy(m.position(te), q):
                continue
            if cause[0] == "wall":
                arrivals.append((rider, cause))
            else:
                ok, tj = self._track_contains(cause[1], q, te)
                if not ok:
                    continue
                arrivals.append((rider, cause))
        if not arrivals:
            return
        seen = set()
        riders = []
        for rider, cause in arrivals:
            if rider not in seen:
                seen.add(rider)
                riders.append((rider, cause))

        if len(riders) == 1:
            rider, cause = riders[0]
            other = cause[1] if cause[0] == "track" else None
            if other is not None:
                mo = self.moto[other]
                to = mo.time_at(q)
                if tol.same_time(to, t) and mo.crash_time is None:
                    # The "track" is being laid right now: simultaneous.
                    riders.append((other, ("track", rider)))
        if len(riders) == 1:
            rider, cause = riders[0]
            m = self.moto[rider]
            m.crash_time = t
            m.crash_point = q
            m.stopped_by = cause
            return

        # Simultaneous multi-crash at q.
        key = ("multi", (round(q[0], 9), round(q[1], 9), round(t, 9)))
        mids = sorted(r for r, _ in riders)
        for r in mids:
            m = self.moto[r]
            m.crash_time = t
            m.crash_point = q
            m.stopped_by = key
        walls_here = self._walls_through(q)
        launched = self._launch_from_crash(q, t, mids, walls_here)
        self.launched_at[key[1]] = [m.mid for m in launched]

    def _walls_through(self, q):
        out = []
        for (p, r, gid) in self.walls:
            d = sub2(r, p)
            ln = norm2(d)
            u = (d[0] / ln, d[1] / ln)
            w = sub2(q, p)
            along = dot2(u, w)
            if -self.tol.length <= along <= ln + self.tol.length and \
                    abs(cross2(u, w)) <= 10 * self.tol.length:
                out.append(gid)
        return out

    def _launch_from_crash(self, q, t, mids, wall_gids):
        """Surviving wavefront components at a simultaneous crash; each
        component of angle >= pi (within tolerance) launches a rider."""
        arena = self.arena
        half_planes = []   # (inward normal, edge gid, hard?)
        for r in mids:
            m = self.moto[r]
            half_planes.append(("or", arena.inward(m.edge_a), m.edge_a,
                                arena.inward(m.edge_b), m.edge_b))
        for g in wall_gids:
            half_planes.append(("and", arena.inward(g), g, None, None))

        def unswept(u):
            for hp in half_planes:
                if hp[0] == "or":
                    if dot2(u, hp[1]) > 1e-12 or dot2(u, hp[3]) > 1e-12:
                        continue
                    return False
                else:
                    if dot2(u, hp[1]) > 1e-12:
                        continue
                    return False
            return True

        # Candidate boundary directions: the two directions along each
        # constraint line.  A constraint with inward normal at angle beta
        # can open a surviving component at direction beta - pi/2 or close
        # one at beta + pi/2.
        two_pi = 2 * math.pi
        entries = []   # (line direction angle, normal angle, gid)
        for hp in half_planes:
            items = [(hp[1], hp[2])]
            if hp[0] == "or":
                items.append((hp[3], hp[4]))
            for n, gid in items:
                beta = math.atan2(n[1], n[0]) % two_pi
                entries.append(((beta - math.pi / 2) % two_pi, beta, gid))
                entries.append(((beta + math.pi / 2) % two_pi, beta, gid))
        launched = []
        if not entries:
            return launched
        angles = []
        per_angle = []
        for a, beta, gid in sorted(entries):
            if angles and abs(a - angles[-1]) <= 1e-9:
                per_angle[-1].append((beta, gid))
            else:
                angles.append(a)
                per_angle.append([(beta, gid)])
        if len(angles) > 1 and abs(angles[0] + two_pi - angles[-1]) <= 1e-9:
            per_angle[0].extend(per_angle.pop())
            angles.pop()
        k = len(angles)
        arcs = []
        for idx in range(k):
            a0 = angles[idx]
            a1 = angles[(idx + 1) % k] + (two_pi if idx == k - 1 else 0.0)
            mid = (a0 + a1) / 2
            arcs.append(unswept((math.cos(mid), math.sin(mid))))
        if all(arcs) or not any(arcs):
            return launched

        def pick_gid(idx, want_normal_angle, avoid=None):
            best, best_err = per_angle[idx][0][1], math.inf
            for beta, gid in per_angle[idx]:
                err = abs((beta - want_normal_angle + math.pi) % two_pi - math.pi)
                if err < best_err - 1e-12 or \
                        (err < best_err + 1e-12 and best == avoid != gid):
                    best, best_err = gid, err
            return best

        starts = [idx for idx in range(k)
                  if arcs[idx] and not arcs[(idx - 1) % k]]
        for start in starts:
            end = start
            width = 0.0
            j = start
            while arcs[j]:
                a0 = angles[j]
                a1 = angles[(j + 1) % k] + (two_pi if j == k - 1 else 0.0)
                width += a1 - a0
                end = j
                j = (j + 1) % k
                if j == start:
                    break
            if width < math.pi - 1e-7:
                continue
            a_lo = angles[start]
            a_hi = angles[(end + 1) % k]
            gid_lo = pick_gid(start, (a_lo + math.pi / 2) % two_pi)
            # Flat components sit between two coplanar edges; make sure the
            # rider lists both, not one of them twice.
            gid_hi = pick_gid((end + 1) % k, (a_hi - math.pi / 2) % two_pi,
                              avoid=gid_lo)
            n_lo = arena.inward(gid_lo)
            n_hi = arena.inward(gid_hi)
            if width <= math.pi + 1e-7:
                # Flat gap: only the coplanar parallel-fronts case counts,
                # and never against a wall.
                if dot2(n_lo, n_hi) < 1.0 - 1e-7:
                    continue
                if gid_lo in wall_gids or gid_hi in wall_gids:
                    continue
            v = bisector_velocity(n_lo, n_hi)
            mid_angle = math.atan2(v[1], v[0])
            if not unswept((math.cos(mid_angle), math.sin(mid_angle))):
                continue
            mid = len(self.moto)
            if mid >= self.max_count:
                raise SimulationDiverged(
                    "launched %d motorcycles; tolerance pathology likely" % mid)
            m = Motorcycle(mid, q, v, t, gid_lo, gid_hi,
                           ("crash", (round(q[0], 9), round(q[1], 9), round(t, 9))))
            self.moto.append(m)
            launched.append(m)
            self._seed_candidates(mid)
        return launched
