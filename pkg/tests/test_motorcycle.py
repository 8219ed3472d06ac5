import math

import pytest

from sskel.polygon import build_polygon, build_pslg
from sskel.motorcycle import Arena, induce, simulate


def make_graph(loop):
    P = build_polygon(loop)
    arena = Arena([P.walk], P.tol)
    return P, arena, simulate(induce(arena), arena)


def test_convex_polygon_no_motorcycles():
    P = build_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    arena = Arena([P.walk], P.tol)
    assert induce(arena) == []


def test_l_shape_single_motorcycle():
    P, arena, mg = make_graph([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
    assert len(mg.motorcycles) == 1
    m = mg.motorcycles[0]
    assert abs(m.speed - math.sqrt(2)) < 1e-12
    assert m.velocity == (-1.0, -1.0)
    assert abs(m.crash_time - 1.0) < 1e-12
    assert m.crash_point == (0.0, 0.0)


def test_box_motorcycle_hits_opposite_wall():
    # Notch in the top edge of a wide box; rider goes straight down.
    P, arena, mg = make_graph(
        [(0, 0), (10, 0), (10, 5), (6, 5), (5, 4), (4, 5), (0, 5)])
    m = mg.motorcycles[0]
    assert len(mg.motorcycles) == 1
    assert abs(m.origin[0] - 5) < 1e-12 and abs(m.origin[1] - 4) < 1e-12
    assert abs(m.velocity[0]) < 1e-12 and m.velocity[1] < 0
    # distance 4 at its speed
    d = 4.0
    assert abs(m.crash_time - d / m.speed) < 1e-9
    assert abs(m.crash_point[1]) < 1e-9


def test_track_crash_ordering():
    # Two notches: the first rider lays a track, the second crashes on it.
    P, arena, mg = make_graph(
        [(0, 0), (12, 0), (12, 8), (7.5, 8), (7, 4), (6.5, 8),
         (4.2, 8), (4, 7.6), (3.8, 8), (0, 8)])
    ms = mg.motorcycles
    assert len(ms) == 2
    fast = min(ms, key=lambda m: m.crash_time)
    slow = max(ms, key=lambda m: m.crash_time)
    if slow.stopped_by[0] == "track":
        q = slow.crash_point
        t_on_track = fast.time_at(q)
        assert t_on_track < slow.crash_time
    # Track non-crossing invariant
    for m in ms:
        assert m.crash_time is not None


def test_mirror_head_on_convex_pinch():
    # Two reflex notches facing each other across y = 5; riders meet
    # head-on and both stop.  The pinched wavefront vertices are convex,
    # so no new rider starts.
    loop3 = [(0, 0), (4.5, 0), (5, 4), (5.5, 0), (10, 0),
             (10, 10), (5.5, 10), (5, 6), (4.5, 10), (0, 10)]
    P3, arena3, mg3 = make_graph(loop3)
    starters = [m for m in mg3.motorcycles if m.source[0] == "reflex"]
    launched = [m for m in mg3.motorcycles if m.source[0] == "crash"]
    assert len(starters) == 2
    assert launched == []
    a, b = starters
    assert abs(a.crash_time - b.crash_time) < 1e-9
    assert abs(a.crash_point[1] - 5.0) < 1e-9
    assert str(a.stopped_by[0]) == "multi"


def test_facing_slits_launch_axis_riders():
    # Two collinear slits cut into a box from the left and right.  The
    # diagonal cap riders collide pairwise on the symmetry axis leaving a
    # flat gap between parallel fronts: a unit-speed rider launches along
    # the axis on each side.
    loop = [(0, 0), (10, 0), (10, 5), (6, 5), (10, 5), (10, 10),
            (0, 10), (0, 5), (4, 5), (0, 5)]
    P, arena, mg = make_graph(loop)
    starters = [m for m in mg.motorcycles if m.source[0] == "reflex"]
    launched = [m for m in mg.motorcycles if m.source[0] == "crash"]
    assert len(starters) == 4          # two cap riders per slit tip
    assert len(launched) == 2          # one per side of the slit line
    vys = sorted(round(m.velocity[1], 9) for m in launched)
    assert vys == [-1.0, 1.0]
    for m in launched:
        assert abs(m.velocity[0]) < 1e-9
        assert abs(m.speed - 1.0) < 1e-9
        # Diagonal cap riders meet one unit above/below the slit line and
        # the new rider continues away from it.
        assert abs(m.origin[0] - 5.0) < 1e-9
        assert abs(abs(m.origin[1] - 5.0) - 1.0) < 1e-9
        assert (m.origin[1] - 5.0) * m.velocity[1] > 0


def test_single_segment_pslg_four_riders():
    G = build_pslg([(0, 0), (1, 0)], [(0, 1)])
    face = G.faces[G.outer_face]
    arena = Arena(face.walks, G.tol)
    ms = induce(arena)
    assert len(ms) == 4
    for m in ms:
        assert abs(m.speed - math.sqrt(2)) < 1e-12
    mg = simulate(ms, arena)
    for m in mg.motorcycles:
        assert m.escaped  # nothing to crash into
        # 45-degree diagonals
        assert abs(abs(m.velocity[0]) - 1) < 1e-12
        assert abs(abs(m.velocity[1]) - 1) < 1e-12


def test_determinism():
    loop = [(0, 0), (12, 0), (12, 8), (7.5, 8), (7, 4), (6.5, 8),
            (4.2, 8), (4, 7.6), (3.8, 8), (0, 8)]
    P1, a1, g1 = make_graph(loop)
    P2, a2, g2 = make_graph(loop)
    s1 = [(m.origin, m.velocity, m.crash_time, m.crash_point)
          for m in g1.motorcycles]
    s2 = [(m.origin, m.velocity, m.crash_time, m.crash_point)
          for m in g2.motorcycles]
    assert s1 == s2


def test_track_noncrossing_random():
    import random
    rng = random.Random(11)
    for trial in range(10):
        # Star-shaped polygon with random radii: plenty of reflex corners.
        n = 14
        pts = []
        for i in range(n):
            ang = 2 * math.pi * i / n
            r = 1.0 + rng.uniform(0, 1.5)
            pts.append((r * math.cos(ang), r * math.sin(ang)))
        P, arena, mg = make_graph(pts)
        tracks = []
        for m in mg.motorcycles:
            if m.crash_point is None:
                continue
            tracks.append((m.origin, m.crash_point, m))
        for i in range(len(tracks)):
            for j in range(i + 1, len(tracks)):
                (p1, q1, m1), (p2, q2, m2) = tracks[i], tracks[j]
                from sskel.geom import seg_intersect_2d
                hit = seg_intersect_2d(p1, q1, p2, q2)
                if hit is None:
                    continue
                s, t = hit
                inside = 1e-7 < s < 1 - 1e-7 and 1e-7 < t < 1 - 1e-7
                if inside:
                    # A transversal meeting point must be a crash site of
                    # the later rider on the earlier track.
                    x = (p1[0] + s * (q1[0] - p1[0]),
                         p1[1] + s * (q1[1] - p1[1]))
                    t1 = m1.time_at(x)
                    t2 = m2.time_at(x)
                    later = m1 if t1 > t2 else m2
                    assert P.tol.same_xy(later.crash_point, x)
