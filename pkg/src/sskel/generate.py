"""Seeded generators for test and benchmark instances."""

import math
import random

from .geom import seg_intersect_2d, sub2, norm2


def random_simple_polygon(n, seed, box=10.0):
    """Random simple polygon: a random tour of random points, uncrossed
    by 2-opt moves.  Intended for small n (quadratic uncrossing)."""
    rng = random.Random(seed)
    while True:
        pts = [(rng.uniform(0, box), rng.uniform(0, box)) for _ in range(n)]
        tour = list(range(n))
        rng.shuffle(tour)
        if _uncross(pts, tour):
            loop = [pts[i] for i in tour]
            if _no_near_degeneracy(loop):
                return loop


def _uncross(pts, tour, max_passes=4000):
    n = len(tour)
    for _ in range(max_passes):
        crossed = False
        for i in range(n):
            a1 = pts[tour[i]]
            a2 = pts[tour[(i + 1) % n]]
            for j in range(i + 2, n):
                if (j + 1) % n == i:
                    continue
                b1 = pts[tour[j]]
                b2 = pts[tour[(j + 1) % n]]
                hit = seg_intersect_2d(a1, a2, b1, b2)
                if hit is None:
                    continue
                s, t = hit
                if 1e-12 < s < 1 - 1e-12 and 1e-12 < t < 1 - 1e-12:
                    # 2-opt: reverse the sub-tour between the two edges
                    lo, hi = i + 1, j
                    while lo < hi:
                        tour[lo], tour[hi] = tour[hi], tour[lo]
                        lo += 1
                        hi -= 1
                    crossed = True
                    break
            if crossed:
                break
        if not crossed:
            return True
    return False


def _no_near_degeneracy(loop, min_angle=0.02, min_edge=1e-3):
    n = len(loop)
    for i in range(n):
        p = loop[i]
        q = loop[(i + 1) % n]
        if norm2(sub2(q, p)) < min_edge:
            return False
    for i in range(n):
        a, b, c = loop[i - 1], loop[i], loop[(i + 1) % n]
        u, v = sub2(b, a), sub2(c, b)
        nu, nv = norm2(u), norm2(v)
        s = abs(u[0] * v[1] - u[1] * v[0]) / (nu * nv)
        if s < min_angle:
            return False
    return True


def random_star_polygon(n, seed, r_lo=1.0, r_hi=2.2):
    """Star-shaped polygon with random radii: simple by construction and
    cheap at any size; about a third of the vertices are reflex."""
    rng = random.Random(seed)
    pts = []
    for i in range(n):
        ang = 2 * math.pi * i / n
        r = rng.uniform(r_lo, r_hi)
        pts.append((r * math.cos(ang), r * math.sin(ang)))
    return pts


def regular_polygon(k, radius=1.0, phase=0.3):
    return [(radius * math.cos(2 * math.pi * i / k + phase),
             radius * math.sin(2 * math.pi * i / k + phase))
            for i in range(k)]


def comb_polygon(teeth, tooth_w=1.0, tooth_h=4.0, gap=1.0):
    """Comb with deep notches from the top; two reflex vertices per
    notch, so r = Theta(n)."""
    width = teeth * (tooth_w + gap) + tooth_w
    top = tooth_h + 1.0
    pts = [(0.0, 0.0), (width, 0.0), (width, top)]
    x = width - tooth_w
    for _ in range(teeth):
        pts.append((x, top))
        pts.append((x, 1.0))
        x -= gap
        pts.append((x, 1.0))
        pts.append((x, top))
        x -= tooth_w
    pts.append((0.0, top))
    return _dedupe(pts)


def spiral_polygon(n, coil=0.55, width_frac=0.42, step=0.5):
    """Archimedean spiral corridor with about n vertices; half the
    corners on the inner wall are reflex."""
    half = max(4, n // 2)
    theta_max = half * step
    fwd = []
    back = []
    w = coil * step * width_frac * 2
    for i in range(half + 1):
        th = i * step
        r = 1.0 + coil * th
        fwd.append((r * math.cos(th), r * math.sin(th)))
        back.append(((r + w) * math.cos(th), (r + w) * math.sin(th)))
    return _dedupe(fwd + list(reversed(back)))


def _dedupe(pts):
    out = []
    for p in pts:
        if not out or abs(p[0] - out[-1][0]) > 1e-9 or \
                abs(p[1] - out[-1][1]) > 1e-9:
            out.append(p)
    return out


def facing_slits_polygon(width=10.0, height=10.0, depth=4.0):
    """Box with two collinear slits; the cap riders collide head-on and
    launch axis riders (the degenerate multi-crash fixture)."""
    h2 = height / 2
    return [(0, 0), (width, 0), (width, h2), (width - depth, h2),
            (width, h2), (width, height), (0, height), (0, h2),
            (depth, h2), (0, h2)]


def mirror_notches_polygon(width=10.0, height=10.0, notch=4.0,
                           half_open=0.5):
    """Mirror-symmetric double notch; the two riders crash head-on."""
    cx = width / 2
    return [(0, 0), (cx - half_open, 0), (cx, notch), (cx + half_open, 0),
            (width, 0), (width, height),
            (cx + half_open, height), (cx, height - notch),
            (cx - half_open, height), (0, height)]


# ---------------------------------------------------------------------------
# PSLGs

def nested_squares(m, size=16.0, shrink=0.62):
    """m concentric square rings; the face between ring i and ring i+1
    has two boundary components."""
    vertices = []
    segments = []
    half = size / 2
    for i in range(m):
        s = half * (shrink ** i)
        base = len(vertices)
        vertices.extend([(-s, -s), (s, -s), (s, s), (-s, s)])
        segments.extend([(base, base + 1), (base + 1, base + 2),
                         (base + 2, base + 3), (base + 3, base)])
    return vertices, segments


def square_grid_obstacles(k, cell=4.0, box=1.6):
    """k x k grid of small squares (m = k*k boundary components)."""
    vertices = []
    segments = []
    for i in range(k):
        for j in range(k):
            cx = i * cell
            cy = j * cell
            b = len(vertices)
            h = box / 2
            vertices.extend([(cx - h, cy - h), (cx + h, cy - h),
                             (cx + h, cy + h), (cx - h, cy + h)])
            segments.extend([(b, b + 1), (b + 1, b + 2),
                             (b + 2, b + 3), (b + 3, b)])
    return vertices, segments


def random_segment_soup(n_segments, seed, box=10.0, min_len=0.6):
    """Disjoint random segments (no crossings, no shared endpoints)."""
    rng = random.Random(seed)
    segs = []
    guard = 0
    while len(segs) < n_segments and guard < 20000:
        guard += 1
        p = (rng.uniform(0, box), rng.uniform(0, box))
        ang = rng.uniform(0, 2 * math.pi)
        ln = rng.uniform(min_len, 2.5)
        q = (p[0] + ln * math.cos(ang), p[1] + ln * math.sin(ang))
        ok = True
        for (a, b) in segs:
            hit = seg_intersect_2d(p, q, a, b)
            if hit is not None:
                s, t = hit
                if -0.05 < s < 1.05 and -0.05 < t < 1.05:
                    ok = False
                    break
            # keep endpoints apart as well
            for u in (p, q):
                for v in (a, b):
                    if norm2(sub2(u, v)) < 0.2:
                        ok = False
            if not ok:
                break
        if ok:
            segs.append((p, q))
    vertices = []
    segments = []
    for (p, q) in segs:
        b = len(vertices)
        vertices.extend([p, q])
        segments.append((b, b + 1))
    return vertices, segments


def t_junction():
    return [(0.0, 0.0), (2.0, 0.1), (-2.0, -0.1), (0.1, 2.0)], \
        [(0, 1), (0, 2), (0, 3)]
