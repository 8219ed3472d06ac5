"""Lower envelopes of non-vertical line segments in the plane.

Used for three jobs: trimming slab boundary chains, intersecting a
vertical plane with the roof over a cell (the divide-and-conquer
O(k log k) route), and the brute-force pairwise oracle the tests compare
against.

An envelope is a sorted, non-overlapping list of pieces
``(x0, x1, y0, slope, tag)``.  ``x0`` may be -inf and ``x1`` +inf; ``y0``
is the value at ``x0``, or at x=0 when ``x0`` is -inf.  Gaps between
pieces mean "+inf there".
"""

import math

INF = math.inf


class Piece:
    __slots__ = ("x0", "x1", "y0", "slope", "tag")

    def __init__(self, x0, x1, y0, slope, tag):
        self.x0 = x0
        self.x1 = x1
        self.y0 = y0
        self.slope = slope
        self.tag = tag

    def value(self, x):
        if math.isinf(self.x0):
            return self.y0 + self.slope * x
        return self.y0 + self.slope * (x - self.x0)

    def copy(self):
        return Piece(self.x0, self.x1, self.y0, self.slope, self.tag)

    def __repr__(self):
        return "Piece(%g..%g h0=%g s=%g tag=%r)" % (
            self.x0, self.x1, self.y0, self.slope, self.tag)


def segment_piece(x0, y0, x1, y1, tag):
    """Piece for a finite non-vertical segment (returns None when the
    x-extent is empty)."""
    if x1 < x0:
        x0, y0, x1, y1 = x1, y1, x0, y0
    if x1 - x0 <= 0.0:
        return None
    return Piece(x0, x1, y0, (y1 - y0) / (x1 - x0), tag)


def ray_piece(anchor_x, anchor_y, slope, tag, direction):
    """Ray from a finite anchor to x=+inf (direction>0) or -inf."""
    if direction > 0:
        return Piece(anchor_x, INF, anchor_y, slope, tag)
    return Piece(-INF, anchor_x, anchor_y - slope * anchor_x, slope, tag)


def envelope_of_pieces(pieces):
    items = [p for p in pieces if p is not None]
    if not items:
        return []
    if len(items) == 1:
        return [items[0].copy()]
    mid = len(items) // 2
    return merge_envelopes(envelope_of_pieces(items[:mid]),
                           envelope_of_pieces(items[mid:]))


def merge_envelopes(env_a, env_b):
    if not env_a:
        return [p.copy() for p in env_b]
    if not env_b:
        return [p.copy() for p in env_a]
    xs = set()
    for env in (env_a, env_b):
        for p in env:
            xs.add(p.x0)
            xs.add(p.x1)
    xs = sorted(xs)
    out = []
    ia = ib = 0
    for k in range(len(xs) - 1):
        x_lo, x_hi = xs[k], xs[k + 1]
        if not x_hi > x_lo:
            continue
        while ia < len(env_a) and env_a[ia].x1 <= x_lo:
            ia += 1
        while ib < len(env_b) and env_b[ib].x1 <= x_lo:
            ib += 1
        pa = env_a[ia] if ia < len(env_a) and env_a[ia].x0 <= x_lo else None
        pb = env_b[ib] if ib < len(env_b) and env_b[ib].x0 <= x_lo else None
        if pa is None and pb is None:
            continue
        if pa is None or pb is None:
            _emit(out, x_lo, x_hi, pa if pb is None else pb)
            continue
        if math.isinf(x_lo):
            x_ref = x_hi - 1.0 if not math.isinf(x_hi) else 0.0
        elif math.isinf(x_hi):
            x_ref = x_lo + 1.0
        else:
            x_ref = 0.5 * (x_lo + x_hi)
        ya, yb = pa.value(x_ref), pb.value(x_ref)
        dslope = pa.slope - pb.slope
        if abs(dslope) <= 1e-15:
            _emit(out, x_lo, x_hi, pa if ya <= yb else pb)
            continue
        xc = x_ref + (yb - ya) / dslope
        if not (x_lo < xc < x_hi):
            _emit(out, x_lo, x_hi, pa if ya <= yb else pb)
            continue
        left_ref = x_lo + 0.5 * (xc - x_lo) if not math.isinf(x_lo) else xc - 1.0
        lower_left = pa if pa.value(left_ref) <= pb.value(left_ref) else pb
        lower_right = pb if lower_left is pa else pa
        _emit(out, x_lo, xc, lower_left)
        _emit(out, xc, x_hi, lower_right)
    return out


def _emit(out, x_lo, x_hi, src):
    if not x_hi > x_lo:
        return
    if math.isinf(x_lo):
        piece = Piece(-INF, x_hi, src.value(0.0), src.slope, src.tag)
    else:
        piece = Piece(x_lo, x_hi, src.value(x_lo), src.slope, src.tag)
    if out:
        last = out[-1]
        if (last.tag == piece.tag and abs(last.slope - piece.slope) <= 1e-12
                and last.x1 == piece.x0):
            last.x1 = piece.x1
            return
    out.append(piece)


def envelope_value(env, x):
    """(value, tag) at x, or (inf, None) inside a gap."""
    lo, hi = 0, len(env)
    while lo < hi:
        mid = (lo + hi) // 2
        if env[mid].x1 < x:
            lo = mid + 1
        else:
            hi = mid
    if lo < len(env) and env[lo].x0 <= x <= env[lo].x1:
        return env[lo].value(x), env[lo].tag
    return INF, None


def envelope_breakpoints(env, tol_y=1e-7):
    """x-values where adjacent pieces with different tags meet with equal
    value: the true lower-envelope intersections.  Gap edges excluded."""
    out = []
    for i in range(len(env) - 1):
        a, b = env[i], env[i + 1]
        if a.x1 != b.x0 or math.isinf(a.x1):
            continue
        ya, yb = a.value(a.x1), b.value(b.x0)
        if a.tag != b.tag and abs(ya - yb) <= tol_y * max(1.0, abs(ya)):
            out.append((a.x1, a.tag, b.tag))
    return out
