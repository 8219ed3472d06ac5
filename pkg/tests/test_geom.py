import math

import pytest
from hypothesis import given, strategies as st

from sskel import geom
from sskel.geom import orient2d, slab_frame, Tol
from sskel.errors import DegenerateEdge

SQ2 = math.sqrt(2) / 2


def test_orient2d_basic():
    assert orient2d((0, 0), (1, 0), (0, 1)) == 1
    assert orient2d((0, 0), (1, 1), (2, 2)) == 0
    assert orient2d((0, 0), (0, 1), (1, 0)) == -1


def test_orient2d_antisymmetry():
    import random
    rng = random.Random(7)
    for _ in range(200):
        a = (rng.uniform(-5, 5), rng.uniform(-5, 5))
        b = (rng.uniform(-5, 5), rng.uniform(-5, 5))
        c = (rng.uniform(-5, 5), rng.uniform(-5, 5))
        s = orient2d(a, b, c)
        assert orient2d(b, a, c) == -s or s == 0
        assert orient2d(a, c, b) == -s or s == 0


def test_slab_frame_axis_edges():
    f = slab_frame((0, 0), (1, 0))
    assert f.E == (1.0, 0.0, 0.0)
    assert all(abs(a - b) < 1e-15 for a, b in zip(f.S, (0, SQ2, SQ2)))
    f = slab_frame((0, 0), (0, 1))
    assert f.E == (0.0, 1.0, 0.0)
    assert all(abs(a - b) < 1e-15 for a, b in zip(f.S, (-SQ2, 0, SQ2)))


def test_slab_frame_diagonal_edge():
    # Derived by solving the frame constraints numerically.
    f = slab_frame((0, 0), (1, 1))
    assert abs(geom.dot3(f.E, f.S)) <= 1e-12
    assert abs(geom.norm3(f.S) - 1) <= 1e-12
    assert abs(f.S[2] - SQ2) <= 1e-12
    assert abs(f.E[2]) == 0
    assert abs(f.S[0] + 0.5) <= 1e-12 and abs(f.S[1] - 0.5) <= 1e-12


def test_frame_invariants_random():
    import random
    rng = random.Random(3)
    for _ in range(100):
        p = (rng.uniform(-10, 10), rng.uniform(-10, 10))
        q = (rng.uniform(-10, 10), rng.uniform(-10, 10))
        if math.hypot(q[0] - p[0], q[1] - p[1]) < 1e-6:
            continue
        f = slab_frame(p, q)
        assert abs(geom.norm3(f.E) - 1) < 1e-12
        assert abs(geom.norm3(f.S) - 1) < 1e-12
        assert abs(geom.norm3(f.N) - 1) < 1e-12
        assert abs(geom.dot3(f.E, f.S)) < 1e-12
        assert abs(f.S[2] - SQ2) < 1e-12
        assert f.E[2] == 0.0


def test_zero_length_edge_needs_direction():
    with pytest.raises(DegenerateEdge):
        slab_frame((1, 1), (1, 1))
    f = slab_frame((1, 1), (1, 1), virtual_dir=(0, 1))
    assert f.E == (0.0, 1.0, 0.0)


def test_local_coords_identity():
    f = slab_frame((2, 3), (5, 3))
    assert f.local(f.world(0, 0)) == (0.0, 0.0)
    a, b = f.local(f.world(2, 3))
    assert abs(a - 2) < 1e-12 and abs(b - 3) < 1e-12


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_local_coords_roundtrip(a, b):
    f = slab_frame((0.5, -1.25), (3.5, 0.75))
    a2, b2 = f.local(f.world(a, b))
    scale = max(abs(a), abs(b), 1.0)
    assert abs(a2 - a) <= 1e-10 * scale
    assert abs(b2 - b) <= 1e-10 * scale


def test_local_coords_off_plane_raises():
    f = slab_frame((0, 0), (1, 0))
    p = geom.add3(f.world(0.5, 0.5), geom.mul3(f.N, 0.1))
    with pytest.raises(geom.OffPlane):
        f.local_checked(p, Tol())


def test_bisector_velocity_right_angle():
    # Convex right angle: speed sqrt(2) toward the corner's interior.
    v = geom.bisector_velocity((0, 1), (-1, 0))
    assert abs(v[0] + 1) < 1e-12 and abs(v[1] - 1) < 1e-12


def test_height_at_xy_is_distance_to_line():
    f = slab_frame((0, 0), (2, 0))
    assert abs(f.height_at_xy(0.7, 0.9) - 0.9) < 1e-15
    assert f.height_at_xy(0.7, -0.5) < 0
