import math

import pytest

from sskel.polygon import (build_polygon, build_pslg, Chain, split_chain,
                           interior_angle)
from sskel.errors import (NotWeaklySimple, TooFewVertices, NonPlanar,
                          DanglingSegment, ChainTooShort)


def test_unit_square():
    P = build_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert len(P) == 4
    assert sum(P.reflex) == 0
    assert not P.walk.virtual_dirs


def test_square_cw_input_is_reoriented():
    P = build_polygon([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert sum(P.reflex) == 0


def test_l_shape_reflex():
    P = build_polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
    assert len(P) == 6
    assert sum(P.reflex) == 1
    idx = P.reflex.index(True)
    assert P.points[idx] == (1.0, 1.0)
    assert abs(P.walk.interior_angles[idx] - 1.5 * math.pi) < 1e-12


def test_slit_polygon_gets_cap_edge():
    P = build_polygon([(0, 0), (4, 0), (4, 4), (0, 4), (0, 2), (2, 2), (0, 2)])
    assert len(P.walk.virtual_dirs) == 1
    zi = next(iter(P.walk.virtual_dirs))
    # Cap edge points clockwise-perpendicular to the incoming direction.
    assert P.walk.virtual_dirs[zi] == (0.0, -1.0)
    # The two cap corners are reflex with angle 3*pi/2.
    assert abs(P.walk.interior_angles[zi] - 1.5 * math.pi) < 1e-9
    assert abs(P.walk.interior_angles[zi + 1] - 1.5 * math.pi) < 1e-9


def test_exterior_turning_sums_to_two_pi():
    P = build_polygon([(0, 0), (3, 0), (3, 2), (2, 2), (2, 1), (1, 1),
                       (1, 2), (0, 2)])
    total = sum(math.pi - a for a in P.walk.interior_angles)
    assert abs(total - 2 * math.pi) < 1e-9


def test_reflex_matches_angle_scan():
    P = build_polygon([(0, 0), (3, 0), (3, 2), (2, 2), (2, 1), (1, 1),
                       (1, 2), (0, 2)])
    for i, theta in enumerate(P.walk.interior_angles):
        assert P.reflex[i] == (theta > math.pi + 1e-9)


def test_too_few_vertices():
    with pytest.raises(TooFewVertices):
        build_polygon([(0, 0), (1, 0)])


def test_self_crossing_rejected():
    with pytest.raises(NotWeaklySimple):
        build_polygon([(0, 0), (2, 2), (2, 0), (0, 2)])


def test_interior_angle_straight():
    assert abs(interior_angle((1, 0), (1, 0)) - math.pi) < 1e-12


# -- PSLG ------------------------------------------------------------------

def test_single_segment_pslg():
    G = build_pslg([(0, 0), (1, 0)], [(0, 1)])
    outer = G.faces[G.outer_face]
    assert len(outer.walks) == 1
    walk = outer.walks[0]
    # Two duplicated segment sides plus two zero-length caps.
    assert len(walk) == 4
    assert len(walk.virtual_dirs) == 2
    assert sum(walk.reflex) == 4


def test_t_junction_pslg():
    G = build_pslg([(0, 0), (1, 0), (-1, 0), (0, 1)],
                   [(0, 1), (0, 2), (0, 3)])
    outer = G.faces[G.outer_face]
    walk = outer.walks[0]
    # 6 duplicated sides + 3 caps at the tips.
    assert len(walk) == 9
    assert len(walk.virtual_dirs) == 3


def test_nested_squares_faces():
    pts = [(0, 0), (4, 0), (4, 4), (0, 4),
           (1, 1), (3, 1), (3, 3), (1, 3)]
    segs = [(0, 1), (1, 2), (2, 3), (3, 0),
            (4, 5), (5, 6), (6, 7), (7, 4)]
    G = build_pslg(pts, segs)
    assert len(G.faces) == 3
    sizes = sorted(sum(len(w) for w in f.walks) for f in G.faces)
    assert sizes == [4, 4, 8]
    annulus = next(f for f in G.faces
                   if sum(len(w) for w in f.walks) == 8 and not f.is_outer)
    assert len(annulus.walks) == 2


def test_pslg_crossing_rejected():
    with pytest.raises(NonPlanar):
        build_pslg([(0, 0), (2, 2), (0, 2), (2, 0)], [(0, 1), (2, 3)])


def test_pslg_zero_segment_rejected():
    with pytest.raises(DanglingSegment):
        build_pslg([(0, 0), (0, 0)], [(0, 1)])


# -- chains ------------------------------------------------------------------

def test_split_chain_even():
    a, b = split_chain(Chain([0, 1, 2, 3]))
    assert a.edge_ids == [0, 1] and b.edge_ids == [2, 3]


def test_split_chain_odd():
    a, b = split_chain(Chain([0, 1, 2, 3, 4]))
    assert {len(a), len(b)} == {2, 3}


def test_split_chain_weighted_groups():
    # Slab multiplicities [3,1,1,3]: balanced split is 4 vs 4 edges.
    ids = list(range(8))
    weights = [0, 0, 0, 1, 2, 3, 3, 3]
    a, b = split_chain(Chain(ids, weights))
    assert len(a) == 4 and len(b) == 4
    assert a.weights[-1] != b.weights[0]


def test_split_chain_too_short():
    with pytest.raises(ChainTooShort):
        split_chain(Chain([0]))
