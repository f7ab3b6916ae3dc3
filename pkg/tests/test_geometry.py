import math

import numpy as np
import pytest
import shapely
from hypothesis import given, strategies as st

from tesserae.geometry import (
    GeometryError,
    LinearMap,
    Patch,
    Point2,
    Polygon,
    Prototile,
    RigidMotion,
    SpatialIndex,
    Tile,
    adjacent_pairs,
    compose,
    interiors_disjoint,
    intersection_areas,
    neighbors,
    overlapping_pairs,
    patch_from_arrays,
    patches_equal,
    shared_boundary_length,
)

from oracles import all_pairs_adjacent

angles = st.floats(0, 2 * math.pi, allow_nan=False)
coords = st.floats(-50, 50, allow_nan=False)


@st.composite
def motions(draw):
    m = RigidMotion.rotation(draw(angles), (draw(coords), draw(coords)))
    if draw(st.booleans()):
        m = m @ RigidMotion(LinearMap(1.0, 0.0, 0.0, -1.0))
    return m


@given(motions(), motions(), coords, coords)
def test_compose_matches_homogeneous_product(m1, m2, x, y):
    c = compose(m1, m2)
    H = m1.homogeneous() @ m2.homogeneous()
    assert np.allclose(c.homogeneous(), H, atol=1e-9)
    assert np.allclose(c((x, y)), m1(m2((x, y))), atol=1e-9)


@given(motions(), coords, coords)
def test_inverse_round_trip(m, x, y):
    p = m.inverse()(m((x, y)))
    assert math.dist(p, (x, y)) < 1e-9


def test_rigid_motion_rejects_shear():
    with pytest.raises(GeometryError):
        RigidMotion(LinearMap(1.0, 0.5, 0.0, 1.0))


@pytest.mark.parametrize(
    "pts",
    [
        [(0, 0), (1, 0)],
        [(0, 0), (1, 0), (2, 0)],
        [(0, 0), (0, 1), (1, 0)],  # clockwise
        [(0, 0), (2, 0), (0, 2), (2, 2)],  # self-crossing
    ],
)
def test_polygon_rejects_bad_input(pts):
    with pytest.raises(GeometryError):
        Polygon(tuple(pts))


def test_prototile_needs_origin_vertex():
    with pytest.raises(GeometryError):
        Prototile("A", Polygon.rectangle(1, 1, 1, 1))


def _square(pid="S"):
    return Prototile(pid, Polygon.rectangle(0, 0, 1, 1))


@given(st.floats(-0.9, 0.9), st.floats(0.2, 3.0), st.integers(0, 3))
def test_shared_boundary_matches_shapely(offset, height, side):
    sq = _square()
    rect = Prototile("R", Polygon.rectangle(0, 0, 1, height))
    # put the rectangle against one side of the square, slid along it by ``offset``
    moves = [(1.0, offset), (-1.0, offset), (offset, 1.0), (offset, -height)]
    t1 = Tile(sq)
    t2 = Tile(rect, RigidMotion.translate(*moves[side]))
    ours = shared_boundary_length(t1, t2)
    ref = shapely.intersection(t1.support.to_shapely().boundary, t2.support.to_shapely().boundary).length
    assert ours == pytest.approx(ref, abs=1e-9)


def test_corner_contact_is_not_adjacent():
    t1 = Tile(_square())
    t2 = Tile(_square(), RigidMotion.translate(1, 1))
    assert shared_boundary_length(t1, t2) == 0.0
    assert interiors_disjoint(t1, t2)


def test_overlap_detected():
    t1 = Tile(_square())
    t2 = Tile(_square(), RigidMotion.translate(0.5, 0.25))
    assert not interiors_disjoint(t1, t2)
    (i, j, area), = overlapping_pairs(Patch((t1, t2)))
    assert area == pytest.approx(0.375)


def test_intersection_areas_shared_edge_with_rounding_noise():
    # two triangles across a diagonal whose endpoints differ in the last bits
    a = shapely.Polygon([(0, 0), (2, 0), (2, 1.0000000000000002)])
    b = shapely.Polygon([(0, 0), (2, 1), (0, 1)])
    got = intersection_areas(np.array([a]), np.array([b]), 2.0)[0]
    assert got < 1e-9


def _grid_patch(n):
    sq = _square()
    return Patch(tuple(Tile(sq, RigidMotion.translate(x, y)) for x in range(n) for y in range(n)))


def test_adjacent_pairs_grid_count():
    p = _grid_patch(5)
    assert len(adjacent_pairs(p)) == 2 * 5 * 4


@given(st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), min_size=2, max_size=30, unique=True))
def test_neighbors_match_brute_force(cells):
    sq = _square()
    p = Patch(tuple(Tile(sq, RigidMotion.translate(x, y)) for x, y in cells))
    idx = SpatialIndex(p)
    brute = all_pairs_adjacent(p)
    for i in range(len(p)):
        want = sorted({b for a, b in brute if a == i} | {a for a, b in brute if b == i})
        assert sorted(neighbors(idx, p, i)) == want


def test_spatial_index_query_finds_overlapping_boxes():
    p = _grid_patch(4)
    idx = SpatialIndex(p, cell_size=0.7)
    hits = set(idx.query((1.5, 1.5, 1.6, 1.6), 0.0))
    assert {i for i, t in enumerate(p) if t.placement.translation == Point2(1.0, 1.0)} <= hits


def test_patch_from_arrays_orders_canonically():
    sq = _square()
    ids = np.zeros(3, dtype=int)
    lin = np.tile(np.eye(2), (3, 1, 1))
    trans = np.array([[2.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    p, order = patch_from_arrays([sq], ids, lin, trans)
    assert list(order) == [2, 0, 1]
    assert patches_equal(p, p.canonical())


def test_vertex_array_matches_supports():
    sq = _square()
    tri = Prototile("T", Polygon(((0, 0), (2, 0), (0, 1))))
    p = Patch(
        (
            Tile(tri, RigidMotion.rotation(0.3, (1, 2))),
            Tile(sq, RigidMotion(LinearMap(1.0, 0.0, 0.0, -1.0), Point2(5, 5))),
        )
    )
    v, nv = p.vertex_array
    for k, t in enumerate(p):
        assert np.allclose(v[k, : nv[k]], np.array(t.support.vertices))
