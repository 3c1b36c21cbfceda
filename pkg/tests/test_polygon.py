import pytest
from conftest import saps_of_length, saps_up_to
from hypothesis import given
from hypothesis import strategies as st

import oracle
from sapforge.lattice import Plaquette
from sapforge.polygon import (
    Polygon,
    PolygonError,
    Walk,
    classify,
    global_join_plaquettes,
    global_split,
    is_join_plaquette,
    join_plaquettes,
    plaquette_delta,
    plaquette_join,
    split_at,
    validate_polygon,
)

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]
small_polygons = st.sampled_from(saps_up_to(10))
offsets = st.tuples(st.integers(-20, 20), st.integers(-20, 20))


def _anchored(edges):
    lo = min(min(e) for e in edges)
    return frozenset(frozenset((p[0] - lo[0], p[1] - lo[1]) for p in e) for e in edges)


@pytest.mark.parametrize("n", [4, 6, 8, 10])
def test_enumerated_polygons_match_brute_force_edge_sets(n):
    ours = {_anchored(p.edges) for p in saps_of_length(n)}
    assert len(ours) == len(saps_of_length(n))
    assert ours == {_anchored(e) for e in oracle.polygon_edge_sets(n)}


def test_from_cycle_rejects_malformed_input():
    with pytest.raises(PolygonError) as exc:
        Polygon.from_cycle([(0, 0), (1, 0), (0, 0)])
    assert exc.value.code == "too-short"
    with pytest.raises(PolygonError) as exc:
        Polygon.from_cycle([(0, 0), (2, 0), (2, 1), (0, 1)])
    assert exc.value.code == "bad-edge"
    with pytest.raises(PolygonError) as exc:
        Polygon.from_cycle([(0, 0), (1, 0), (1, 1), (0, 1), (0, 0), (1, 0)])
    assert exc.value.code == "bad-degree"


def test_validate_polygon_rejects_two_squares():
    far = [((5, 0), (6, 0)), ((6, 0), (6, 1)), ((5, 1), (6, 1)), ((5, 0), (5, 1))]
    with pytest.raises(PolygonError) as exc:
        validate_polygon(list(Plaquette((0, 0)).edges()) + far)
    assert exc.value.code == "multiple-components"


def test_validate_polygon_rejects_a_dangling_edge():
    edges = list(Plaquette((0, 0)).edges()) + [((1, 0), (2, 0))]
    with pytest.raises(PolygonError) as exc:
        validate_polygon(edges)
    assert exc.value.code == "bad-degree"


@given(small_polygons, offsets)
def test_equality_is_by_translation_class(poly, shift):
    moved = poly.translated(*shift)
    assert moved == poly and hash(moved) == hash(poly)
    assert moved.same_position(poly) == (shift == (0, 0))
    assert moved.normalized().same_position(poly.normalized())


@given(small_polygons, offsets)
def test_json_round_trip_keeps_position(poly, shift):
    moved = poly.translated(*shift)
    back = Polygon.from_json(moved.to_json())
    assert back.same_position(moved)


@given(small_polygons)
def test_edge_set_round_trip(poly):
    assert validate_polygon(poly.edges).same_position(poly)
    assert len(poly.edges) == poly.length == len(poly.vertices)


@given(small_polygons)
def test_right_tip_is_the_lowest_eastmost_vertex(poly):
    tip = poly.corner("ES")
    assert tip[0] == poly.xmax
    assert tip[1] == min(p[1] for p in poly.vertices if p[0] == poly.xmax)


def test_left_right_classification_examples():
    tall = Polygon.from_cycle([(0, 0), (1, 0), (1, 1), (1, 2), (0, 2), (0, 1)])
    wide = Polygon.from_cycle([(0, 0), (1, 0), (2, 0), (2, 1), (1, 1), (0, 1)])
    assert classify(tall) == {"is_left": True, "is_right": True}
    assert classify(wide) == {"is_left": False, "is_right": False}


@given(small_polygons)
def test_left_polygons_are_right_polygons(poly):
    c = classify(poly)
    assert not c["is_left"] or c["is_right"]


@given(small_polygons)
def test_join_plaquettes_split_and_rejoin(poly):
    for plaq in join_plaquettes(poly):
        assert is_join_plaquette(poly, plaq)
        a, b = split_at(poly, plaq)
        assert a.length + b.length == poly.length
        assert not (a.vertices & b.vertices)
        assert plaquette_join(a, b, plaq).same_position(poly)
        assert plaquette_delta((a, b), plaq).same_position(poly)


def _brute_global(poly, plaq):
    # Naive restatement: one half holds the NE vertex, the other holds
    # every vertex on the eastmost column.
    a, b = split_at(poly, plaq)
    ne = max(poly.vertices, key=lambda p: (p[1], p[0]))
    east = {p for p in poly.vertices if p[0] == poly.xmax}
    return (ne in a.vertices and east <= b.vertices) or (ne in b.vertices and east <= a.vertices)


@given(small_polygons)
def test_global_join_plaquettes_match_definition(poly):
    expected = [p for p in join_plaquettes(poly) if _brute_global(poly, p)]
    assert global_join_plaquettes(poly) == expected
    for plaq in expected:
        left, right = global_split(poly, plaq)
        assert poly.ne in left.vertices


def test_split_rejects_a_plaquette_that_is_not_a_join_plaquette():
    square = Polygon.from_cycle(SQUARE)
    with pytest.raises(PolygonError) as exc:
        split_at(square, Plaquette((0, 0)))
    assert exc.value.code == "not-a-join-plaquette"


def test_walk_multiplicity_and_self_avoidance():
    w = Walk([(0, 0), (1, 0), (0, 0)], check=False)
    assert not w.is_self_avoiding
    assert w.edge_multiplicity()[((0, 0), (1, 0))] == 2
    assert Walk([(0, 0), (1, 0), (1, 1)]).is_self_avoiding
