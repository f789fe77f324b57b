import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convexdecomp.geom import (
    COORD_LIMIT,
    GeneralPositionError,
    GeometryInputError,
    PointSet,
    brute_force_hull,
    convex_hull,
    cross,
    general_position,
    in_open_wedge,
    is_strictly_convex,
    orient,
    orient_many,
    strictly_inside_triangle,
    twice_area,
)

SQUARE_CENTER = [(0, 0), (4, 0), (4, 4), (0, 4), (2, 1)]


def brute_general_position(pts):
    for a, b, c in itertools.combinations(range(len(pts)), 3):
        if cross(pts[a], pts[b], pts[c]) == 0:
            return (a, b, c)
    return None


def random_general(rng, n, R=1000):
    while True:
        pts = list({(rng.randint(-R, R), rng.randint(-R, R)) for _ in range(n)})
        if len(pts) == n and brute_general_position(pts) is None:
            return pts


# ---------------------------------------------------------------- orient

def test_orient_examples():
    assert orient((0, 0), (1, 0), (0, 1)) == 1
    assert orient((0, 0), (1, 1), (2, 2)) == 0
    assert orient((0, 0), (0, 1), (1, 0)) == -1


def test_orient_rejects_large_or_non_integer_coordinates():
    with pytest.raises(GeometryInputError):
        orient((0, 0), (COORD_LIMIT + 1, 0), (0, 1))
    with pytest.raises(GeometryInputError):
        orient((0, 0), (0.5, 0), (0, 1))


def test_orient_exact_at_the_coordinate_limit():
    L = COORD_LIMIT
    a, b, c = (-L, -L), (L, L - 1), (L - 1, L)
    assert orient(a, b, c) == 1
    xs = np.array([c[0]], dtype=np.int64)
    ys = np.array([c[1]], dtype=np.int64)
    assert orient_many(a, b, xs, ys)[0] == 1


coord = st.integers(-COORD_LIMIT, COORD_LIMIT)
point = st.tuples(coord, coord)


@given(point, point, point)
def test_orient_antisymmetric(a, b, c):
    s = orient(a, b, c)
    assert orient(b, a, c) == -s
    assert orient(a, c, b) == -s
    assert orient(b, c, a) == s


@given(point, point, st.lists(point, min_size=1, max_size=20))
def test_orient_many_matches_scalar(a, b, cs):
    xs = np.array([c[0] for c in cs], dtype=np.int64)
    ys = np.array([c[1] for c in cs], dtype=np.int64)
    assert orient_many(a, b, xs, ys).tolist() == [orient(a, b, c) for c in cs]


# ---------------------------------------------------------------- point sets

def test_pointset_validates_coordinates():
    with pytest.raises(GeometryInputError):
        PointSet([(0, 0), (1, 2, 3)])
    with pytest.raises(GeometryInputError):
        PointSet([(0, 0), (True, 1)])
    assert PointSet([(0, 0), (4, 0), (0, 4)]).n == 3


def test_checked_reports_collinear_triple():
    with pytest.raises(GeneralPositionError) as exc:
        PointSet.checked([(0, 0), (1, 1), (2, 2), (5, 0)])
    assert exc.value.triple == (0, 1, 2)
    assert "0, 1, 2" in str(exc.value)


# ---------------------------------------------------------------- general position

def test_general_position_examples():
    assert general_position(PointSet([(0, 0), (4, 0), (0, 4)])) is None
    assert general_position(PointSet([(0, 0), (1, 1), (2, 2), (5, 0)])) == (0, 1, 2)
    assert general_position(PointSet(SQUARE_CENTER)) is None
    # the exhaustive check agrees on the last example
    assert brute_general_position(SQUARE_CENTER) is None


def test_general_position_reports_lexicographically_first_triple():
    # (1, 2, 5) and (3, 4, 5) are both collinear; (1, 2, 5) comes first
    pts = [(0, 0), (10, 3), (7, 1), (1, 5), (7, 5), (13, 5)]
    assert cross(pts[1], pts[2], pts[5]) == 0
    assert cross(pts[3], pts[4], pts[5]) == 0
    assert general_position(PointSet(pts)) == (1, 2, 5)
    assert brute_general_position(pts) == (1, 2, 5)


def test_duplicates_surface_as_degenerate_triples():
    assert general_position(PointSet([(0, 0), (3, 1), (0, 0), (5, 7)])) == (0, 1, 2)
    assert general_position(PointSet([(1, 1), (1, 1)])) == (0, 1)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=0, max_size=9))
def test_general_position_matches_brute_force(pts):
    got = general_position(PointSet(pts))
    if len(pts) < 3:
        if len(pts) == 2 and pts[0] == pts[1]:
            assert got == (0, 1)
        else:
            assert got is None
    else:
        assert got == brute_general_position(pts)


# ---------------------------------------------------------------- hulls

def test_convex_hull_examples():
    assert convex_hull(PointSet([(0, 0), (4, 0), (0, 4)])) == [0, 1, 2]
    assert convex_hull(PointSet(SQUARE_CENTER)) == [0, 1, 2, 3]


def test_convex_hull_seed_7_matches_naive():
    rng = random.Random(7)
    ps = PointSet(random_general(rng, 7))
    assert convex_hull(ps) == brute_force_hull(ps)


def test_convex_hull_starts_at_lexicographic_minimum_and_turns_left():
    rng = random.Random(3)
    pts = random_general(rng, 40)
    ps = PointSet(pts)
    hull = convex_hull(ps)
    assert pts[hull[0]] == min(pts)
    m = len(hull)
    assert all(cross(pts[hull[k - 2]], pts[hull[k - 1]], pts[hull[k]]) > 0 for k in range(m))
    rest = set(range(len(pts))) - set(hull)
    for r in rest:
        assert all(cross(pts[hull[k - 1]], pts[hull[k]], pts[r]) > 0 for k in range(m))


def test_convex_hull_subset_and_errors():
    ps = PointSet(SQUARE_CENTER)
    assert convex_hull(ps, [0, 1, 4]) == [0, 1, 4]
    with pytest.raises(GeometryInputError):
        convex_hull(ps, [0, 1])


def test_large_hull_prefilter_agrees_with_naive():
    rng = random.Random(11)
    for _ in range(5):
        pts = random_general(rng, 90, R=300)
        ps = PointSet(pts)
        assert convex_hull(ps) == brute_force_hull(ps)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32), st.integers(3, 14))
def test_convex_hull_permutation_invariant(seed, n):
    rnd = random.Random(seed)
    pts = random_general(rnd, n, R=50)
    ps = PointSet(pts)
    hull = [pts[k] for k in convex_hull(ps)]
    shuffled = pts[:]
    rnd.shuffle(shuffled)
    ps2 = PointSet(shuffled)
    assert [shuffled[k] for k in convex_hull(ps2)] == hull
    assert convex_hull(ps) == brute_force_hull(ps)


# ---------------------------------------------------------------- small predicates

def test_strictly_inside_triangle_examples():
    tri = ((0, 0), (4, 0), (0, 4))
    assert strictly_inside_triangle((1, 1), *tri)
    assert not strictly_inside_triangle((0, 0), *tri)
    assert not strictly_inside_triangle((2, 2), *tri)
    # orientation of the triangle does not matter
    assert strictly_inside_triangle((1, 1), tri[0], tri[2], tri[1])
    with pytest.raises(GeometryInputError):
        strictly_inside_triangle((1, 1), (0, 0), (1, 1), (2, 2))


@given(point, point, point, point)
def test_strictly_inside_triangle_matches_sign_sum(p, a, b, c):
    if cross(a, b, c) == 0:
        return
    s = orient(a, b, p) + orient(b, c, p) + orient(c, a, p)
    assert strictly_inside_triangle(p, a, b, c) == (abs(s) == 3)


def test_is_strictly_convex_examples():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    assert is_strictly_convex(sq)
    assert not is_strictly_convex([(0, 0), (1, 1), (1, 0), (0, 1)])
    assert not is_strictly_convex(list(reversed(sq)))
    # a reflex vertex pushed into a convex pentagon
    pent = [(0, 0), (4, 0), (6, 3), (2, 5), (-2, 3)]
    assert is_strictly_convex(pent)
    assert not is_strictly_convex(pent[:3] + [(2, 2)] + pent[3:])
    # straight angle
    assert not is_strictly_convex([(0, 0), (1, 0), (2, 0), (1, 1)])


def test_is_strictly_convex_rejects_doubly_wound_star():
    star = [(10, 0), (-8, 6), (3, -10), (3, 10), (-8, -6)]
    assert all(cross(star[k - 2], star[k - 1], star[k]) > 0 for k in range(5))
    assert not is_strictly_convex(star)


def test_twice_area_and_wedge():
    assert twice_area([(0, 0), (4, 0), (0, 4)]) == 16
    assert twice_area([(0, 0), (0, 4), (4, 0)]) == -16
    assert in_open_wedge((0, 0), (1, 0), (0, 1), (1, 1))
    assert not in_open_wedge((0, 0), (1, 0), (0, 1), (-1, 1))
