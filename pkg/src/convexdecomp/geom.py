"""Exact integer predicates and convex hulls.

All coordinates are integers with magnitude at most ``2**30`` so that every
orientation determinant is exact, both with Python ints and with the int64
numpy kernels used on the hot paths.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

COORD_LIMIT = 2 ** 30


class GeometryInputError(ValueError):
    """Input that violates the integer / general position contract."""


class GeneralPositionError(GeometryInputError):
    def __init__(self, triple, message=None):
        self.triple = tuple(triple)
        if message is None:
            if len(self.triple) == 2:
                message = f"duplicate points at indices {self.triple[0]}, {self.triple[1]}"
            else:
                message = "collinear points at indices {}, {}, {}".format(*self.triple)
        super().__init__(message)


class Point(NamedTuple):
    x: int
    y: int


def _check_coord(v) -> int:
    if isinstance(v, (bool, np.bool_)) or not isinstance(v, (int, np.integer)):
        raise GeometryInputError(f"coordinate {v!r} is not an integer")
    v = int(v)
    if abs(v) > COORD_LIMIT:
        raise GeometryInputError(f"coordinate {v} exceeds magnitude bound 2**30")
    return v


def cross(a, b, c) -> int:
    """Twice the signed area of triangle abc (no input checks)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def orient(a, b, c) -> int:
    """Sign of the turn a -> b -> c: +1 left, 0 collinear, -1 right."""
    for p in (a, b, c):
        _check_coord(p[0])
        _check_coord(p[1])
    d = cross(a, b, c)
    return (d > 0) - (d < 0)


def orient_many(a, b, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorised ``orient(a, b, (xs[k], ys[k]))`` over int64 arrays.

    The two products are compared rather than subtracted, so the result is
    exact for every coordinate within ``COORD_LIMIT``.
    """
    ax, ay = a
    bx, by = b
    lhs = (bx - ax) * (ys - ay)
    rhs = (by - ay) * (xs - ax)
    return (lhs > rhs).astype(np.int8) - (lhs < rhs).astype(np.int8)


class PointSet:
    """An ordered list of distinct integer points.

    Construction validates coordinates only; call :func:`general_position`
    (or use :meth:`checked`) to enforce the no-three-collinear guarantee.
    """

    __slots__ = ("points", "xs", "ys")

    def __init__(self, points: Sequence):
        pts = []
        for p in points:
            if len(p) != 2:
                raise GeometryInputError(f"point {p!r} does not have two coordinates")
            pts.append(Point(_check_coord(p[0]), _check_coord(p[1])))
        self.points: list[Point] = pts
        self.xs = np.array([p.x for p in pts], dtype=np.int64)
        self.ys = np.array([p.y for p in pts], dtype=np.int64)

    @classmethod
    def checked(cls, points: Sequence) -> "PointSet":
        ps = cls(points)
        bad = general_position(ps)
        if bad is not None:
            raise GeneralPositionError(bad)
        return ps

    @property
    def n(self) -> int:
        return len(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, k) -> Point:
        return self.points[k]

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other):
        return isinstance(other, PointSet) and self.points == other.points

    def __repr__(self):
        return f"PointSet({[tuple(p) for p in self.points]!r})"


def general_position(ps: PointSet):
    """Return None if ``ps`` is in general position, else the first bad triple.

    The reported triple ``(i, j, k)`` is the lexicographically smallest one
    that is degenerate. A repeated point makes every triple through it
    degenerate, so duplicates surface the same way. With fewer than three
    points a duplicate is reported as an index pair.
    """
    n = ps.n
    if n < 3:
        if n == 2 and ps.points[0] == ps.points[1]:
            return (0, 1)
        return None
    xs, ys = ps.xs, ps.ys
    for i in range(n - 2):
        hit = _first_collinear_from(xs, ys, i)
        if hit is not None:
            return (i,) + hit
    return None


def _first_collinear_from(xs, ys, i):
    """Smallest ``(j, k)`` with ``i < j < k`` and ``i, j, k`` degenerate."""
    n = len(xs)
    dx = xs[i + 1:] - xs[i]
    dy = ys[i + 1:] - ys[i]
    g = np.gcd(dx, dy)
    dup = g == 0
    g[dup] = 1
    dx = dx // g
    dy = dy // g
    flip = (dx < 0) | ((dx == 0) & (dy < 0))
    dx[flip] = -dx[flip]
    dy[flip] = -dy[flip]
    m = n - i - 1
    pos = np.arange(m)
    # nxt[t] = smallest later position in the same direction class (or m)
    order = np.lexsort((pos, dy, dx))
    nxt = np.full(m, m, dtype=np.int64)
    a, b = order[:-1], order[1:]
    same = (dx[a] == dx[b]) & (dy[a] == dy[b])
    nxt[a[same]] = b[same]
    # smallest duplicate-of-i position strictly after t
    dup_pos = np.where(dup, pos, m)
    after = np.minimum.accumulate(dup_pos[::-1])[::-1]
    next_dup = np.append(after[1:], m)
    cand = np.where(dup, pos + 1, np.minimum(nxt, next_dup))
    hits = np.flatnonzero(cand < m)
    if hits.size == 0:
        return None
    t = int(hits[0])
    return (i + 1 + t, i + 1 + int(cand[t]))


def _prefilter(pts: Sequence, idx: Sequence[int], xy=None) -> list[int]:
    # drop points strictly inside the polygon of the eight extreme points
    idx = np.asarray(idx, dtype=np.int64)
    if xy is not None:
        xs, ys = xy[0][idx], xy[1][idx]
    else:
        xs = np.fromiter((pts[k][0] for k in idx), dtype=np.int64, count=len(idx))
        ys = np.fromiter((pts[k][1] for k in idx), dtype=np.int64, count=len(idx))
    picks = []
    for key in (xs, xs + ys, ys, ys - xs, -xs, -xs - ys, -ys, xs - ys):
        lo = int(np.argmin(key))
        picks.append(lo)
    ring = [p for k, p in enumerate(picks) if p not in picks[:k]]
    poly = _hull_of([(int(xs[k]), int(ys[k])) for k in range(len(idx))], ring, small=True)
    if len(poly) < 3:
        return idx.tolist()
    inside = np.ones(len(idx), dtype=bool)
    for k in range(len(poly)):
        a, b = poly[k - 1], poly[k]
        inside &= orient_many((xs[a], ys[a]), (xs[b], ys[b]), xs, ys) > 0
    return idx[~inside].tolist()


def _hull_of(pts: Sequence, idx: Sequence[int], small: bool = False, xy=None) -> list[int]:
    """Monotone chain on ``pts[idx]``; CCW, starting at the lexicographic minimum.

    ``xy`` optionally holds coordinate arrays aligned with ``pts`` to speed
    up the interior prefilter.
    """
    if not small and len(idx) > 64:
        idx = _prefilter(pts, idx, xy)
    order = sorted(idx, key=lambda k: (pts[k][0], pts[k][1]))
    if len(order) < 3:
        return order
    lower: list[int] = []
    for k in order:
        while len(lower) >= 2 and cross(pts[lower[-2]], pts[lower[-1]], pts[k]) <= 0:
            lower.pop()
        lower.append(k)
    upper: list[int] = []
    for k in reversed(order):
        while len(upper) >= 2 and cross(pts[upper[-2]], pts[upper[-1]], pts[k]) <= 0:
            upper.pop()
        upper.append(k)
    return lower[:-1] + upper[:-1]


def convex_hull(ps: PointSet, subset: Sequence[int] | None = None) -> list[int]:
    """Counterclockwise hull vertex indices of ``subset`` (all points by default).

    The cycle starts at the lexicographically smallest hull point.
    """
    if subset is None:
        subset = range(ps.n)
    subset = list(subset)
    if len(subset) < 3:
        raise GeometryInputError("convex hull needs at least 3 points")
    hull = _hull_of(ps.points, subset, xy=(ps.xs, ps.ys))
    if len(hull) < 3:
        raise GeometryInputError("points of the subset are collinear")
    return hull


def strictly_inside_triangle(p, a, b, c) -> bool:
    o = cross(a, b, c)
    if o == 0:
        raise GeometryInputError("degenerate triangle")
    s = 1 if o > 0 else -1
    return (cross(a, b, p) * s > 0 and cross(b, c, p) * s > 0
            and cross(c, a, p) * s > 0)


def is_strictly_convex(cycle: Sequence) -> bool:
    """True iff every consecutive triple of ``cycle`` turns strictly left.

    A cycle winding around more than once also has only left turns, so the
    total turning is checked through the edge directions' angular order.
    """
    m = len(cycle)
    if m < 3:
        return False
    for k in range(m):
        if cross(cycle[k - 2], cycle[k - 1], cycle[k]) <= 0:
            return False
    # Only left turns: reject cycles that wind more than once by counting how
    # many times the edge direction crosses the positive x axis direction.
    wraps = 0
    for k in range(m):
        d0 = (cycle[k - 1][0] - cycle[k - 2][0], cycle[k - 1][1] - cycle[k - 2][1])
        d1 = (cycle[k][0] - cycle[k - 1][0], cycle[k][1] - cycle[k - 1][1])
        if _half(d0) != _half(d1) and _half(d1) == 0:
            wraps += 1
    return wraps == 1


def _half(d) -> int:
    # 0 for directions in [0, pi), 1 for [pi, 2*pi)
    return 0 if (d[1] > 0 or (d[1] == 0 and d[0] > 0)) else 1


def twice_area(cycle: Sequence) -> int:
    s = 0
    for k in range(len(cycle)):
        x0, y0 = cycle[k - 1]
        x1, y1 = cycle[k]
        s += x0 * y1 - x1 * y0
    return s


def in_open_wedge(apex, a, c, x) -> bool:
    """True iff ``x`` lies strictly inside the angle at ``apex`` spanned by rays to a and c."""
    s = cross(apex, a, c)
    if s == 0:
        raise GeometryInputError("degenerate wedge")
    s = 1 if s > 0 else -1
    return cross(apex, a, x) * s > 0 and cross(apex, c, x) * s < 0


def brute_force_hull(ps: PointSet, subset: Sequence[int] | None = None) -> list[int]:
    """O(n^3) hull used as a test oracle: keep edges with every other point on the left."""
    idx = list(range(ps.n) if subset is None else subset)
    pts = ps.points
    succ = {}
    for a, b in ((a, b) for a in idx for b in idx if a != b):
        if all(cross(pts[a], pts[b], pts[c]) > 0 for c in idx if c != a and c != b):
            succ[a] = b
    start = min(succ, key=lambda k: (pts[k][0], pts[k][1]))
    out = [start]
    while succ[out[-1]] != start:
        out.append(succ[out[-1]])
    return out
