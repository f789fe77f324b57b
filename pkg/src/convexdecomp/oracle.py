"""Exact minimum convex decompositions of small point sets.

Every convex decomposition refines to a triangulation (fan each face from
one of its vertices), so the minimum is found by enumerating triangulations
and, for each, removing as many interior edges as possible while every
merged face stays strictly convex.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .decomp import Decomposition, canonical_face
from .geom import GeneralPositionError, PointSet, convex_hull, cross, general_position


class OracleLimitError(ValueError):
    pass


@dataclass
class OracleResult:
    min_faces: int
    witness: Decomposition


def _check(ps: PointSet, limit_n: int):
    if ps.n < 3:
        raise ValueError("need at least 3 points")
    if ps.n > limit_n:
        raise OracleLimitError(f"{ps.n} points exceeds the oracle limit of {limit_n}")
    bad = general_position(ps)
    if bad is not None:
        raise GeneralPositionError(bad)


def _crosses(pts, a, b, c, d) -> bool:
    """Proper intersection of segments ab and cd (shared endpoints do not count)."""
    if len({a, b, c, d}) < 4:
        return False
    pa, pb, pc, pd = pts[a], pts[b], pts[c], pts[d]
    return (cross(pa, pb, pc) > 0) != (cross(pa, pb, pd) > 0) and \
        (cross(pc, pd, pa) > 0) != (cross(pc, pd, pb) > 0)


def _inside_polygon(pts, poly, p) -> bool:
    # winding number; p is never on the boundary for points in general position
    wn = 0
    pp = pts[p]
    for k in range(len(poly)):
        a, b = pts[poly[k - 1]], pts[poly[k]]
        if a[1] <= pp[1] < b[1] and cross(a, b, pp) > 0:
            wn += 1
        elif b[1] <= pp[1] < a[1] and cross(a, b, pp) < 0:
            wn -= 1
    return wn != 0


def _in_triangle(pts, a, b, c, p) -> bool:
    return (cross(pts[a], pts[b], pts[p]) > 0 and cross(pts[b], pts[c], pts[p]) > 0
            and cross(pts[c], pts[a], pts[p]) > 0)


def enumerate_triangulations(ps: PointSet, limit_n: int = 10):
    """Yield every triangulation of ``ps`` exactly once, as a list of CCW triangles.

    The region still to be triangulated is kept as a list of simple polygons
    with the points inside them. The triangle on the first edge of the first
    polygon is unique in any triangulation, so branching on its apex never
    produces the same triangulation twice.
    """
    _check(ps, limit_n)
    pts = ps.points
    hull = convex_hull(ps)
    inner = frozenset(range(ps.n)) - set(hull)
    yield from _triangulate(pts, [(tuple(hull), inner)], [])


def _triangulate(pts, regions, tris):
    if not regions:
        yield list(tris)
        return
    (poly, inner), rest = regions[0], regions[1:]
    if len(poly) == 3 and not inner:
        tris.append(poly)
        yield from _triangulate(pts, rest, tris)
        tris.pop()
        return
    u, v = poly[0], poly[1]
    others = [x for x in poly[2:]] + sorted(inner)
    edges = [(poly[k - 1], poly[k]) for k in range(len(poly))]
    for w in others:
        if cross(pts[u], pts[v], pts[w]) <= 0:
            continue
        if any(_in_triangle(pts, u, v, w, x) for x in others if x != w):
            continue
        if any(_crosses(pts, v, w, a, c) or _crosses(pts, w, u, a, c) for a, c in edges):
            continue
        if w in inner:
            new = [((u, w) + poly[1:], inner - {w})]
        else:
            t = poly.index(w)
            left, right = poly[1:t + 1], poly[t:] + (u,)
            inl = frozenset(x for x in inner if len(left) >= 3 and _inside_polygon(pts, left, x))
            new = []
            if len(left) >= 3:
                new.append((left, inl))
            if len(right) >= 3:
                new.append((right, inner - inl))
        tris.append((u, v, w))
        yield from _triangulate(pts, new + rest, tris)
        tris.pop()


def naive_triangulations(ps: PointSet, limit_n: int = 8) -> list:
    """All maximal sets of pairwise non-crossing segments, as sorted edge tuples.

    Slow and simple; used to cross-check :func:`enumerate_triangulations`.
    """
    _check(ps, limit_n)
    pts = ps.points
    segs = list(combinations(range(ps.n), 2))
    crossing = {s: [t for t in segs if _crosses(pts, *s, *t)] for s in segs}
    index = {s: k for k, s in enumerate(segs)}
    out = []
    chosen: list = []
    chosen_set: set = set()

    def rec(k):
        if k == len(segs):
            out.append(tuple(chosen))
            return
        s = segs[k]
        if not any(t in chosen_set for t in crossing[s]):
            chosen.append(s)
            chosen_set.add(s)
            rec(k + 1)
            chosen.pop()
            chosen_set.discard(s)
        # leaving s out only makes sense if something will cross it
        if any(t in chosen_set or index[t] > k for t in crossing[s]):
            rec(k + 1)

    rec(0)
    return [e for e in out
            if all(any(t in set(e) for t in crossing[s]) for s in segs if s not in set(e))]


def triangles_to_edges(tris) -> tuple:
    edges = set()
    for t in tris:
        for k in range(3):
            a, b = t[k - 1], t[k]
            edges.add((min(a, b), max(a, b)))
    return tuple(sorted(edges))


def _merge_cycles(pts, A, B, u, v):
    """Union of cycles A (holding u->v) and B (holding v->u), or None if not strictly convex."""
    ka = A.index(u)
    A = A[ka:] + A[:ka]  # starts u, v
    kb = B.index(v)
    B = B[kb:] + B[:kb]  # starts v, u
    cyc = A[1:] + B[1:]  # v ... (A) ... , u ... (B) ...
    m = len(cyc)
    for k in range(m):
        if cross(pts[cyc[k - 2]], pts[cyc[k - 1]], pts[cyc[k]]) <= 0:
            return None
    return cyc


def _coarsen(pts, tris, best):
    """Fewest faces obtainable from ``tris`` by convex merges, if fewer than ``best``."""
    owner = {}
    for t, tri in enumerate(tris):
        for k in range(3):
            owner[(tri[k], tri[(k + 1) % 3])] = t
    internal = sorted({(min(u, v), max(u, v)) for (u, v) in owner if (v, u) in owner})
    T = len(tris)
    found = [best, None]
    seen = set()

    def rec(k, comp, cycles, faces):
        if faces - (len(internal) - k) >= found[0]:
            return
        key = (k, frozenset(cycles.values()))
        if key in seen:
            return
        seen.add(key)
        if k == len(internal):
            found[0] = faces
            found[1] = list(cycles.values())
            return
        a, b = internal[k]
        ta, tb = comp[owner[(a, b)]], comp[owner[(b, a)]]
        if ta != tb:
            merged = _merge_cycles(pts, list(cycles[ta]), list(cycles[tb]), a, b)
            if merged is not None:
                comp2 = {t: (ta if c == tb else c) for t, c in comp.items()}
                cycles2 = dict(cycles)
                del cycles2[tb]
                cycles2[ta] = tuple(merged)
                rec(k + 1, comp2, cycles2, faces - 1)
        rec(k + 1, comp, cycles, faces)

    rec(0, {t: t for t in range(T)}, {t: tuple(tri) for t, tri in enumerate(tris)}, T)
    return found[0], found[1]


def min_decomposition(ps: PointSet, limit_n: int = 10) -> OracleResult:
    """Exact minimum number of faces over all convex decompositions of ``ps``."""
    _check(ps, limit_n)
    pts = ps.points
    best = ps.n * 3
    witness = None
    for tris in enumerate_triangulations(ps, limit_n):
        count, faces = _coarsen(pts, tris, best)
        if faces is not None and count < best:
            best, witness = count, faces
            if best == 1:
                break
    faces = sorted(canonical_face(list(f)) for f in witness)
    return OracleResult(best, Decomposition(faces, []))
