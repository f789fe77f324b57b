"""Independent validity and bound checks for convex decompositions.

Only the orientation predicate is shared with the construction; the hull
used here is computed by gift wrapping so that a hull bug upstream cannot
hide itself.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .geom import GeometryInputError, orient


@dataclass
class VerifyReport:
    v1_faces_convex: bool = True
    v2_vertices_in_P: bool = True
    v3_interiors_disjoint: bool = True
    v4_union_is_hull: bool = True
    v5_all_points_used: bool = True
    bound_ok: bool = True
    i: int = 0
    b: int = 0
    face_count: int = 0
    area_faces: int = 0
    area_hull: int = 0
    failures: list = field(default_factory=list)

    @property
    def axioms_ok(self) -> bool:
        return (self.v1_faces_convex and self.v2_vertices_in_P and self.v3_interiors_disjoint
                and self.v4_union_is_hull and self.v5_all_points_used)

    @property
    def ok(self) -> bool:
        return self.axioms_ok and self.bound_ok

    def failed_axioms(self) -> set:
        return {a for a, _ in self.failures}

    def as_dict(self) -> dict:
        return {
            "v1_faces_convex": self.v1_faces_convex,
            "v2_vertices_in_P": self.v2_vertices_in_P,
            "v3_interiors_disjoint": self.v3_interiors_disjoint,
            "v4_union_is_hull": self.v4_union_is_hull,
            "v5_all_points_used": self.v5_all_points_used,
            "bound_ok": self.bound_ok,
            "i": self.i,
            "b": self.b,
            "face_count": self.face_count,
            "area_faces_x2": self.area_faces,
            "area_hull_x2": self.area_hull,
            "failures": [[a, list(w)] for a, w in self.failures],
        }


def bound_max_faces(i: int, b: int) -> int:
    """Largest face count allowed for ``i`` interior and ``b`` hull points."""
    if b < 3:
        raise ValueError("a hull has at least 3 vertices")
    if i < 0:
        raise ValueError("negative interior count")
    return (4 * i + b + 3) // 3


def wrap_hull(points) -> list:
    """Gift-wrapping hull, CCW from the lexicographically smallest point."""
    n = len(points)
    start = min(range(n), key=lambda k: (points[k][0], points[k][1]))
    hull = [start]
    cur = start
    while True:
        cand = (cur + 1) % n if n > 1 else cur
        for k in range(n):
            if k != cur and orient(points[cur], points[cand], points[k]) < 0:
                cand = k
        if cand == start:
            return hull
        hull.append(cand)
        cur = cand
        if len(hull) > n:
            raise GeometryInputError("hull did not close")


def _winding(points, cycle) -> int:
    def upper(k):
        (x0, y0), (x1, y1) = points[cycle[k - 1]], points[cycle[k]]
        dx, dy = x1 - x0, y1 - y0
        return dy > 0 or (dy == 0 and dx > 0)

    ups = [upper(k) for k in range(len(cycle))]
    return sum(1 for k in range(len(cycle)) if ups[k] and not ups[k - 1])


def _area2(points, cycle) -> int:
    s = 0
    for k in range(len(cycle)):
        x0, y0 = points[cycle[k - 1]]
        x1, y1 = points[cycle[k]]
        s += x0 * y1 - x1 * y0
    return s


def verify_decomposition(ps, d) -> VerifyReport:
    """Check a decomposition against the five axioms and the face bound.

    ``d`` may be a Decomposition or any object with a ``faces`` attribute, or
    a plain list of index cycles. Nothing is raised; problems are collected
    in ``failures`` as ``(axiom, witness indices)`` pairs.
    """
    faces = [list(f) for f in (d.faces if hasattr(d, "faces") else d)]
    points = list(ps)
    n = len(points)
    rep = VerifyReport(face_count=len(faces))

    def fail(axiom, witness):
        rep.failures.append((axiom, tuple(witness)))
        setattr(rep, {"V1": "v1_faces_convex", "V2": "v2_vertices_in_P",
                      "V3": "v3_interiors_disjoint", "V4": "v4_union_is_hull",
                      "V5": "v5_all_points_used"}[axiom], False)

    hull = wrap_hull(points)
    rep.b = len(hull)
    rep.i = n - rep.b

    # V2 first: later checks only look at faces whose indices resolve.
    good = []
    for f in faces:
        bad = [v for v in f if not (isinstance(v, int) and 0 <= v < n)]
        if bad:
            fail("V2", bad)
        else:
            good.append(f)

    for f in good:
        if len(f) < 3 or len(set(f)) != len(f):
            fail("V1", f)
            continue
        m = len(f)
        if any(orient(points[f[k - 2]], points[f[k - 1]], points[f[k]]) <= 0 for k in range(m)):
            fail("V1", f)
            continue
        # left turns only; a doubly wound cycle passes that test, so also
        # require the edge direction to sweep past angle 0 exactly once
        if _winding(points, f) != 1:
            fail("V1", f)

    # V3: directed edges pair up, hull edges appear once and in CCW direction.
    directed = Counter()
    for f in good:
        for k in range(len(f)):
            directed[(f[k - 1], f[k])] += 1
    hull_edges = {(hull[k - 1], hull[k]) for k in range(len(hull))}
    for e, c in sorted(directed.items()):
        if c > 1:
            fail("V3", e)
        elif e in hull_edges:
            continue
        elif (e[1], e[0]) in hull_edges:
            fail("V3", e)
        elif directed.get((e[1], e[0]), 0) != 1:
            fail("V3", e)
    for e in sorted(hull_edges):
        if directed.get(e, 0) == 0:
            fail("V3", e)

    # V4: exact area identity.
    rep.area_faces = sum(_area2(points, f) for f in good)
    rep.area_hull = _area2(points, hull)
    if rep.area_faces != rep.area_hull:
        fail("V4", (rep.area_faces, rep.area_hull))

    used = {v for f in good for v in f}
    missing = [k for k in range(n) if k not in used]
    if missing:
        fail("V5", missing)

    rep.bound_ok = 3 * rep.face_count <= 4 * rep.i + rep.b + 3
    return rep
