"""Recursive convex decomposition with at most (4i + b + 3) / 3 faces.

The construction peels a point set case by case: small interior counts are
handled directly, an empty ear is removed and glued back, and the harder
configurations remove two or three points at a time, recurse, and tile the
pocket between the two hulls with fans whose count is paid for by the
points that moved from the interior onto the hull.

Recursion is driven by an explicit stack of generators. A case handler
``yield``s the subset it wants decomposed and receives control back once the
shared mesh holds that subset's faces; it then adds and merges its own.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .geom import (
    GeometryInputError,
    GeneralPositionError,
    PointSet,
    _hull_of,
    cross,
    general_position,
    is_strictly_convex,
    orient_many,
    twice_area,
)

CASE_LABELS = (
    "BASE3", "CONVEX", "I1", "I2", "C1", "C2A", "C2B", "C3_1", "C3_2", "C3_3",
    "C4_1A", "C4_1B", "C4_1B_B3", "C4_2",
)


class InvariantError(AssertionError):
    """A structural fact the construction relies on did not hold."""

    def __init__(self, message, case=None, indices=()):
        self.case = case
        self.indices = tuple(int(k) for k in indices)
        detail = message
        if case is not None:
            detail = f"[{case}] {detail}"
        if self.indices:
            detail += f" (indices {list(self.indices)})"
        super().__init__(detail)


class NonConvexMergeError(InvariantError):
    pass


@dataclass
class TraceEvent:
    case: str
    size: int
    pivots: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"case": self.case, "size": self.size, "pivots": dict(self.pivots)}


@dataclass
class Decomposition:
    faces: list
    trace: list = field(default_factory=list)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    def labels(self) -> set:
        return {e.case for e in self.trace}


@dataclass(frozen=True)
class HalfPlaneWitness:
    q: int
    q_plus: int
    crossing_hull_points: tuple


def canonical_face(cycle) -> tuple:
    k = min(range(len(cycle)), key=cycle.__getitem__)
    return tuple(cycle[k:]) + tuple(cycle[:k])


# ---------------------------------------------------------------- subsets

class Subset:
    """A subset of a root point set together with its canonical hull.

    Indices are global (into the root ``PointSet``) throughout.
    """

    def __init__(self, ps: PointSet, idx, hull=None):
        self.ps = ps
        self.idx = np.asarray(idx, dtype=np.int64)
        self.xs = ps.xs[self.idx]
        self.ys = ps.ys[self.idx]
        if hull is None:
            hull = _hull_of(ps.points, self.idx.tolist(), xy=(ps.xs, ps.ys))
        self.hull: list[int] = hull
        self._interior = None

    def __len__(self):
        return len(self.idx)

    @property
    def n(self) -> int:
        return len(self.idx)

    @property
    def b(self) -> int:
        return len(self.hull)

    @property
    def i(self) -> int:
        return len(self.idx) - len(self.hull)

    @property
    def interior(self) -> np.ndarray:
        if self._interior is None:
            self._interior = self.idx[~np.isin(self.idx, self.hull)]
        return self._interior

    def p(self, j: int) -> int:
        """Hull vertex at position ``j`` (taken modulo b)."""
        return self.hull[j % len(self.hull)]

    def minus(self, removed: Iterable[int]) -> "Subset":
        """The subset without ``removed``; the hull is patched gap by gap."""
        rem = set(int(r) for r in removed)
        keep = self.idx[~np.isin(self.idx, list(rem))]
        H = self.hull
        pos = [k for k, h in enumerate(H) if h not in rem]
        if len(pos) == len(H):
            return Subset(self.ps, keep, list(H))
        if len(pos) < 3:
            return Subset(self.ps, keep)
        pts = self.ps.points
        kx, ky = self.ps.xs[keep], self.ps.ys[keep]
        b = len(H)
        out: list[int] = []
        for t, k in enumerate(pos):
            a = H[k]
            k2 = pos[(t + 1) % len(pos)]
            out.append(a)
            if (k2 - k) % b == 1:
                continue
            c = H[k2]
            outside = orient_many(pts[a], pts[c], kx, ky) < 0
            cands = keep[outside].tolist()
            if not cands:
                continue
            small = _hull_of(pts, [a, c] + cands, xy=(self.ps.xs, self.ps.ys))
            s = small.index(a)
            small = small[s:] + small[:s]
            out.extend(small[1:small.index(c)])
        start = min(range(len(out)), key=lambda k: pts[out[k]])
        return Subset(self.ps, keep, out[start:] + out[:start])

    def contains_any(self, cycle) -> bool:
        """True iff some point of the subset is strictly inside the convex CCW ``cycle``."""
        pts = self.ps.points
        inside = np.ones(len(self.idx), dtype=bool)
        m = len(cycle)
        for k in range(m):
            inside &= orient_many(pts[cycle[k]], pts[cycle[(k + 1) % m]], self.xs, self.ys) > 0
            if not inside.any():
                return False
        return True


def _union_convex(pts, f, g) -> bool:
    try:
        merge_faces(pts, _ccw(pts, f), _ccw(pts, g))
    except NonConvexMergeError:
        return False
    return True


def _ccw(pts, cycle) -> list:
    cycle = list(cycle)
    if twice_area([pts[k] for k in cycle]) < 0:
        cycle.reverse()
    return cycle


# ---------------------------------------------------------------- mesh

class _Mesh:
    """Half-edge face store with O(1) merges across a shared edge."""

    def __init__(self, pts):
        self.pts = pts
        self.nxt: dict = {}
        self.prv: dict = {}
        self.fid: dict = {}
        self.parent: list[int] = []
        self.count = 0

    def find(self, f: int) -> int:
        parent = self.parent
        while parent[f] != f:
            parent[f] = parent[parent[f]]
            f = parent[f]
        return f

    def add(self, cycle, case=None) -> int:
        pts = self.pts
        if not is_strictly_convex([pts[k] for k in cycle]):
            raise InvariantError("face is not strictly convex", case, cycle)
        f = len(self.parent)
        self.parent.append(f)
        m = len(cycle)
        for k in range(m):
            e = (cycle[k], cycle[(k + 1) % m])
            if e in self.nxt:
                raise InvariantError("half-edge used twice", case, e)
            self.nxt[e] = cycle[(k + 2) % m]
            self.prv[e] = cycle[k - 1]
            self.fid[e] = f
        self.count += 1
        return f

    def has(self, u: int, v: int) -> bool:
        return (u, v) in self.nxt

    def face_of(self, u: int, v: int) -> int:
        return self.find(self.fid[(u, v)])

    def can_merge(self, u: int, v: int) -> bool:
        if (u, v) not in self.nxt or (v, u) not in self.nxt:
            return False
        pts = self.pts
        a_prev, a_next = self.prv[(u, v)], self.nxt[(u, v)]
        b_prev, b_next = self.prv[(v, u)], self.nxt[(v, u)]
        return (cross(pts[a_prev], pts[u], pts[b_next]) > 0
                and cross(pts[b_prev], pts[v], pts[a_next]) > 0)

    def merge(self, u: int, v: int, case=None) -> int:
        """Glue the faces on both sides of edge uv; the union must stay strictly convex."""
        if not self.can_merge(u, v):
            raise NonConvexMergeError("union across edge is not strictly convex", case, (u, v))
        a_prev, a_next = self.prv[(u, v)], self.nxt[(u, v)]
        b_prev, b_next = self.prv[(v, u)], self.nxt[(v, u)]
        fa, fb = self.find(self.fid[(u, v)]), self.find(self.fid[(v, u)])
        for e in ((u, v), (v, u)):
            del self.nxt[e], self.prv[e], self.fid[e]
        self.nxt[(a_prev, u)] = b_next
        self.prv[(u, b_next)] = a_prev
        self.nxt[(b_prev, v)] = a_next
        self.prv[(v, a_next)] = b_prev
        self.parent[fb] = fa
        self.count -= 1
        return fa

    def cycle_from(self, u: int, v: int) -> list:
        out = [u]
        a, b = u, v
        while b != u:
            out.append(b)
            a, b = b, self.nxt[(a, b)]
        return out

    def faces(self) -> list:
        seen = set()
        out = []
        for e in self.nxt:
            if e in seen:
                continue
            cyc = self.cycle_from(*e)
            m = len(cyc)
            for k in range(m):
                seen.add((cyc[k], cyc[(k + 1) % m]))
            out.append(canonical_face(cyc))
        out.sort()
        return out


def merge_faces(points, face, *others) -> tuple:
    """Union of a convex face with faces sharing one edge each with it.

    ``points`` maps indices to coordinates; faces are CCW index cycles. The
    others are glued on one at a time, so several disjoint triangles around
    one face can be absorbed in a single call. Raises
    :class:`NonConvexMergeError` if any union is not strictly convex.
    """
    mesh = _Mesh(points)
    mesh.add(list(face))
    for g in others:
        g = list(g)
        mesh.add(g)
        m = len(g)
        shared = [(g[(k + 1) % m], g[k]) for k in range(m) if mesh.has(g[(k + 1) % m], g[k])]
        shared = [(u, v) for u, v in shared if mesh.face_of(u, v) != mesh.face_of(v, u)]
        if len(shared) != 1:
            raise NonConvexMergeError("faces must share exactly one edge", None, g)
        mesh.merge(*shared[0])
    faces = mesh.faces()
    if len(faces) != 1:
        raise NonConvexMergeError("merge left more than one face")
    return faces[0]


# ---------------------------------------------------------------- case operations

def decompose_convex_position(ps: PointSet, subset=None) -> Decomposition:
    sub = Subset(ps, range(ps.n) if subset is None else subset)
    if sub.i != 0:
        raise GeometryInputError("subset is not in convex position")
    return Decomposition([canonical_face(sub.hull)], [TraceEvent(
        "BASE3" if sub.n == 3 else "CONVEX", sub.n, {})])


def one_interior_faces(S: Subset) -> tuple[list, dict]:
    """Three faces around the single interior point, split at the first containing hull triple."""
    pts = S.ps.points
    q = int(S.interior[0])
    H = S.hull
    b = len(H)
    hx, hy = S.ps.xs[H], S.ps.ys[H]
    qp = pts[q]
    for a in range(b):
        pa = pts[H[a]]
        # c must satisfy q left of (c -> a); computed once per a
        left_of_ca = orient_many(qp, pa, hx, hy) < 0
        for bb in range(a + 1, b - 1):
            pb = pts[H[bb]]
            if cross(pa, pb, qp) <= 0:
                continue
            ok = left_of_ca[bb + 1:] & (orient_many(pb, qp, hx[bb + 1:], hy[bb + 1:]) < 0)
            hit = np.flatnonzero(ok)
            if hit.size:
                c = bb + 1 + int(hit[0])
                faces = [H[a:bb + 1] + [q], H[bb:c + 1] + [q], H[c:] + H[:a + 1] + [q]]
                return faces, {"q": q, "a": a, "b": bb, "c": c}
    raise InvariantError("no hull triple contains the interior point", "I1", (q,))


def construct_one_interior(S: Subset) -> list:
    return one_interior_faces(S)[0]


def two_interior_faces(S: Subset) -> tuple[list, dict]:
    """Two end triangles on the line through both interior points, plus two side polygons."""
    pts = S.ps.points
    q, r = sorted((int(k) for k in S.interior), key=lambda k: pts[k])
    H = S.hull
    b = len(H)
    side = orient_many(pts[q], pts[r], S.ps.xs[H], S.ps.ys[H])
    u = v = None
    for k in range(b):
        s0, s1 = side[k], side[(k + 1) % b]
        if s0 < 0 < s1:
            u = k
        elif s0 > 0 > s1:
            v = k
    if u is None or v is None:
        raise InvariantError("line through interior points misses the hull", "I2", (q, r))
    pu, pu1 = H[u], H[(u + 1) % b]
    pv, pv1 = H[v], H[(v + 1) % b]
    left = [H[k % b] for k in range(u + 1, v + 1 + (b if v < u else 0))]
    right = [H[k % b] for k in range(v + 1, u + 1 + (b if u < v else 0))]
    faces = [[r, pu, pu1], [q, pv, pv1], left + [q, r], right + [r, q]]
    return faces, {"q": q, "r": r, "u": u, "v": v}


def construct_two_interior(S: Subset) -> list:
    return two_interior_faces(S)[0]


def find_empty_ear(S: Subset):
    """Smallest hull position whose ear triangle has no point of S inside, else None."""
    pts = S.ps.points
    H = S.hull
    inner = S.interior
    if inner.size == 0:
        return 0
    ix, iy = S.ps.xs[inner], S.ps.ys[inner]
    b = len(H)
    for j in range(b):
        a, p, c = pts[H[j - 1]], pts[H[j]], pts[H[(j + 1) % b]]
        m = orient_many(c, a, ix, iy) > 0
        if m.any():
            m &= orient_many(a, p, ix, iy) > 0
            if m.any():
                m &= orient_many(p, c, ix, iy) > 0
        if not m.any():
            return j
    return None


def half_plane_witnesses(S: Subset, inner_hull=None) -> list:
    """For each edge q -> q+ of the inner hull, the outer hull vertices strictly beyond it."""
    pts = S.ps.points
    if inner_hull is None:
        inner_hull = _hull_of(pts, S.interior.tolist(), xy=(S.ps.xs, S.ps.ys))
    H = S.hull
    hx, hy = S.ps.xs[H], S.ps.ys[H]
    out = []
    k = len(inner_hull)
    for t in range(k):
        q, qp = inner_hull[t], inner_hull[(t + 1) % k]
        beyond = np.flatnonzero(orient_many(pts[q], pts[qp], hx, hy) < 0).tolist()
        if not 1 <= len(beyond) <= 2:
            raise InvariantError(f"{len(beyond)} hull points beyond an inner hull edge",
                                 "C2", (q, qp))
        if len(beyond) == 2 and beyond == [0, len(H) - 1]:
            beyond = [len(H) - 1, 0]
        out.append(HalfPlaneWitness(q, qp, tuple(H[p] for p in beyond)))
    return out


def promoted_chain(S: Subset, removed, gap, reduced: Subset | None = None) -> list:
    """Chain ``[q_0, q_1, ..., q_m, q_{m+1}]`` on the reduced hull across a gap.

    ``gap`` holds the surviving points flanking the removed run; they may
    coincide when the run wraps around a triangle.
    """
    if reduced is None:
        reduced = S.minus(removed)
    left, right = gap
    H = reduced.hull
    k = H.index(left)
    chain = [left]
    b = len(H)
    for t in range(1, b + 1):
        v = H[(k + t) % b]
        chain.append(v)
        if v == right:
            return chain
    raise InvariantError("gap endpoint missing from reduced hull", None, (left, right))


# ---------------------------------------------------------------- the case machine

class _Run:
    def __init__(self, ps: PointSet, oracle_limit: int = 10):
        self.ps = ps
        self.pts = ps.points
        self.mesh = _Mesh(ps.points)
        self.trace: list[TraceEvent] = []
        self.oracle_limit = oracle_limit

    def event(self, case, S, **pivots):
        ev = TraceEvent(case, S.n, pivots)
        self.trace.append(ev)
        return ev

    def add(self, cycle, case):
        return self.mesh.add(_ccw(self.pts, cycle), case)

    def add_checked(self, S, cycle, case):
        cycle = _ccw(self.pts, cycle)
        if S.contains_any(cycle):
            raise InvariantError("new face contains a point", case, cycle)
        return self.mesh.add(cycle, case)

    def ear_merge(self, a, p, c, case):
        """Glue triangle a p c back onto the face holding hull chord a -> c."""
        if not self.mesh.has(a, c):
            raise InvariantError("no face holds the chord", case, (a, c))
        self.mesh.add([a, p, c], case)
        self.mesh.merge(a, c, case)

    def pair_merge(self, first, second, case) -> int:
        for k, (u, v) in enumerate((first, second), 1):
            if self.mesh.can_merge(u, v):
                self.mesh.merge(u, v, case)
                return k
        raise NonConvexMergeError("neither candidate pair merges convexly", case,
                                  first + second)

    # -- dispatch

    def solve(self, S: Subset) -> Iterator:
        start = self.mesh.count
        yield from self.dispatch(S)
        faces = self.mesh.count - start
        if 3 * faces > 4 * S.i + S.b + 3:
            raise InvariantError(f"{faces} faces exceed the bound for i={S.i}, b={S.b}",
                                 self.trace[-1].case if self.trace else None)

    def dispatch(self, S: Subset) -> Iterator:
        n, i = S.n, S.i
        if n == 3 or i == 0:
            self.event("BASE3" if n == 3 else "CONVEX", S)
            self.add(S.hull, "CONVEX")
            return
        if i == 1:
            faces, piv = one_interior_faces(S)
            self.event("I1", S, **piv)
            for f in faces:
                self.add(f, "I1")
            return
        if i == 2:
            faces, piv = two_interior_faces(S)
            self.event("I2", S, **piv)
            for f in faces:
                self.add(f, "I2")
            return
        j = find_empty_ear(S)
        if j is not None:
            yield from self.case1(S, j)
            return
        inner = _hull_of(self.pts, S.interior.tolist(), xy=(S.ps.xs, S.ps.ys))
        witnesses = [w for w in half_plane_witnesses(S, inner) if len(w.crossing_hull_points) == 2]
        for w in witnesses:
            plan = self.case2_plan(S, w)
            if plan is not None:
                yield from self.case2(S, plan)
                return
        if witnesses:
            w = witnesses[0]
            raise NonConvexMergeError("no Case 2 option merges convexly", "C2B",
                                      (w.q, w.q_plus) + w.crossing_hull_points)
        b = S.b
        chains = []
        for j in range(b):
            reduced = S.minus([S.p(j)])
            chain = promoted_chain(S, [S.p(j)], (S.p(j - 1), S.p(j + 1)), reduced)
            if len(chain) - 2 >= 3:
                yield from self.case3(S, j, chain, reduced)
                return
            chains.append(chain)
        yield from self.case4(S, chains, inner)

    # -- Case 1: an empty ear

    def case1(self, S, j):
        pj = S.p(j)
        self.event("C1", S, j=j, p_j=pj)
        yield S.minus([pj])
        self.ear_merge(S.p(j - 1), pj, S.p(j + 1), "C1")

    # -- Case 2: two hull points beyond one inner hull edge

    def case2_plan(self, S, w: HalfPlaneWitness):
        """Choose how to finish Case 2 for witness ``w`` before recursing.

        The chain point removed is q_l, as in the usual construction, unless
        neither of its merge pairs is convex; then the mirror image (removing
        q_{l+1}) is tried. Returns None when no option works.
        """
        pts = self.pts
        pj, pj1 = w.crossing_hull_points
        j = S.hull.index(pj)
        if S.p(j + 1) != pj1:
            raise InvariantError("crossing hull points are not consecutive", "C2", (pj, pj1))
        P1 = S.minus([pj, pj1])
        q = promoted_chain(S, [pj, pj1], (S.p(j - 1), S.p(j + 2)), P1)
        m = len(q) - 2
        if w.q not in q[1:-1]:
            raise InvariantError("q did not reach the reduced hull", "C2", (w.q,))
        l = q.index(w.q, 1)
        if not (1 <= l < m and q[l + 1] == w.q_plus):
            raise InvariantError("q, q+ are not consecutive inside the chain", "C2", (w.q, w.q_plus))
        quad = [q[l], pj, pj1, q[l + 1]]
        if not is_strictly_convex([pts[k] for k in quad]):
            raise InvariantError("bridge quadrilateral is not convex", "C2", quad)
        pi0 = [quad]
        pi0 += [[q[k], pj, q[k + 1]] for k in range(l)]
        pi0 += [[q[k], pj1, q[k + 1]] for k in range(l + 1, m + 1)]
        plan = {"j": j, "q": w.q, "l": l, "m": m, "pi0": pi0, "P1": P1, "chain": q}
        options = []
        for x in (l, l + 1):
            a, c = q[x - 1], q[x + 1]
            ear = _ccw(pts, [a, q[x], c])
            if not S.contains_any(ear):
                options.append((x, None, None))
                continue
            r = promoted_chain(P1, [q[x]], (a, c))
            # faces of pi0 on the two chain edges at q[x]
            before = pi0[0] if x == l + 1 else [q[x - 1], pj, q[x]]
            after = pi0[0] if x == l else [q[x], pj1, q[x + 1]]
            pairs = [((a, q[x]), before, [r[0], q[x], r[1]]),
                     ((q[x], c), after, [r[-2], q[x], r[-1]])]
            for k, (edge, f, g) in enumerate(pairs, 1):
                if _union_convex(pts, f, g):
                    options.append((x, r, (k, edge)))
                    break
        if not options:
            return None
        # the usual order: ear at q_l, merge at q_l, then the mirrored forms
        options.sort(key=lambda o: (o[0] != l, o[1] is not None))
        plan["x"], plan["r"], plan["merge"] = options[0]
        return plan

    def case2(self, S, plan):
        q, l, x, r = plan["chain"], plan["l"], plan["x"], plan["r"]
        piv = {k: plan[k] for k in ("j", "q", "l", "m")}
        if x != l:
            piv["mirrored"] = True
        label = "C2A" if r is None else "C2B"
        if r is not None:
            piv["m_prime"] = len(r) - 2
        ev = self.event(label, S, **piv)
        yield plan["P1"].minus([q[x]])
        if r is None:
            self.ear_merge(q[x - 1], q[x], q[x + 1], label)
        else:
            for k in range(len(r) - 1):
                self.add([r[k], q[x], r[k + 1]], label)
        for f in plan["pi0"]:
            self.add_checked(S, f, label)
        if r is not None:
            k, edge = plan["merge"]
            self.mesh.merge(*edge, label)
            ev.pivots["merges"] = [k]

    # -- Case 3: removing one hull point exposes at least three interior points

    def case3(self, S, j, chain, T1):
        pj = S.p(j)
        q = chain
        m = len(chain) - 2
        e1 = not S.contains_any(_ccw(self.pts, q[0:3]))
        e2 = not S.contains_any(_ccw(self.pts, q[m - 1:m + 2]))
        label = "C3_1" if e1 and e2 else "C3_2" if not (e1 or e2) else "C3_3"
        r = s = None
        if not e1:
            r = promoted_chain(T1, [q[1]], (q[0], q[2]))
        if not e2:
            s = promoted_chain(T1, [q[m]], (q[m - 1], q[m + 1]))
        if r is not None and s is not None and set(r[1:-1]) & set(s[1:-1]):
            raise InvariantError("promoted chains overlap", label, set(r[1:-1]) & set(s[1:-1]))
        piv = {"j": j, "p_j": pj, "m": m}
        if r is not None:
            piv["m_prime"] = len(r) - 2
        if s is not None:
            piv["m_dprime"] = len(s) - 2
        ev = self.event(label, S, **piv)
        yield T1.minus([q[1], q[m]])
        if e1:
            self.ear_merge(q[0], q[1], q[2], label)
        else:
            for k in range(len(r) - 1):
                self.add([r[k], q[1], r[k + 1]], label)
        if e2:
            self.ear_merge(q[m - 1], q[m], q[m + 1], label)
        else:
            for k in range(len(s) - 1):
                self.add([s[k], q[m], s[k + 1]], label)
        for k in range(m + 1):
            self.add_checked(S, [q[k], pj, q[k + 1]], label)
        merges = []
        if not e1:
            merges.append(self.pair_merge((q[0], q[1]), (q[1], q[2]), label))
        if not e2:
            merges.append(self.pair_merge((q[m - 1], q[m]), (q[m], q[m + 1]), label))
        if merges:
            ev.pivots["merges"] = merges

    # -- Case 4: every removal exposes exactly two interior points

    def case4(self, S, chains, inner):
        pts = self.pts
        b = S.b
        P = S.hull
        for j, ch in enumerate(chains):
            if len(ch) != 4:
                raise InvariantError(f"|Q_j| = {len(ch) - 2}, expected 2", "C4", (P[j],))
        qs = [ch[1] for ch in chains]
        for j in range(b):
            if chains[j][2] != qs[(j + 1) % b]:
                raise InvariantError("q'_j differs from q_{j+1}", "C4", (P[j], chains[j][2]))
        self.check_empty_wedges(S, qs)
        k0 = inner.index(qs[0]) if qs[0] in inner else -1
        if len(inner) != b or k0 < 0 or inner[k0:] + inner[:k0] != qs:
            raise InvariantError("inner hull is not q_0 ... q_{b-1}", "C4", qs)

        def Q(k):
            return qs[k % b]

        for j in range(b):
            if not S.contains_any(_ccw(pts, [Q(j), Q(j + 1), Q(j + 2)])):
                yield from self.case41(S, j, Q)
                return
        yield from self.case42(S, qs)

    def check_empty_wedges(self, S, qs):
        pts = self.pts
        b = S.b
        xs, ys = S.xs, S.ys
        for j in range(b):
            pj = pts[S.p(j)]
            for a, c, name in ((qs[j], S.p(j - 1), "D_j"), (qs[(j + 1) % b], S.p(j + 1), "D'_j")):
                pa, pc = pts[a], pts[c]
                sgn = 1 if cross(pj, pa, pc) > 0 else -1
                inside = ((orient_many(pj, pa, xs, ys) * sgn > 0)
                          & (orient_many(pj, pc, xs, ys) * sgn < 0))
                if inside.any():
                    bad = int(S.idx[np.flatnonzero(inside)[0]])
                    raise InvariantError(f"{name} is not empty", "C4", (S.p(j), bad))

    def case41(self, S, j, Q):
        pts = self.pts
        b = S.b
        p = S.p
        if b == 3:
            self.event("C4_1B_B3", S, j=j)
            if S.n != 6:
                raise InvariantError("six-point terminal has extra points", "C4_1B_B3", S.idx)
            from .oracle import min_decomposition
            sub = S.idx.tolist()
            res = min_decomposition(PointSet([pts[k] for k in sub]), limit_n=self.oracle_limit)
            if res.min_faces != 6:
                raise InvariantError(f"terminal minimum is {res.min_faces}, expected 6",
                                     "C4_1B_B3", sub)
            for f in res.witness.faces:
                self.add([sub[k] for k in f], "C4_1B_B3")
            return
        qj, qj1, qj2 = Q(j), Q(j + 1), Q(j + 2)
        if S.contains_any(_ccw(pts, [p(j - 1), qj, qj2])):
            self.event("C4_1A", S, j=j, q_j=qj)
            yield S.minus([p(j), p(j + 1), qj1])
            if not self.mesh.has(qj, qj2):
                raise InvariantError("no face holds chord q_j q_{j+2}", "C4_1A", (qj, qj2))
            face = self.mesh.cycle_from(qj, qj2)
            side = cross(pts[p(j)], pts[qj], pts[qj2])
            for v in face[1:]:
                if cross(pts[p(j)], pts[qj], pts[v]) * side <= 0:
                    raise InvariantError("chord face crosses line p_j q_j", "C4_1A", (v,))
            self.add([qj, p(j), qj1, qj2], "C4_1A")
            self.mesh.merge(qj2, qj, "C4_1A")
            for f in ([p(j - 1), p(j), qj], [p(j), p(j + 1), qj1],
                      [p(j + 1), qj2, qj1], [p(j + 1), p(j + 2), qj2]):
                self.add_checked(S, f, "C4_1A")
            return
        quad = [p(j + 1), p(j - 1), qj, qj1]
        if S.contains_any(_ccw(pts, quad)):
            raise InvariantError("quadrilateral p_{j-1} q_j q_{j+1} p_{j+1} is not empty",
                                 "C4_1B", quad)
        self.event("C4_1B", S, j=j, q_j=qj)
        yield S.minus([p(j), qj, qj1])
        if not self.mesh.has(p(j - 1), p(j + 1)):
            raise InvariantError("no face holds chord p_{j-1} p_{j+1}", "C4_1B")
        self.add(quad, "C4_1B")
        self.mesh.merge(p(j + 1), p(j - 1), "C4_1B")
        for f in ([p(j - 1), p(j), qj], [p(j), qj1, qj], [p(j), p(j + 1), qj1]):
            self.add_checked(S, f, "C4_1B")

    def case42(self, S, qs):
        b = S.b
        self.event("C4_2", S)
        inner = S.minus(S.hull)
        k0 = inner.hull.index(qs[0])
        if inner.hull[k0:] + inner.hull[:k0] != qs:
            raise InvariantError("inner hull mismatch", "C4_2", qs)
        yield inner
        mesh = self.mesh
        owners = [mesh.face_of(qs[j], qs[(j + 1) % b]) for j in range(b)]
        for j in range(b):
            if owners[j] == owners[(j + 1) % b]:
                raise InvariantError("consecutive inner edges share a face", "C4_2",
                                     (qs[j], qs[(j + 1) % b]))
        for j in range(b):
            a, c = qs[j], qs[(j + 1) % b]
            self.add([a, S.p(j), c], "C4_2")
            mesh.merge(c, a, "C4_2")
        for j in range(b):
            self.add_checked(S, [S.p(j), S.p(j + 1), qs[(j + 1) % b]], "C4_2")


def _drive(run: _Run, root: Subset):
    stack = [run.solve(root)]
    sent = None
    while stack:
        try:
            child = stack[-1].send(sent)
        except StopIteration:
            stack.pop()
            sent = None
            continue
        sent = None
        stack.append(run.solve(child))


def decompose(ps: PointSet, *, check_input: bool = True, oracle_limit: int = 10) -> Decomposition:
    """Convex decomposition of ``ps`` with ``3 * faces <= 4 * i + b + 3``.

    Deterministic for a fixed input order. Raises
    :class:`GeneralPositionError` on degenerate input and
    :class:`InvariantError` if an internal structural check fails.
    """
    if ps.n < 3:
        raise GeometryInputError("need at least 3 points")
    if check_input:
        bad = general_position(ps)
        if bad is not None:
            raise GeneralPositionError(bad)
    run = _Run(ps, oracle_limit)
    _drive(run, Subset(ps, range(ps.n)))
    return Decomposition(run.mesh.faces(), run.trace)


def classify(ps: PointSet) -> str:
    """Case label the construction applies to ``ps`` itself (no recursion)."""
    run = _Run(ps)
    step = run.dispatch(Subset(ps, range(ps.n)))
    try:
        next(step)
    except StopIteration:
        pass
    finally:
        step.close()
    return run.trace[0].case
