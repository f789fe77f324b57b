"""Instance generators and the plain-text point file format.

File format: optional ``#`` comment lines, a line with the point count, then
one ``x y`` line per point.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .decomp import classify
from .geom import (
    GeneralPositionError,
    GeometryInputError,
    PointSet,
    convex_hull,
    cross,
    general_position,
)

KINDS = (
    "random_box", "convex", "one_interior", "two_interior",
    "case2_trigger", "case3_trigger", "nested_rings", "case4_b3_terminal",
)

# labels each case-targeted kind may aim at (first entry is the default)
TARGETS = {
    "case2_trigger": ("C2A", "C2B"),
    "case3_trigger": ("C3_1", "C3_2", "C3_3"),
    "nested_rings": ("C4_1A", "C4_1B", "C4_2"),
    "case4_b3_terminal": ("C4_1B_B3",),
}


class GenerationError(RuntimeError):
    """The attempt budget ran out before a valid instance was found."""


@dataclass
class GenSpec:
    kind: str
    n: int | None = None
    seed: int = 0
    b: int | None = None
    layers: int | None = None
    coord_range: int = 1_000_000
    target: str | None = None
    attempts: int = 2000

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.target is not None and self.target not in TARGETS.get(self.kind, ()):
            raise ValueError(f"kind {self.kind} cannot target {self.target}")
        if self.coord_range < 4 or self.coord_range > 2 ** 30:
            raise ValueError("coord_range must lie in [4, 2**30]")


# ------------------------------------------------------------------ file I/O

def parse_points(text: str) -> PointSet:
    """Parse the point file format and check general position."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append((lineno, line.split()))
    if not rows:
        raise GeometryInputError("empty point file")
    lineno, head = rows[0]
    if len(head) != 1:
        raise GeometryInputError(f"line {lineno}: expected the point count")
    n = _int(head[0], lineno)
    if n < 0:
        raise GeometryInputError(f"line {lineno}: negative point count")
    body = rows[1:]
    if len(body) != n:
        raise GeometryInputError(f"expected {n} points, found {len(body)}")
    pts = []
    for lineno, fields in body:
        if len(fields) != 2:
            raise GeometryInputError(f"line {lineno}: expected two integers")
        pts.append((_int(fields[0], lineno), _int(fields[1], lineno)))
    return PointSet.checked(pts)


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok, 10)
    except ValueError:
        raise GeometryInputError(f"line {lineno}: {tok!r} is not an integer") from None


def emit_points(ps: PointSet, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend("# " + c for c in comment.splitlines())
    lines.append(str(ps.n))
    lines.extend(f"{x} {y}" for x, y in ps.points)
    return "\n".join(lines) + "\n"


def read_points(path) -> PointSet:
    with open(path, encoding="utf-8") as fh:
        return parse_points(fh.read())


# ------------------------------------------------------------------ sampling helpers

def _creates_degeneracy(xs: np.ndarray, ys: np.ndarray, c) -> bool:
    """True iff adding ``c`` to the points duplicates one or makes a collinear triple."""
    if len(xs) == 0:
        return False
    dx = xs - c[0]
    dy = ys - c[1]
    if np.any((dx == 0) & (dy == 0)):
        return True
    g = np.gcd(dx, dy)
    dx, dy = dx // g, dy // g
    flip = (dx < 0) | ((dx == 0) & (dy < 0))
    dx[flip] = -dx[flip]
    dy[flip] = -dy[flip]
    order = np.lexsort((dy, dx))
    dx, dy = dx[order], dy[order]
    return bool(np.any((dx[1:] == dx[:-1]) & (dy[1:] == dy[:-1])))


class _Builder:
    """Points added one at a time, each redrawn until general position holds."""

    def __init__(self):
        self.xs = np.empty(0, dtype=np.int64)
        self.ys = np.empty(0, dtype=np.int64)
        self.pts: list = []

    def try_add(self, c) -> bool:
        c = (int(c[0]), int(c[1]))
        if _creates_degeneracy(self.xs, self.ys, c):
            return False
        self.pts.append(c)
        self.xs = np.append(self.xs, c[0])
        self.ys = np.append(self.ys, c[1])
        return True

    def add(self, draw, budget: int = 10_000):
        for _ in range(budget):
            if self.try_add(draw()):
                return
        raise GenerationError("could not place a point in general position")


def _random_box(rng, n, R):
    if n > (2 * R + 1):
        raise GenerationError(f"{n} points do not fit in general position in a box of radius {R}")
    bld = _Builder()
    for _ in range(n):
        bld.add(lambda: (rng.randint(-R, R), rng.randint(-R, R)))
    return bld.pts


def _convex(rng, n, R):
    """n points in strictly convex position near a circle of radius R."""
    for _ in range(100):
        angles = sorted(rng.random() * 2 * math.pi for _ in range(n))
        pts = []
        seen = set()
        for a in angles:
            p = (round(R * math.cos(a)), round(R * math.sin(a)))
            if p not in seen:
                seen.add(p)
                pts.append(p)
        if len(pts) != n:
            continue
        ps = PointSet(pts)
        if general_position(ps) is None and len(convex_hull(ps)) == n:
            return pts
    raise GenerationError(f"no convex {n}-gon found at radius {R}")


def _inside_hull(pts, hull, c) -> bool:
    return all(cross(pts[hull[k - 1]], pts[hull[k]], c) > 0 for k in range(len(hull)))


def _point_in_polygon(rng, poly):
    """Integer point strictly inside the convex CCW polygon ``poly`` (roughly uniform)."""
    fan = [(poly[0], poly[k], poly[k + 1]) for k in range(1, len(poly) - 1)]
    weights = [cross(*t) for t in fan]
    hull = list(range(len(poly)))
    for _ in range(10_000):
        a, b, c = rng.choices(fan, weights)[0]
        u, v = rng.random(), rng.random()
        if u + v > 1:
            u, v = 1 - u, 1 - v
        p = (round(a[0] + u * (b[0] - a[0]) + v * (c[0] - a[0])),
             round(a[1] + u * (b[1] - a[1]) + v * (c[1] - a[1])))
        if _inside_hull(poly, hull, p):
            return p
    raise GenerationError("polygon has no interior lattice points")


def _with_interior(rng, n, k, R, b=None):
    """A convex polygon with ``k`` points strictly inside it, ``n`` points in all."""
    if n - k < 3:
        raise ValueError(f"need at least {k + 3} points")
    outer = _convex(rng, n - k, R)
    bld = _Builder()
    for p in outer:
        if not bld.try_add(p):
            raise GenerationError("outer polygon is degenerate")
    for _ in range(k):
        bld.add(lambda: _point_in_polygon(rng, outer))
    return bld.pts


def _polar(R, angle):
    return (round(R * math.cos(angle)), round(R * math.sin(angle)))


def ring_ratio(b: int) -> float:
    """Radius ratio between consecutive rings of a nested-ring instance.

    Each inner edge must see exactly one outer vertex and every ear must hold
    an inner point, which needs ratio > cos(2 pi / b) / cos(pi / b); the next
    ring must stay hidden when one vertex is removed, which needs
    ratio < cos(pi / b). The midpoint of that interval is used.
    """
    lo = max(0.0, math.cos(2 * math.pi / b) / math.cos(math.pi / b))
    hi = math.cos(math.pi / b)
    return (lo + hi) / 2


def _nested_rings(rng, b, layers, R, core=0):
    """``layers`` concentric b-gons, alternately rotated by pi / b, with small jitter.

    ``core`` extra points are scattered near the centre of the innermost ring.
    """
    t = ring_ratio(b)
    bld = _Builder()
    phase = rng.random() * 2 * math.pi
    radius = float(R)
    for layer in range(layers):
        jitter = radius * 0.02
        for j in range(b):
            ang = phase + (2 * j + layer) * math.pi / b

            def draw(ang=ang, radius=radius, jitter=jitter):
                x, y = _polar(radius, ang)
                return (x + round(rng.uniform(-jitter, jitter)),
                        y + round(rng.uniform(-jitter, jitter)))

            bld.add(draw)
        radius *= t
        if radius < 8:
            raise GenerationError("rings shrink below the integer grid; raise coord_range")
    inner = radius / t
    for _ in range(core):
        bld.add(lambda: _polar(inner * 0.6 * math.sqrt(rng.random()), rng.random() * 2 * math.pi))
    return bld.pts


def _annulus(rng, n, R, inner_frac):
    """Convex outer polygon plus points in a band just inside it."""
    b = max(3, min(n - 3, rng.randint(3, max(3, n // 2))))
    outer = _convex(rng, b, R)
    bld = _Builder()
    for p in outer:
        if not bld.try_add(p):
            raise GenerationError("outer polygon is degenerate")
    floor2 = inner_frac * R * R

    def draw():
        for _ in range(1000):
            c = _point_in_polygon(rng, outer)
            if c[0] * c[0] + c[1] * c[1] >= floor2:
                return c
        raise GenerationError("band inside the polygon is too thin")

    for _ in range(n - b):
        bld.add(draw)
    return bld.pts


# ------------------------------------------------------------------ generate

def generate(spec: GenSpec) -> PointSet:
    """Deterministic instance for ``spec``; raises GenerationError when the budget runs out."""
    rng = random.Random(spec.seed)
    R = spec.coord_range
    kind = spec.kind
    n = spec.n
    if kind == "random_box":
        return _finish(_random_box(rng, _need(n, 3), R))
    if kind == "convex":
        return _finish(_convex(rng, _need(n, 3), R))
    if kind == "one_interior":
        return _finish(_with_interior(rng, _need(n, 4), 1, R))
    if kind == "two_interior":
        return _finish(_with_interior(rng, _need(n, 5), 2, R))
    if kind == "case4_b3_terminal":
        return _targeted(spec, rng, lambda: _nested_rings(rng, 3, 2, R))
    if kind == "nested_rings":
        b = spec.b if spec.b is not None else 4
        layers = spec.layers if spec.layers is not None else 2
        if b < 3 or layers < 1:
            raise ValueError("nested_rings needs b >= 3 and layers >= 1")
        # n beyond the rings adds points near the centre (C4_1A needs at least one)
        if n is not None:
            core = n - b * layers
            if core < 0:
                raise ValueError(f"n={n} is smaller than b * layers = {b * layers}")
        else:
            core = 1 if spec.target == "C4_1A" else 0
        sample = lambda: _nested_rings(rng, b, layers, R, core)  # noqa: E731
        if layers == 1:
            return _finish(sample())
        return _targeted(spec, rng, sample, default=lambda label: label.startswith("C4"))
    if kind == "case2_trigger":
        n = _need(n if n is not None else 12, 7)
        return _targeted(spec, rng, lambda: _annulus(rng, n, R, rng.choice([0.5, 0.7, 0.85])))
    if kind == "case3_trigger":
        n = _need(n if n is not None else 12, 7)
        return _targeted(spec, rng, lambda: _case3_sample(rng, n, R))
    raise ValueError(kind)


def _need(n, lo):
    if n is None:
        raise ValueError("this kind needs n")
    if n < lo:
        raise ValueError(f"this kind needs n >= {lo}")
    return n


def _finish(pts) -> PointSet:
    ps = PointSet(pts)
    bad = general_position(ps)
    if bad is not None:
        raise GeneralPositionError(bad)
    return ps


def _targeted(spec: GenSpec, rng, sample, default=None) -> PointSet:
    """Resample until the top-level case label is one the kind aims at."""
    if spec.target:
        wanted = [spec.target]
        accept = wanted.__contains__
    else:
        wanted = list(TARGETS[spec.kind])
        accept = default or wanted.__contains__
    last = None
    for _ in range(spec.attempts):
        try:
            ps = _finish(sample())
        except (GenerationError, GeneralPositionError) as e:
            last = e
            continue
        label = classify(ps)
        if accept(label):
            return ps
        last = label
    raise GenerationError(
        f"{spec.kind}: no instance with label in {wanted} after {spec.attempts} "
        f"attempts (last outcome: {last})")


def _case3_sample(rng, n, R):
    """A triangle or quadrilateral crowded with interior points.

    With few hull vertices and many points close to the hull, removing one
    vertex tends to expose a long chain.
    """
    b = rng.choice((3, 3, 4))
    return _with_interior(rng, n, n - b, R)
