"""Planar primitives and exact predicates.

All decisions (orientation, in-circle, containment, intersection) are exact:
a floating-point evaluation is trusted only when its magnitude clears a
forward error bound, otherwise the determinant is re-evaluated in rational
arithmetic.  Coordinates are plain ``(x, y)`` float tuples.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

Coord = tuple[float, float]

_EPS = 2.0 ** -53
_ORIENT_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_INCIRCLE_BOUND = (10.0 + 96.0 * _EPS) * _EPS

POLYGON_VERTICES = 10


class PredicateError(ValueError):
    """Raised when a predicate is evaluated outside its domain."""


class GeometryError(ValueError):
    """Raised for invalid geometric input (bad polygons, rectangles)."""


class Point(NamedTuple):
    x: float
    y: float
    id: int


# --------------------------------------------------------------------------
# predicates


def _orient_exact(a: Coord, b: Coord, c: Coord) -> int:
    ax, ay = Fraction(a[0]), Fraction(a[1])
    det = (Fraction(b[0]) - ax) * (Fraction(c[1]) - ay) - (
        Fraction(b[1]) - ay
    ) * (Fraction(c[0]) - ax)
    return (det > 0) - (det < 0)


def orient(a: Coord, b: Coord, c: Coord) -> int:
    """Sign of the signed area of triangle ``abc`` (+1 CCW, -1 CW, 0 collinear)."""
    left = (b[0] - a[0]) * (c[1] - a[1])
    right = (b[1] - a[1]) * (c[0] - a[0])
    det = left - right
    bound = _ORIENT_BOUND * (abs(left) + abs(right))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return _orient_exact(a, b, c)


def _in_circle_exact(a: Coord, b: Coord, c: Coord, d: Coord) -> int:
    dx, dy = Fraction(d[0]), Fraction(d[1])
    adx, ady = Fraction(a[0]) - dx, Fraction(a[1]) - dy
    bdx, bdy = Fraction(b[0]) - dx, Fraction(b[1]) - dy
    cdx, cdy = Fraction(c[0]) - dx, Fraction(c[1]) - dy
    det = (
        (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
        + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady)
    )
    return (det > 0) - (det < 0)


def _in_circle_raw(a: Coord, b: Coord, c: Coord, d: Coord) -> int:
    adx = a[0] - d[0]
    ady = a[1] - d[1]
    bdx = b[0] - d[0]
    bdy = b[1] - d[1]
    cdx = c[0] - d[0]
    cdy = c[1] - d[1]
    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    cdxady = cdx * ady
    adxcdy = adx * cdy
    adxbdy = adx * bdy
    bdxady = bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (
        alift * (bdxcdy - cdxbdy)
        + blift * (cdxady - adxcdy)
        + clift * (adxbdy - bdxady)
    )
    permanent = (
        (abs(bdxcdy) + abs(cdxbdy)) * alift
        + (abs(cdxady) + abs(adxcdy)) * blift
        + (abs(adxbdy) + abs(bdxady)) * clift
    )
    bound = _INCIRCLE_BOUND * permanent
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return _in_circle_exact(a, b, c, d)


def in_circle(a: Coord, b: Coord, c: Coord, d: Coord) -> int:
    """+1 if ``d`` is strictly inside the circle through CCW ``a, b, c``,
    0 if on it, -1 outside.

    Raises PredicateError when ``a, b, c`` are collinear.  The result is the
    sign of the standard lifted determinant, so a clockwise triple yields the
    negated answer.
    """
    if orient(a, b, c) == 0:
        raise PredicateError(f"in_circle: collinear triangle {a}, {b}, {c}")
    return _in_circle_raw(a, b, c, d)


def in_circle_perturbed(
    a: Coord, b: Coord, c: Coord, d: Coord, ia: int, ib: int, ic: int, id_: int
) -> int:
    """``in_circle`` with cocircular ties broken symbolically; never returns 0.

    Each point's lifted coordinate ``x^2 + y^2`` is raised by an infinitesimal
    that is larger for smaller ids.  On an exact tie the determinant's sign is
    then that of the cofactor belonging to the smallest id among the four.
    ``a, b, c`` must be counter-clockwise.
    """
    s = _in_circle_raw(a, b, c, d)
    if s:
        return s
    k = min(ia, ib, ic, id_)
    if k == ia:
        return orient(b, c, d)
    if k == ib:
        return -orient(a, c, d)
    if k == ic:
        return orient(a, b, d)
    return -orient(a, b, c)


# --------------------------------------------------------------------------
# rectangles and polygons


@dataclass(frozen=True)
class Rect:
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    def __post_init__(self) -> None:
        if not (self.min_x <= self.max_x and self.min_y <= self.max_y):
            raise GeometryError(f"inverted rectangle {self}")

    @property
    def area(self) -> float:
        return (self.max_x - self.min_x) * (self.max_y - self.min_y)

    def contains(self, p: Coord) -> bool:
        return self.min_x <= p[0] <= self.max_x and self.min_y <= p[1] <= self.max_y

    def contains_rect(self, other: "Rect") -> bool:
        return (
            self.min_x <= other.min_x
            and self.min_y <= other.min_y
            and other.max_x <= self.max_x
            and other.max_y <= self.max_y
        )

    def intersects(self, other: "Rect") -> bool:
        return not (
            other.min_x > self.max_x
            or other.max_x < self.min_x
            or other.min_y > self.max_y
            or other.max_y < self.min_y
        )

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.min_x, self.min_y, self.max_x, self.max_y)


UNIT_SQUARE = Rect(0.0, 0.0, 1.0, 1.0)


def _on_segment(p: Coord, a: Coord, b: Coord) -> bool:
    # assumes orient(a, b, p) == 0
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(
        a[1], b[1]
    )


def segments_intersect(p: Coord, q: Coord, a: Coord, b: Coord) -> bool:
    """Closed segment intersection test, exact."""
    o1 = orient(p, q, a)
    o2 = orient(p, q, b)
    o3 = orient(a, b, p)
    o4 = orient(a, b, q)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _on_segment(a, p, q):
        return True
    if o2 == 0 and _on_segment(b, p, q):
        return True
    if o3 == 0 and _on_segment(p, a, b):
        return True
    if o4 == 0 and _on_segment(q, a, b):
        return True
    return False


@dataclass(frozen=True)
class Segment:
    a: Coord
    b: Coord

    def __post_init__(self) -> None:
        if tuple(self.a) == tuple(self.b):
            raise GeometryError("degenerate segment")


@dataclass(frozen=True)
class Polygon:
    """Simple polygon, stored counter-clockwise and implicitly closed."""

    vertices: tuple[Coord, ...]
    _mbr: Rect = field(init=False, repr=False, compare=False)
    _edges: tuple = field(init=False, repr=False, compare=False)

    def __init__(self, vertices: Iterable[Sequence[float]]):
        verts = tuple((float(v[0]), float(v[1])) for v in vertices)
        if len(verts) < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        for x, y in verts:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise GeometryError("polygon coordinates must be finite")
        if len(set(verts)) != len(verts):
            raise GeometryError("polygon has repeated vertices")
        # orientation at the lowest-then-leftmost vertex (a convex corner)
        n = len(verts)
        k = min(range(n), key=lambda i: (verts[i][1], verts[i][0]))
        turn = orient(verts[k - 1], verts[k], verts[(k + 1) % n])
        if turn == 0:
            raise GeometryError("polygon has zero area or is degenerate")
        if turn < 0:
            verts = verts[::-1]
        if not _is_simple(verts):
            raise GeometryError("polygon is not simple")
        object.__setattr__(self, "vertices", verts)
        xs = [v[0] for v in verts]
        ys = [v[1] for v in verts]
        object.__setattr__(self, "_mbr", Rect(min(xs), min(ys), max(xs), max(ys)))
        edges = []
        for i in range(len(verts)):
            u, v = verts[i - 1], verts[i]
            edges.append(
                (min(u[0], v[0]), min(u[1], v[1]), max(u[0], v[0]), max(u[1], v[1]), u, v)
            )
        object.__setattr__(self, "_edges", tuple(edges))

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def area(self) -> float:
        v = self.vertices
        return 0.5 * math.fsum(
            v[i - 1][0] * v[i][1] - v[i][0] * v[i - 1][1] for i in range(len(v))
        )

    def edges(self) -> Iterable[tuple[Coord, Coord]]:
        v = self.vertices
        for i in range(len(v)):
            yield v[i - 1], v[i]


def _is_simple(verts: tuple[Coord, ...]) -> bool:
    n = len(verts)
    edges = [(verts[i], verts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        a, b = edges[i]
        c = edges[(i + 1) % n][1]
        # adjacent edges may only share their common vertex
        if orient(a, b, c) == 0 and (
            (a[0] - b[0]) * (c[0] - b[0]) + (a[1] - b[1]) * (c[1] - b[1]) > 0
        ):
            return False
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if segments_intersect(a, b, edges[j][0], edges[j][1]):
                return False
    return True


def mbr(A: Polygon) -> Rect:
    return A._mbr


def point_in_polygon(p: Coord, A: Polygon) -> bool:
    """Closed-region containment: boundary points count as inside."""
    px, py = p
    inside = False
    verts = A.vertices
    ax, ay = verts[-1]
    for bx, by in verts:
        if (ay > py) != (by > py):
            left = (bx - ax) * (py - ay)
            right = (by - ay) * (px - ax)
            det = left - right
            bound = _ORIENT_BOUND * (abs(left) + abs(right))
            if det > bound:
                s = 1
            elif -det > bound:
                s = -1
            else:
                s = _orient_exact((ax, ay), (bx, by), p)
            if s == 0:
                return True
            if (s > 0) == (by > ay):
                inside = not inside
        elif py == ay:
            if px == ax:
                return True
            if py == by and (ax <= px <= bx or bx <= px <= ax):
                return True
        ax, ay = bx, by
    return inside


def on_boundary(p: Coord, A: Polygon) -> bool:
    for a, b in A.edges():
        if orient(a, b, p) == 0 and _on_segment(p, a, b):
            return True
    return False


def segment_intersects_polygon(s: Segment | tuple[Coord, Coord], A: Polygon) -> bool:
    """True iff the closed segment meets the closed region bounded by ``A``."""
    if isinstance(s, Segment):
        a, b = s.a, s.b
    else:
        a, b = s
    if point_in_polygon(a, A):
        return True
    return segment_reaches_polygon(a, b, A)


def segment_reaches_polygon(a: Coord, b: Coord, A: Polygon) -> bool:
    """``segment_intersects_polygon`` for a segment whose start ``a`` is known
    to lie outside ``A``.

    From an exterior start the segment can only reach the region by touching
    its boundary, so testing the edges alone is exact.
    """
    box = A._mbr
    sx0, sx1 = (a[0], b[0]) if a[0] <= b[0] else (b[0], a[0])
    sy0, sy1 = (a[1], b[1]) if a[1] <= b[1] else (b[1], a[1])
    if sx1 < box.min_x or sx0 > box.max_x or sy1 < box.min_y or sy0 > box.max_y:
        return False
    for ex0, ey0, ex1, ey1, u, v in A._edges:
        if ex1 < sx0 or ex0 > sx1 or ey1 < sy0 or ey0 > sy1:
            continue
        if segments_intersect(a, b, u, v):
            return True
    return False


def interior_point(A: Polygon) -> Coord:
    """A deterministic point strictly inside ``A``.

    The vertex centroid is used when it is strictly interior (always the case
    for convex polygons); otherwise the centroid of the first ear.
    """
    v = A.vertices
    n = len(v)
    c = (math.fsum(p[0] for p in v) / n, math.fsum(p[1] for p in v) / n)
    if point_in_polygon(c, A) and not on_boundary(c, A):
        return c
    for i in range(n):
        a, b, d = v[i - 1], v[i], v[(i + 1) % n]
        if orient(a, b, d) <= 0:
            continue
        blocked = False
        for j in range(n):
            if j in (i, (i - 1) % n, (i + 1) % n):
                continue
            q = v[j]
            if orient(a, b, q) >= 0 and orient(b, d, q) >= 0 and orient(d, a, q) >= 0:
                blocked = True
                break
        if not blocked:
            return ((a[0] + b[0] + d[0]) / 3.0, (a[1] + b[1] + d[1]) / 3.0)
    raise GeometryError("no ear found; polygon is not simple")  # pragma: no cover


def random_query_polygon(
    rng_seed: int, query_size: float, n_vertices: int = POLYGON_VERTICES
) -> Polygon:
    """Random star-shaped polygon whose MBR covers ``query_size`` of the unit square.

    Angles are stratified (one per sector of width 2*pi/n) so consecutive gaps
    stay below pi and the polygon is star-shaped about its centre.  Radii are
    uniform in [0.25, 1].  The MBR is then mapped onto a square of side
    sqrt(query_size) placed uniformly inside the unit square; the axis-aligned
    map preserves simplicity and the area/MBR fill ratio.
    """
    if not (0.0 < query_size <= 1.0):
        raise GeometryError(f"query_size must be in (0, 1], got {query_size}")
    rng = random.Random(rng_seed)
    cx, cy = rng.random(), rng.random()
    sector = 2.0 * math.pi / n_vertices
    raw = []
    for i in range(n_vertices):
        theta = (i + rng.random()) * sector
        r = rng.uniform(0.25, 1.0)
        raw.append((cx + r * math.cos(theta), cy + r * math.sin(theta)))
    xs = [p[0] for p in raw]
    ys = [p[1] for p in raw]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    side = math.sqrt(query_size)
    ox = rng.uniform(0.0, 1.0 - side)
    oy = rng.uniform(0.0, 1.0 - side)
    verts = [
        (
            min(1.0, ox + (x - x0) / (x1 - x0) * side),
            min(1.0, oy + (y - y0) / (y1 - y0) * side),
        )
        for x, y in raw
    ]
    return Polygon(verts)


# --------------------------------------------------------------------------
# text format


def format_polygon(A: Polygon) -> str:
    return " ".join(f"{x!r} {y!r}" for x, y in A.vertices)


def parse_polygon(line: str) -> Polygon:
    parts = line.split()
    if len(parts) % 2 or len(parts) < 6:
        raise GeometryError(f"polygon line needs an even count >= 6 of numbers: {line!r}")
    vals = [float(t) for t in parts]
    return Polygon(zip(vals[0::2], vals[1::2]))


def read_polygons(path) -> list[Polygon]:
    with open(path) as fh:
        return [parse_polygon(line) for line in fh if line.strip() and not line.startswith("#")]


def write_polygons(path, polygons: Iterable[Polygon]) -> None:
    with open(path, "w") as fh:
        for A in polygons:
            fh.write(format_polygon(A) + "\n")
