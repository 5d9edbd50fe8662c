"""Delaunay triangulation by incremental Bowyer-Watson insertion.

The convex hull is closed off with *ghost triangles*: every hull edge ``u->v``
(interior on its left) is paired with a triangle ``(v, u, GHOST)``.  A point
conflicts with a ghost triangle when it lies strictly outside the hull edge,
or on the open edge itself.  This avoids the super-triangle and its numerical
failure modes while keeping insertion uniform.

Insertion order is a biased randomized insertion order (random rounds, each
sorted along a Hilbert curve) drawn from a fixed seed, so the walk that
locates each new point stays short and the output is reproducible.
"""
from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .geometry import Coord, in_circle_perturbed, orient

GHOST = -1
_ORDER_SEED = 0x5EED


class TriangulationError(ValueError):
    pass


@dataclass
class Triangulation:
    points: list[Coord]
    triangles: list[tuple[int, int, int]]
    adjacency: list[tuple[int, ...]]
    hull: list[int] = field(default_factory=list)

    def voronoi_neighbors(self, p_id: int) -> tuple[int, ...]:
        return voronoi_neighbors(self, p_id)

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, nb in enumerate(self.adjacency) for j in nb if i < j]

    def dump_edges(self, path) -> None:
        with open(path, "w") as fh:
            for i, j in self.edges():
                fh.write(f"{i} {j}\n")


def voronoi_neighbors(T: Triangulation, p_id: int) -> tuple[int, ...]:
    """Delaunay-adjacent ids of ``p_id``, i.e. its Voronoi neighbours, ascending."""
    if not isinstance(p_id, int) or not 0 <= p_id < len(T.adjacency):
        raise LookupError(f"unknown point id {p_id!r}")
    return T.adjacency[p_id]


# --------------------------------------------------------------------------
# insertion order


def _hilbert_index(x: int, y: int, order: int) -> int:
    d = 0
    s = 1 << (order - 1)
    while s:
        rx = 1 if x & s else 0
        ry = 1 if y & s else 0
        d += s * s * ((3 * rx) ^ ry)
        if ry == 0:
            if rx == 1:
                x = s - 1 - x
                y = s - 1 - y
            x, y = y, x
        s >>= 1
    return d


def insertion_order(points: Sequence[Coord], seed: int = _ORDER_SEED) -> list[int]:
    n = len(points)
    idx = list(range(n))
    random.Random(seed).shuffle(idx)
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x0, y0 = min(xs), min(ys)
    span = max(max(xs) - x0, max(ys) - y0) or 1.0
    order = 16
    scale = ((1 << order) - 1) / span
    key = [
        _hilbert_index(int((p[0] - x0) * scale), int((p[1] - y0) * scale), order)
        for p in points
    ]
    rounds = []
    hi = n
    while hi > 0:
        lo = hi // 2 if hi > 64 else 0
        rounds.append(idx[lo:hi])
        hi = lo
    out: list[int] = []
    for r in reversed(rounds):
        out.extend(sorted(r, key=key.__getitem__))
    return out


# --------------------------------------------------------------------------
# construction


def _check_input(points: Sequence[Coord]) -> None:
    if len(points) < 3:
        raise TriangulationError(f"need at least 3 points, got {len(points)}")
    seen: dict[Coord, int] = {}
    for i, p in enumerate(points):
        if not (math.isfinite(p[0]) and math.isfinite(p[1])):
            raise TriangulationError(f"point {i} has non-finite coordinates")
        j = seen.setdefault((p[0], p[1]), i)
        if j != i:
            raise TriangulationError(f"duplicate points: ids {j} and {i} at {p}")


class _Builder:
    """Flat-array triangle store.

    Triangle ``t`` has vertices ``V[3t:3t+3]`` (CCW) and neighbours
    ``N[3t:3t+3]``; ``N[3t+i]`` lies across the edge opposite ``V[3t+i]``.
    Ghost triangles keep GHOST in slot 2.
    """

    def __init__(self, pts: Sequence[Coord]):
        self.pts = pts
        self.V: list[int] = []
        self.N: list[int] = []
        self.alive: list[bool] = []
        self.free: list[int] = []
        self.last = 0

    def _new(self) -> int:
        if self.free:
            t = self.free.pop()
            self.alive[t] = True
            return t
        t = len(self.alive)
        self.V.extend((0, 0, 0))
        self.N.extend((-1, -1, -1))
        self.alive.append(True)
        return t

    def init_triangle(self, a: int, b: int, c: int) -> None:
        pts = self.pts
        if orient(pts[a], pts[b], pts[c]) < 0:
            b, c = c, b
        t = self._new()
        g0, g1, g2 = self._new(), self._new(), self._new()
        # real triangle
        self.V[3 * t: 3 * t + 3] = [a, b, c]
        self.N[3 * t: 3 * t + 3] = [g1, g2, g0]
        # ghosts across (a,b) , (b,c), (c,a)
        self.V[3 * g0: 3 * g0 + 3] = [b, a, GHOST]
        self.V[3 * g1: 3 * g1 + 3] = [c, b, GHOST]
        self.V[3 * g2: 3 * g2 + 3] = [a, c, GHOST]
        # ghost (v,u,G): opposite v -> edge (u,G), opposite u -> edge (G,v), opposite G -> real
        self.N[3 * g0: 3 * g0 + 3] = [g2, g1, t]
        self.N[3 * g1: 3 * g1 + 3] = [g0, g2, t]
        self.N[3 * g2: 3 * g2 + 3] = [g1, g0, t]
        self.last = t

    def _conflict(self, t: int, p: int) -> bool:
        V = self.V
        pts = self.pts
        a, b, c = V[3 * t], V[3 * t + 1], V[3 * t + 2]
        q = pts[p]
        if c == GHOST:
            pa, pb = pts[a], pts[b]
            s = orient(pa, pb, q)
            if s:
                return s > 0
            return (
                min(pa[0], pb[0]) <= q[0] <= max(pa[0], pb[0])
                and min(pa[1], pb[1]) <= q[1] <= max(pa[1], pb[1])
            )
        return in_circle_perturbed(pts[a], pts[b], pts[c], q, a, b, c, p) > 0

    def _locate(self, p: int) -> int:
        V, N, pts = self.V, self.N, self.pts
        q = pts[p]
        t = self.last
        if not self.alive[t]:
            t = self.alive.index(True)
        while True:
            base = 3 * t
            if V[base + 2] == GHOST:
                if orient(pts[V[base]], pts[V[base + 1]], q) > 0:
                    return t
                t = N[base + 2]
                continue
            a, b, c = V[base], V[base + 1], V[base + 2]
            pa, pb, pc = pts[a], pts[b], pts[c]
            if orient(pb, pc, q) < 0:
                t = N[base]
            elif orient(pc, pa, q) < 0:
                t = N[base + 1]
            elif orient(pa, pb, q) < 0:
                t = N[base + 2]
            else:
                return t

    def insert(self, p: int) -> None:
        V, N = self.V, self.N
        t0 = self._locate(p)
        if not self._conflict(t0, p):
            raise TriangulationError(f"located triangle does not conflict with point {p}")
        cavity = {t0}
        stack = [t0]
        boundary: list[tuple[int, int, int]] = []  # (u, v, outer)
        while stack:
            t = stack.pop()
            base = 3 * t
            for i in range(3):
                nb = N[base + i]
                if nb in cavity:
                    continue
                if self._conflict(nb, p):
                    cavity.add(nb)
                    stack.append(nb)
        for t in cavity:
            base = 3 * t
            for i in range(3):
                nb = N[base + i]
                if nb not in cavity:
                    u = V[base + (i + 1) % 3]
                    v = V[base + (i + 2) % 3]
                    boundary.append((u, v, nb))
        for t in cavity:
            self.alive[t] = False
            self.free.append(t)
        by_start: dict[int, int] = {}
        by_end: dict[int, int] = {}
        made = []
        for u, v, outer in boundary:
            t = self._new()
            made.append((t, u, v, outer))
            by_start[u] = t
            by_end[v] = t
        for t, u, v, outer in made:
            # triangle (u, v, p): opposite u -> starts at v; opposite v -> ends at u
            n_u = by_start[v]
            n_v = by_end[u]
            ob = 3 * outer
            for k in range(3):
                w = V[ob + k]
                if w != u and w != v:
                    N[ob + k] = t
                    break
            base = 3 * t
            if u == GHOST:
                # rotate (G, v, p) -> (v, p, G)
                V[base: base + 3] = [v, p, GHOST]
                N[base: base + 3] = [n_v, outer, n_u]
            elif v == GHOST:
                # rotate (u, G, p) -> (p, u, G)
                V[base: base + 3] = [p, u, GHOST]
                N[base: base + 3] = [outer, n_u, n_v]
            else:
                V[base: base + 3] = [u, v, p]
                N[base: base + 3] = [n_u, n_v, outer]
                self.last = t

    def finish(self) -> tuple[list[tuple[int, int, int]], list[set[int]], list[int]]:
        V = self.V
        n = len(self.pts)
        tris = []
        adj: list[set[int]] = [set() for _ in range(n)]
        hull_next: dict[int, int] = {}
        for t, ok in enumerate(self.alive):
            if not ok:
                continue
            a, b, c = V[3 * t], V[3 * t + 1], V[3 * t + 2]
            if c == GHOST:
                hull_next[b] = a
                continue
            tris.append((a, b, c))
            adj[a].update((b, c))
            adj[b].update((a, c))
            adj[c].update((a, b))
        hull = []
        if hull_next:
            start = min(hull_next)
            v = start
            while True:
                hull.append(v)
                v = hull_next[v]
                if v == start:
                    break
        return tris, adj, hull


def build(points: Sequence[Coord]) -> Triangulation:
    """Delaunay triangulation of ``points`` (ids are list positions)."""
    pts = [(float(p[0]), float(p[1])) for p in points]
    _check_input(pts)
    order = insertion_order(pts)
    a = order[0]
    b = order[1]
    c = -1
    for k in range(2, len(order)):
        if orient(pts[a], pts[b], pts[order[k]]) != 0:
            c = order[k]
            break
    if c < 0:
        raise TriangulationError("all points are collinear")
    builder = _Builder(pts)
    builder.init_triangle(a, b, c)
    for p in order[2:]:
        if p != c:
            builder.insert(p)
    tris, adj, hull = builder.finish()
    tris = sorted(_canonical(t) for t in tris)
    return Triangulation(
        points=pts,
        triangles=tris,
        adjacency=[tuple(sorted(s)) for s in adj],
        hull=hull,
    )


def _canonical(t: tuple[int, int, int]) -> tuple[int, int, int]:
    # rotate so the smallest id leads, preserving orientation
    a, b, c = t
    if a < b and a < c:
        return (a, b, c)
    if b < c:
        return (b, c, a)
    return (c, a, b)


# --------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    empty_circumcircle: bool
    symmetric: bool
    connected: bool
    euler: bool
    oriented: bool
    n_triangles: int
    hull_size: int
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.empty_circumcircle
            and self.symmetric
            and self.connected
            and self.euler
            and self.oriented
        )


def validate(T: Triangulation, exhaustive: bool = False) -> ValidationReport:
    """Check a triangulation's structural and Delaunay properties.

    The empty-circumcircle check is local (every interior edge is locally
    Delaunay), which implies the global property for a valid triangulation.
    ``exhaustive=True`` additionally tests every triangle against every
    point, O(t*n).
    """
    pts = T.points
    n = len(pts)
    failures: list[str] = []

    oriented = True
    opposite: dict[tuple[int, int], list[tuple[int, tuple[int, int, int]]]] = {}
    for tri in T.triangles:
        a, b, c = tri
        if orient(pts[a], pts[b], pts[c]) <= 0:
            oriented = False
            failures.append(f"triangle {tri} not counter-clockwise")
        for u, v, w in ((a, b, c), (b, c, a), (c, a, b)):
            opposite.setdefault((min(u, v), max(u, v)), []).append((w, tri))

    empty = True
    for (u, v), lst in opposite.items():
        if len(lst) > 2:
            empty = False
            failures.append(f"edge {(u, v)} shared by {len(lst)} triangles")
            continue
        if len(lst) == 2:
            (w1, t1), (w2, _) = lst
            a, b, c = t1
            if in_circle_perturbed(pts[a], pts[b], pts[c], pts[w2], a, b, c, w2) > 0:
                empty = False
                failures.append(f"edge {(u, v)} not locally Delaunay")
    if exhaustive:
        for tri in T.triangles:
            a, b, c = tri
            for d in range(n):
                if d in tri:
                    continue
                if in_circle_perturbed(pts[a], pts[b], pts[c], pts[d], a, b, c, d) > 0:
                    empty = False
                    failures.append(f"point {d} inside circumcircle of {tri}")
                    break

    symmetric = all(i in T.adjacency[j] for i in range(n) for j in T.adjacency[i])
    if not symmetric:
        failures.append("adjacency not symmetric")

    edge_adj: list[set[int]] = [set() for _ in range(n)]
    for u, v in opposite:
        edge_adj[u].add(v)
        edge_adj[v].add(u)
    if [tuple(sorted(s)) for s in edge_adj] != [tuple(a) for a in T.adjacency]:
        symmetric = False
        failures.append("adjacency disagrees with triangle edges")

    seen = bytearray(n)
    if n:
        seen[0] = 1
        q = deque([0])
        while q:
            i = q.popleft()
            for j in T.adjacency[i]:
                if not seen[j]:
                    seen[j] = 1
                    q.append(j)
    connected = all(seen)
    if not connected:
        failures.append("edge graph is disconnected")

    hull_vertices = set()
    for (u, v), lst in opposite.items():
        if len(lst) == 1:
            hull_vertices.update((u, v))
    h = len(hull_vertices)
    euler = len(T.triangles) == 2 * n - 2 - h
    if not euler:
        failures.append(f"{len(T.triangles)} triangles, expected 2n-2-h = {2 * n - 2 - h}")

    return ValidationReport(
        empty_circumcircle=empty,
        symmetric=symmetric,
        connected=connected,
        euler=euler,
        oriented=oriented,
        n_triangles=len(T.triangles),
        hull_size=h,
        failures=failures,
    )


def from_triangles(points: Sequence[Coord], triangles: Sequence[tuple[int, int, int]]) -> Triangulation:
    """Wrap an arbitrary triangle list (e.g. a hand-built one) for validation."""
    pts = [(float(p[0]), float(p[1])) for p in points]
    adj: list[set[int]] = [set() for _ in pts]
    for a, b, c in triangles:
        adj[a].update((b, c))
        adj[b].update((a, c))
        adj[c].update((a, b))
    return Triangulation(
        points=pts,
        triangles=[tuple(t) for t in triangles],
        adjacency=[tuple(sorted(s)) for s in adj],
    )
