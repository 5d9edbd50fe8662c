"""Polygonal area queries: Voronoi-neighbour traversal and MBR filter-refine."""
from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from . import delaunay, rtree
from .geometry import (
    Coord,
    Point,
    Polygon,
    interior_point,
    mbr,
    point_in_polygon,
    segment_reaches_polygon,
)


class QueryError(ValueError):
    pass


@dataclass
class QueryOutcome:
    result_ids: set[int]
    candidate_count: int
    containment_tests: int
    intersection_tests: int
    elapsed: int  # nanoseconds
    seed: int | None = None
    trace: list[tuple[int, str, int | None]] | None = field(default=None, repr=False)


@dataclass(eq=False)
class Dataset:
    points: list[Coord]
    rtree: rtree.RTree
    triangulation: delaunay.Triangulation
    rtree_build_ns: int = 0
    delaunay_build_ns: int = 0

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def build(
        cls, points: Sequence[Point | Coord], fanout: int = rtree.DEFAULT_FANOUT
    ) -> "Dataset":
        """Index ``points``; ``Point`` ids must be the dense range 0..n-1."""
        coords = _coords(points)
        if not coords:
            raise QueryError("empty dataset")
        t0 = time.perf_counter_ns()
        tree = rtree.bulk_load(coords, fanout)
        t1 = time.perf_counter_ns()
        tri = delaunay.build(coords)
        t2 = time.perf_counter_ns()
        return cls(coords, tree, tri, t1 - t0, t2 - t1)


def _coords(points: Sequence[Point | Coord]) -> list[Coord]:
    if points and isinstance(points[0], Point):
        by_id = sorted(points, key=lambda p: p.id)
        if [p.id for p in by_id] != list(range(len(by_id))):
            raise QueryError("point ids must be exactly 0..n-1")
        return [(p.x, p.y) for p in by_id]
    return [(float(p[0]), float(p[1])) for p in points]


def brute_force_query(D: Dataset, A: Polygon) -> set[int]:
    return {i for i, p in enumerate(D.points) if point_in_polygon(p, A)}


def filter_refine_query(D: Dataset, A: Polygon) -> QueryOutcome:
    """Window query on the polygon's MBR, then exact containment per candidate."""
    start = time.perf_counter_ns()
    candidates = rtree.window_query(D.rtree, mbr(A))
    pts = D.points
    result = [i for i in candidates if point_in_polygon(pts[i], A)]
    elapsed = time.perf_counter_ns() - start
    return QueryOutcome(
        result_ids=set(result),
        candidate_count=len(candidates),
        containment_tests=len(candidates),
        intersection_tests=0,
        elapsed=elapsed,
    )


def voronoi_area_query(D: Dataset, A: Polygon, record_trace: bool = False) -> QueryOutcome:
    """Grow the candidate set outward from a seed along Voronoi neighbours.

    The seed is the nearest stored point to an interior position of ``A``.
    Candidates are processed FIFO.  A candidate inside ``A`` enqueues all its
    unvisited neighbours; one outside enqueues only the unvisited neighbours
    whose connecting segment meets ``A``.

    With ``record_trace`` the outcome carries ``(point, reason, parent)`` for
    every enqueue, reason being ``"seed"``, ``"internal"`` or ``"segment"``.
    """
    n = len(D.points)
    if n == 0:
        raise QueryError("empty dataset")
    start = time.perf_counter_ns()
    pts = D.points
    adj = D.triangulation.adjacency
    seed = rtree.nearest_neighbor(D.rtree, interior_point(A))
    visited = bytearray(n)
    visited[seed] = 1
    queue = deque([seed])
    trace = [(seed, "seed", None)] if record_trace else None
    result = []
    tested = 0
    crossings = 0
    while queue:
        p = queue.popleft()
        tested += 1
        if point_in_polygon(pts[p], A):
            result.append(p)
            fresh = [q for q in adj[p] if not visited[q]]
            for q in fresh:
                visited[q] = 1
            queue.extend(fresh)
            if trace is not None:
                trace.extend((q, "internal", p) for q in fresh)
        else:
            # p is outside A, so only the far endpoint and edge crossings matter
            pp = pts[p]
            for q in adj[p]:
                if not visited[q]:
                    crossings += 1
                    if segment_reaches_polygon(pp, pts[q], A):
                        visited[q] = 1
                        queue.append(q)
                        if trace is not None:
                            trace.append((q, "segment", p))
    elapsed = time.perf_counter_ns() - start
    return QueryOutcome(
        result_ids=set(result),
        candidate_count=tested,
        containment_tests=tested,
        intersection_tests=crossings,
        elapsed=elapsed,
        seed=seed,
        trace=trace,
    )


ENGINES = {
    "voronoi": voronoi_area_query,
    "rtree": filter_refine_query,
}
