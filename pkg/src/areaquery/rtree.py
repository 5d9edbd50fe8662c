"""Static R-tree over points, packed by sort-tile-recursive (STR) loading.

Leaves hold point ids; after packing, the points of every subtree occupy a
contiguous slice of ``RTree.order``, so a window query that fully covers a
node copies that slice without descending.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Sequence

from .geometry import Coord, Rect

DEFAULT_FANOUT = 16


class RTreeError(ValueError):
    pass


@dataclass(eq=False)
class Node:
    rect: tuple[float, float, float, float]
    children: list["Node"] = field(default_factory=list)
    ids: list[int] = field(default_factory=list)
    lo: int = 0
    hi: int = 0

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(eq=False)
class RTree:
    root: Node
    points: list[Coord]
    order: list[int]
    fanout: int
    height: int

    def __len__(self) -> int:
        return len(self.order)

    def window_query(self, w: Rect) -> list[int]:
        return window_query(self, w)

    def nearest_neighbor(self, q: Coord) -> int:
        return nearest_neighbor(self, q)


def _even_chunks(items: list, k: int) -> list[list]:
    # k groups whose sizes differ by at most one
    n = len(items)
    base, extra = divmod(n, k)
    out = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        out.append(items[start:start + size])
        start += size
    return out


def _str_groups(entries: list, centre, fanout: int) -> list[list]:
    n = len(entries)
    n_groups = math.ceil(n / fanout)
    n_slabs = math.ceil(math.sqrt(n_groups))
    by_x = sorted(entries, key=lambda e: centre(e))
    groups = []
    for slab in _even_chunks(by_x, n_slabs):
        slab.sort(key=lambda e: (centre(e)[1], centre(e)[0]))
        groups.extend(_even_chunks(slab, math.ceil(len(slab) / fanout)))
    return groups


def _union(rects) -> tuple[float, float, float, float]:
    rects = list(rects)
    return (
        min(r[0] for r in rects),
        min(r[1] for r in rects),
        max(r[2] for r in rects),
        max(r[3] for r in rects),
    )


def bulk_load(points: Sequence[Coord], fanout: int = DEFAULT_FANOUT) -> RTree:
    """Pack ``points`` (ids = list positions) into an R-tree by STR."""
    if not points:
        raise RTreeError("cannot bulk-load an empty point set")
    if fanout < 4:
        raise RTreeError(f"fanout must be >= 4, got {fanout}")
    pts = [(float(p[0]), float(p[1])) for p in points]

    def pt_centre(i: int) -> Coord:
        return pts[i]

    if len(pts) <= fanout:
        groups = [list(range(len(pts)))]
    else:
        groups = _str_groups(list(range(len(pts))), pt_centre, fanout)
    level = []
    for g in groups:
        xs = [pts[i][0] for i in g]
        ys = [pts[i][1] for i in g]
        level.append(Node(rect=(min(xs), min(ys), max(xs), max(ys)), ids=g))
    height = 1

    def node_centre(nd: Node) -> Coord:
        r = nd.rect
        return ((r[0] + r[2]) * 0.5, (r[1] + r[3]) * 0.5)

    while len(level) > 1:
        if len(level) <= fanout:
            groups = [level]
        else:
            groups = _str_groups(level, node_centre, fanout)
        level = [Node(rect=_union(c.rect for c in g), children=g) for g in groups]
        height += 1
    root = level[0]

    order: list[int] = []

    def assign(nd: Node) -> None:
        nd.lo = len(order)
        if nd.is_leaf:
            order.extend(nd.ids)
        else:
            for c in nd.children:
                assign(c)
        nd.hi = len(order)

    assign(root)
    return RTree(root=root, points=pts, order=order, fanout=fanout, height=height)


def window_query(T: RTree, w: Rect) -> list[int]:
    """Ids of points inside the closed rectangle ``w``."""
    x0, y0, x1, y1 = w.min_x, w.min_y, w.max_x, w.max_y
    pts = T.points
    order = T.order
    out: list[int] = []
    stack = [T.root]
    while stack:
        nd = stack.pop()
        r = nd.rect
        if r[0] > x1 or r[2] < x0 or r[1] > y1 or r[3] < y0:
            continue
        if x0 <= r[0] and r[2] <= x1 and y0 <= r[1] and r[3] <= y1:
            out.extend(order[nd.lo:nd.hi])
        elif nd.children:
            stack.extend(nd.children)
        else:
            for i in nd.ids:
                x, y = pts[i]
                if x0 <= x <= x1 and y0 <= y <= y1:
                    out.append(i)
    return out


def _mindist2(r, qx: float, qy: float) -> float:
    dx = r[0] - qx if qx < r[0] else (qx - r[2] if qx > r[2] else 0.0)
    dy = r[1] - qy if qy < r[1] else (qy - r[3] if qy > r[3] else 0.0)
    return dx * dx + dy * dy


def nearest_neighbor(T: RTree, q: Coord) -> int:
    """Best-first branch-and-bound nearest neighbour; ties go to the smallest id.

    Heap keys are ``(dist2, kind, tiebreak)`` with nodes (kind 0) ahead of
    points (kind 1) at equal distance, so every point at the winning distance
    is already queued when the first point is popped.
    """
    qx, qy = float(q[0]), float(q[1])
    pts = T.points
    heap: list[tuple[float, int, int, object]] = [(0.0, 0, 0, T.root)]
    counter = 1
    while heap:
        d2, kind, tb, item = heapq.heappop(heap)
        if kind == 1:
            return tb
        nd = item
        if nd.children:
            for c in nd.children:
                heapq.heappush(heap, (_mindist2(c.rect, qx, qy), 0, counter, c))
                counter += 1
        else:
            for i in nd.ids:
                x, y = pts[i]
                dx = x - qx
                dy = y - qy
                heapq.heappush(heap, (dx * dx + dy * dy, 1, i, None))
    raise RTreeError("empty tree")  # pragma: no cover


def iter_nodes(T: RTree):
    """Yield ``(node, depth)`` for every node, root at depth 0."""
    stack = [(T.root, 0)]
    while stack:
        nd, d = stack.pop()
        yield nd, d
        for c in nd.children:
            stack.append((c, d + 1))
