"""Side-by-side SVG of one query under both engines.

Left panel: filter-refine; right panel: Voronoi traversal.  Result points are
black, candidates that were rejected are green, everything else is gray.
Only points inside a padded view of the polygon's MBR are drawn so large
datasets stay small on disk.
"""
from __future__ import annotations

from .geometry import Polygon, mbr
from .query import Dataset, QueryOutcome, voronoi_area_query
from .rtree import window_query

PANEL = 400
GAP = 20
MARGIN = 20

COLORS = {"result": "#000000", "candidate": "#1a9e3a", "other": "#b0b0b0"}


def _view(A: Polygon, pad: float = 0.25) -> tuple[float, float, float, float]:
    r = mbr(A)
    w = r.max_x - r.min_x
    h = r.max_y - r.min_y
    side = max(w, h) * (1.0 + 2.0 * pad)
    cx = (r.min_x + r.max_x) / 2
    cy = (r.min_y + r.max_y) / 2
    x0 = max(0.0, cx - side / 2)
    y0 = max(0.0, cy - side / 2)
    x1 = min(1.0, cx + side / 2)
    y1 = min(1.0, cy + side / 2)
    return x0, y0, max(x1, x0 + 1e-12), max(y1, y0 + 1e-12)


def point_classes(result_ids: set[int], candidates: set[int]) -> dict[int, str]:
    out = {i: "candidate" for i in candidates}
    for i in result_ids:
        out[i] = "result"
    return out


def _candidates_of(D: Dataset, A: Polygon, outcome: QueryOutcome, engine: str) -> set[int]:
    # outcomes carry counts only; recover the candidate ids
    if engine == "rtree":
        return set(window_query(D.rtree, mbr(A)))
    trace = outcome.trace
    if trace is None:
        trace = voronoi_area_query(D, A, record_trace=True).trace
    return {p for p, _, _ in trace}


def render_svg(
    D: Dataset, A: Polygon, outcome_v: QueryOutcome, outcome_t: QueryOutcome, path
) -> dict[str, dict[str, int]]:
    """Write the two-panel figure to ``path``; returns per-panel colour counts."""
    x0, y0, x1, y1 = _view(A)
    scale = PANEL / max(x1 - x0, y1 - y0)

    def sx(x: float) -> float:
        return x * scale

    width = 2 * PANEL + GAP + 2 * MARGIN
    height = PANEL + 2 * MARGIN + 20
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    counts: dict[str, dict[str, int]] = {}
    visible = [
        i for i, (x, y) in enumerate(D.points) if x0 <= x <= x1 and y0 <= y <= y1
    ]
    panels = (("(a) filter-refine", "rtree", outcome_t), ("(b) voronoi", "voronoi", outcome_v))
    for k, (title, engine, outcome) in enumerate(panels):
        ox = MARGIN + k * (PANEL + GAP)
        oy = MARGIN + 20

        def px(x: float, y: float) -> str:
            return f"{ox + sx(x - x0):.2f},{oy + PANEL - sx(y - y0):.2f}"

        classes = point_classes(outcome.result_ids, _candidates_of(D, A, outcome, engine))
        tally = {"result": 0, "candidate": 0, "other": 0}
        parts.append(f'<g id="{engine}">')
        parts.append(f'<text x="{ox}" y="{MARGIN + 12}" font-size="14">{title}</text>')
        parts.append(
            f'<rect x="{ox}" y="{oy}" width="{PANEL}" height="{PANEL}" '
            'fill="none" stroke="#dddddd"/>'
        )
        if engine == "rtree":
            r = mbr(A)
            corners = [(r.min_x, r.min_y), (r.max_x, r.min_y), (r.max_x, r.max_y), (r.min_x, r.max_y)]
            parts.append(
                f'<polygon points="{" ".join(px(*c) for c in corners)}" fill="none" '
                'stroke="#888888" stroke-dasharray="4,3"/>'
            )
        for layer in ("other", "candidate", "result"):
            color = COLORS[layer]
            rad = 1.2 if layer == "other" else 1.8
            for i in visible:
                if classes.get(i, "other") != layer:
                    continue
                tally[layer] += 1
                cx, cy = px(*D.points[i]).split(",")
                parts.append(
                    f'<circle class="{layer}" cx="{cx}" cy="{cy}" r="{rad}" fill="{color}"/>'
                )
        parts.append(
            f'<polygon points="{" ".join(px(*v) for v in A.vertices)}" fill="none" '
            'stroke="black" stroke-width="1.5"/>'
        )
        parts.append("</g>")
        counts[engine] = tally
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
    return counts
