"""Command-line entry point: ``areaquery {gen,query,sweep}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from .geometry import read_polygons
from .query import Dataset, brute_force_query, filter_refine_query, voronoi_area_query
from .rtree import DEFAULT_FANOUT
from .svg import render_svg

log = logging.getLogger("areaquery")


def cmd_gen(args: argparse.Namespace) -> int:
    pts = bench.generate_dataset(args.n, args.seed)
    bench.write_dataset(args.out, pts)
    print(f"wrote {len(pts)} points to {args.out}")
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    points = bench.read_dataset(args.data)
    polygons = read_polygons(args.polygon)
    if not polygons:
        print(f"no polygons in {args.polygon}", file=sys.stderr)
        return 2
    D = Dataset.build(points, args.rtree_fanout)
    print(
        f"# n={len(D)} rtree_build_ns={D.rtree_build_ns} "
        f"delaunay_build_ns={D.delaunay_build_ns}"
    )
    status = 0
    for k, A in enumerate(polygons):
        outcomes = {}
        if args.engine in ("rtree", "both") or args.svg:
            outcomes["rtree"] = filter_refine_query(D, A)
        if args.engine in ("voronoi", "both") or args.svg:
            outcomes["voronoi"] = voronoi_area_query(D, A)
        for name in ("rtree", "voronoi"):
            if name in outcomes and args.engine in (name, "both"):
                o = outcomes[name]
                print(
                    f"polygon={k} engine={name} result_size={len(o.result_ids)} "
                    f"candidates={o.candidate_count} elapsed_ns={o.elapsed}"
                )
        if args.paranoid:
            truth = brute_force_query(D, A)
            for name, o in outcomes.items():
                if o.result_ids != truth:
                    missing = sorted(truth - o.result_ids)
                    extra = sorted(o.result_ids - truth)
                    print(
                        f"MISMATCH polygon={k} engine={name} missing={missing[:20]} "
                        f"extra={extra[:20]}",
                        file=sys.stderr,
                    )
                    status = 1
        if args.svg:
            path = Path(args.svg)
            if len(polygons) > 1:
                path = path.with_name(f"{path.stem}_{k}{path.suffix}")
            render_svg(D, A, outcomes["voronoi"], outcomes["rtree"], path)
    return status


def cmd_sweep(args: argparse.Namespace) -> int:
    overrides = {"mode": args.mode, "output_dir": Path(args.out_dir)}
    if args.rtree_fanout is not None:
        overrides["rtree_fanout"] = args.rtree_fanout
    if args.config:
        cfg = bench.load_config(args.config, **overrides)
    else:
        cfg = bench.parse_config("", **overrides)
    try:
        report = bench.run_sweep(cfg)
    except bench.EngineMismatch as exc:
        print(f"engine mismatch: {exc}", file=sys.stderr)
        return 1
    for row in report.rows:
        print(
            f"n={row.data_size} q={row.query_size:g} result={row.result_mean:.2f} "
            f"cand_trad={row.cand_trad:.2f} cand_voro={row.cand_voro:.2f} "
            f"cand_savings={row.cand_savings_pct:.1f}% time_savings={row.time_savings_pct:.1f}%"
        )
    print(f"reports written to {cfg.output_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="areaquery", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a uniform point dataset")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    q = sub.add_parser("query", help="run area queries over a dataset")
    q.add_argument("--data", required=True)
    q.add_argument("--polygon", required=True, help="file with one polygon per line")
    q.add_argument("--engine", choices=("voronoi", "rtree", "both"), default="both")
    q.add_argument("--paranoid", action="store_true", help="cross-check against a linear scan")
    q.add_argument("--svg", help="write a side-by-side SVG of the query")
    q.add_argument("--rtree-fanout", type=int, default=DEFAULT_FANOUT)
    q.set_defaults(func=cmd_query)

    s = sub.add_parser("sweep", help="run a benchmark sweep")
    s.add_argument("--mode", choices=("data", "query"), required=True)
    s.add_argument("--config", help="key=value config file")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--rtree-fanout", type=int, default=None)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(message)s",
    )
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
