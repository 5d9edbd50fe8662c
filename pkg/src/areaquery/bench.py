"""Datasets, benchmark sweeps and CSV reports."""
from __future__ import annotations

import csv
import hashlib
import logging
import random
import statistics
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from .geometry import Point, random_query_polygon
from .query import Dataset, filter_refine_query, voronoi_area_query
from .rtree import DEFAULT_FANOUT
from .svg import render_svg

log = logging.getLogger(__name__)

MODES = ("data_size_sweep", "query_size_sweep")
MODE_ALIASES = {"data": "data_size_sweep", "query": "query_size_sweep"}

DESK_DATA_SIZES = (10_000, 30_000, 100_000)
DEFAULT_QUERY_SIZES = (0.01, 0.02, 0.04, 0.08, 0.16, 0.32)

REPORT_COLUMNS = (
    "data_size",
    "query_size",
    "result_mean",
    "cand_trad",
    "cand_voro",
    "cand_savings_pct",
)
TIMING_COLUMNS = (
    "data_size",
    "query_size",
    "time_trad_ns",
    "time_voro_ns",
    "time_savings_pct",
    "build_rtree_ns",
    "build_delaunay_ns",
)
FULL_COLUMNS = (
    "data_size",
    "query_size",
    "result_mean",
    "cand_trad",
    "cand_voro",
    "time_trad_ns",
    "time_voro_ns",
    "cand_savings_pct",
    "time_savings_pct",
)


class ConfigError(ValueError):
    pass


class EngineMismatch(RuntimeError):
    """The two engines returned different result sets for the same query."""


def _mix(*parts: object) -> int:
    digest = hashlib.sha256(":".join(map(str, parts)).encode()).digest()
    return int.from_bytes(digest[:8], "big")


# --------------------------------------------------------------------------
# datasets


def generate_dataset(n: int, rng_seed: int) -> list[Point]:
    """``n`` distinct uniform points in the unit square; duplicates are redrawn."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    rng = random.Random(rng_seed)
    seen: set[tuple[float, float]] = set()
    out: list[Point] = []
    while len(out) < n:
        xy = (rng.random(), rng.random())
        if xy in seen:
            continue
        seen.add(xy)
        out.append(Point(xy[0], xy[1], len(out)))
    return out


def write_dataset(path, points: Iterable[Point]) -> None:
    with open(path, "w") as fh:
        for p in points:
            fh.write(f"{p.x!r} {p.y!r}\n")


def read_dataset(path) -> list[Point]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'x y', got {line!r}")
            out.append(Point(float(parts[0]), float(parts[1]), len(out)))
    return out


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class SweepConfig:
    mode: str = "data_size_sweep"
    data_sizes: tuple[int, ...] | None = None
    query_sizes: tuple[float, ...] | None = None
    repetitions: int = 100
    rng_seed: int = 1
    rtree_fanout: int = DEFAULT_FANOUT
    output_dir: Path | None = None
    svg_samples: bool = True

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        # unset sizes take the desk-scale defaults for the mode
        if self.data_sizes is None:
            sizes = DESK_DATA_SIZES if self.mode == "data_size_sweep" else (100_000,)
            object.__setattr__(self, "data_sizes", sizes)
        if self.query_sizes is None:
            sizes = (0.01,) if self.mode == "data_size_sweep" else DEFAULT_QUERY_SIZES
            object.__setattr__(self, "query_sizes", sizes)
        object.__setattr__(self, "data_sizes", tuple(int(n) for n in self.data_sizes))
        object.__setattr__(self, "query_sizes", tuple(float(q) for q in self.query_sizes))
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if not self.data_sizes or any(n < 3 for n in self.data_sizes):
            raise ConfigError("data_sizes must be non-empty and each >= 3")
        if not self.query_sizes or any(not 0 < q <= 1 for q in self.query_sizes):
            raise ConfigError("query_sizes must be non-empty and within (0, 1]")
        if self.mode == "data_size_sweep" and len(self.query_sizes) != 1:
            raise ConfigError("a data-size sweep takes exactly one query size")
        if self.mode == "query_size_sweep" and len(self.data_sizes) != 1:
            raise ConfigError("a query-size sweep takes exactly one data size")
        if self.rtree_fanout < 4:
            raise ConfigError("rtree_fanout must be >= 4")

    def cells(self) -> list[tuple[int, float]]:
        return [(n, q) for n in self.data_sizes for q in self.query_sizes]


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def parse_config(text: str, **overrides) -> SweepConfig:
    """Parse flat ``key=value`` lines; ``#`` starts a comment."""
    kw: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key == "mode":
                kw[key] = MODE_ALIASES.get(value, value)
            elif key == "data_sizes":
                kw[key] = tuple(int(float(v)) for v in value.split(","))
            elif key == "query_sizes":
                kw[key] = tuple(float(v) for v in value.split(","))
            elif key in ("repetitions", "rng_seed", "rtree_fanout"):
                kw[key] = int(value)
            elif key == "output_dir":
                kw[key] = Path(value)
            elif key == "svg_samples":
                kw[key] = _parse_bool(value)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    kw.update({k: v for k, v in overrides.items() if v is not None})
    if "mode" in kw:
        kw["mode"] = MODE_ALIASES.get(kw["mode"], kw["mode"])
    return SweepConfig(**kw)


def load_config(path, **overrides) -> SweepConfig:
    return parse_config(Path(path).read_text(), **overrides)


# --------------------------------------------------------------------------
# sweeps


@dataclass
class CellResult:
    data_size: int
    query_size: float
    repetitions: int
    result_mean: float
    cand_trad: float
    cand_voro: float
    time_trad_ns: float
    time_voro_ns: float
    build_rtree_ns: int
    build_delaunay_ns: int
    fill_mean: float
    result_sizes: list[int] = field(repr=False, default_factory=list)
    cand_trad_all: list[int] = field(repr=False, default_factory=list)
    cand_voro_all: list[int] = field(repr=False, default_factory=list)

    @property
    def cand_savings_pct(self) -> float:
        return savings_pct(self.cand_trad, self.cand_voro)

    @property
    def time_savings_pct(self) -> float:
        return savings_pct(self.time_trad_ns, self.time_voro_ns)


@dataclass
class SweepReport:
    config: SweepConfig
    rows: list[CellResult]


def savings_pct(traditional: float, voronoi: float) -> float:
    if traditional == 0:
        return 0.0
    return 100.0 * (traditional - voronoi) / traditional


def dataset_seed(rng_seed: int, n: int) -> int:
    return _mix("dataset", rng_seed, n)


def polygon_seeds(rng_seed: int, n: int, query_size: float, count: int) -> list[int]:
    rng = random.Random(_mix("polygons", rng_seed, n, repr(query_size)))
    return [rng.getrandbits(63) for _ in range(count)]


def run_cell(
    D: Dataset, query_size: float, repetitions: int, rng_seed: int, sample_svg=None
) -> CellResult:
    """Run ``repetitions`` paired queries on one dataset.

    Both engines see the identical polygon sequence.  One extra leading
    polygon is a discarded warm-up; engine order alternates per repetition.
    """
    n = len(D)
    seeds = polygon_seeds(rng_seed, n, query_size, repetitions + 1)
    warm = random_query_polygon(seeds[0], query_size)
    filter_refine_query(D, warm)
    voronoi_area_query(D, warm)
    res, ct, cv, tt, tv, fill = [], [], [], [], [], []
    for k, s in enumerate(seeds[1:]):
        A = random_query_polygon(s, query_size)
        if k % 2:
            ov = voronoi_area_query(D, A)
            ot = filter_refine_query(D, A)
        else:
            ot = filter_refine_query(D, A)
            ov = voronoi_area_query(D, A)
        if ov.result_ids != ot.result_ids:
            raise EngineMismatch(
                f"n={n} query_size={query_size} polygon_seed={s}: "
                f"voronoi {len(ov.result_ids)} vs filter-refine {len(ot.result_ids)} results"
            )
        if k == 0 and sample_svg is not None:
            render_svg(D, A, ov, ot, sample_svg)
        res.append(len(ot.result_ids))
        ct.append(ot.candidate_count)
        cv.append(ov.candidate_count)
        tt.append(ot.elapsed)
        tv.append(ov.elapsed)
        fill.append(A.area / A._mbr.area)
    return CellResult(
        data_size=n,
        query_size=query_size,
        repetitions=repetitions,
        result_mean=statistics.fmean(res),
        cand_trad=statistics.fmean(ct),
        cand_voro=statistics.fmean(cv),
        time_trad_ns=statistics.fmean(tt),
        time_voro_ns=statistics.fmean(tv),
        build_rtree_ns=D.rtree_build_ns,
        build_delaunay_ns=D.delaunay_build_ns,
        fill_mean=statistics.fmean(fill),
        result_sizes=res,
        cand_trad_all=ct,
        cand_voro_all=cv,
    )


def run_sweep(cfg: SweepConfig, datasets: dict[int, Dataset] | None = None) -> SweepReport:
    """Run every (data_size, query_size) cell of ``cfg``.

    Each data size is indexed once and reused across its query sizes.  A
    caller may pass prebuilt ``datasets`` (keyed by size) that were generated
    with ``generate_dataset(n, dataset_seed(cfg.rng_seed, n))``.  When
    ``cfg.output_dir`` is set the CSV reports (and SVG samples) are written
    there.
    """
    cache = {} if datasets is None else datasets
    out_dir = Path(cfg.output_dir) if cfg.output_dir is not None else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for n, q in cfg.cells():
        D = cache.get(n)
        if D is None or len(D) != n:
            log.info("building dataset n=%d", n)
            D = Dataset.build(generate_dataset(n, dataset_seed(cfg.rng_seed, n)), cfg.rtree_fanout)
            cache[n] = D
        svg = None
        if out_dir is not None and cfg.svg_samples:
            svg = out_dir / f"sample_n{n}_q{q:g}.svg"
        log.info("cell n=%d query_size=%g reps=%d", n, q, cfg.repetitions)
        rows.append(run_cell(D, q, cfg.repetitions, cfg.rng_seed, svg))
    report = SweepReport(cfg, rows)
    if out_dir is not None:
        write_reports(report, out_dir)
    return report


# --------------------------------------------------------------------------
# output


def _fmt(v: object) -> str:
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def _row_values(row: CellResult) -> dict[str, object]:
    return {
        "data_size": row.data_size,
        "query_size": f"{row.query_size:g}",
        "result_mean": row.result_mean,
        "cand_trad": row.cand_trad,
        "cand_voro": row.cand_voro,
        "cand_savings_pct": row.cand_savings_pct,
        "time_trad_ns": round(row.time_trad_ns),
        "time_voro_ns": round(row.time_voro_ns),
        "time_savings_pct": row.time_savings_pct,
        "build_rtree_ns": row.build_rtree_ns,
        "build_delaunay_ns": row.build_delaunay_ns,
    }


def write_csv(report: SweepReport, path, columns=REPORT_COLUMNS) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in report.rows:
            vals = _row_values(row)
            w.writerow([_fmt(vals[c]) for c in columns])


def write_reports(report: SweepReport, out_dir) -> dict[str, Path]:
    """Write ``report.csv`` (deterministic counts), ``timing.csv`` and
    ``report_full.csv`` (every column, timings included)."""
    out_dir = Path(out_dir)
    paths = {
        "report": out_dir / "report.csv",
        "timing": out_dir / "timing.csv",
        "full": out_dir / "report_full.csv",
    }
    write_csv(report, paths["report"], REPORT_COLUMNS)
    write_csv(report, paths["timing"], TIMING_COLUMNS)
    write_csv(report, paths["full"], FULL_COLUMNS)
    return paths


def with_mode(cfg: SweepConfig, mode: str) -> SweepConfig:
    return replace(cfg, mode=MODE_ALIASES.get(mode, mode))
