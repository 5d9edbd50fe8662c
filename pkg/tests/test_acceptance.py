"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line that is echoed in the pytest summary
(section "acceptance criteria").  Desk scale: n = 1e5 for the anchor cells,
100 repetitions per cell.
"""
import random
import time

import numpy as np
import pytest

from areaquery import bench
from areaquery.bench import SweepConfig, generate_dataset, run_sweep
from areaquery.cli import main
from areaquery.delaunay import build, validate
from areaquery.geometry import Rect, random_query_polygon
from areaquery.query import Dataset, brute_force_query, filter_refine_query, voronoi_area_query
from areaquery.rtree import bulk_load, nearest_neighbor, window_query

from oracles import brute_delaunay_triangles, edges_of

pytestmark = pytest.mark.slow

SEED = 2024
ANCHOR_N = 100_000
REPS = 100


@pytest.fixture(scope="module")
def datasets():
    return {}


@pytest.fixture(scope="module")
def query_sweep(datasets):
    cfg = SweepConfig(
        mode="query_size_sweep",
        data_sizes=(ANCHOR_N,),
        query_sizes=bench.DEFAULT_QUERY_SIZES,
        repetitions=REPS,
        rng_seed=SEED,
    )
    start = time.perf_counter()
    report = run_sweep(cfg, datasets)
    report.wall_s = time.perf_counter() - start  # includes the 1e5 build and all six cells
    return report


@pytest.fixture(scope="module")
def data_sweep(datasets, query_sweep):
    cfg = SweepConfig(
        mode="data_size_sweep",
        data_sizes=bench.DESK_DATA_SIZES,
        query_sizes=(0.01,),
        repetitions=REPS,
        rng_seed=SEED,
    )
    return run_sweep(cfg, datasets)


def test_c1_correctness_oracle(criterion):
    start = time.perf_counter()
    rng = random.Random(SEED)
    mismatches = []
    instances = 0
    plan = [(100, 334), (1000, 333), (5000, 333)]
    for n, count in plan:
        per_dataset = 34 if n < 5000 else 37
        k = 0
        while k < count:
            pts = generate_dataset(n, rng.getrandbits(32))
            D = Dataset.build(pts)
            for _ in range(min(per_dataset, count - k)):
                q = 10 ** rng.uniform(-2.3, -0.3)  # ~0.5% .. 50%
                A = random_query_polygon(rng.getrandbits(63), q)
                truth = brute_force_query(D, A)
                v = voronoi_area_query(D, A).result_ids
                t = filter_refine_query(D, A).result_ids
                if not (v == t == truth):
                    mismatches.append((n, q, len(truth), len(v), len(t)))
                k += 1
                instances += 1
    elapsed = time.perf_counter() - start
    for m in mismatches:
        print(f"completeness finding: n={m[0]} q={m[1]:.4f} truth={m[2]} voronoi={m[3]} rtree={m[4]}")
    ok = criterion(
        "C1 correctness oracle",
        instances == 1000 and not mismatches and elapsed < 300,
        f"{instances} instances, {len(mismatches)} mismatches, {elapsed:.1f}s (< 300s)",
    )
    assert ok


def test_c2_candidate_ratio_anchor(query_sweep, criterion):
    row = next(r for r in query_sweep.rows if r.query_size == 0.01)
    ratio = row.cand_voro / row.cand_trad
    ok = criterion(
        "C2 candidate ratio n=1e5 q=1%",
        abs(ratio - 0.65) <= 0.10 and query_sweep.wall_s < 600,
        f"{row.cand_voro:.2f}/{row.cand_trad:.2f} = {ratio:.4f} (target 0.65 +- 0.10); "
        f"result mean {row.result_mean:.2f}; sweep wall {query_sweep.wall_s:.0f}s (< 600s)",
    )
    assert ok


def test_c3_query_size_savings(query_sweep, criterion):
    detail = ", ".join(f"{r.query_size:g}:{r.cand_savings_pct:.1f}%" for r in query_sweep.rows)
    ok = criterion(
        "C3 savings in [25%, 55%] per query size (n=1e5)",
        len(query_sweep.rows) == 6 and all(25 <= r.cand_savings_pct <= 55 for r in query_sweep.rows),
        detail,
    )
    assert ok


def test_c4_traditional_count_sanity(query_sweep, data_sweep, criterion):
    rows = list(query_sweep.rows) + list(data_sweep.rows)
    errs = [(r.data_size, r.query_size, r.cand_trad / (r.data_size * r.query_size) - 1) for r in rows]
    ok = criterion(
        "C4 traditional candidates ~ n*q within 5%",
        all(abs(e) <= 0.05 for _, _, e in errs),
        ", ".join(f"n={n} q={q:g}:{100 * e:+.2f}%" for n, q, e in errs),
    )
    assert ok


def test_c5_delaunay_properties(criterion):
    rng = random.Random(SEED + 5)
    oracle_fail = 0
    for _ in range(50):
        n = rng.randint(3, 60)
        pts = [(rng.random(), rng.random()) for _ in range(n)]
        if set(build(pts).edges()) != edges_of(brute_delaunay_triangles(pts)):
            oracle_fail += 1
    conn_fail = nn_fail = 0
    for _ in range(50):
        n = rng.randint(100, 5000)
        pts = [(rng.random(), rng.random()) for _ in range(n)]
        T = build(pts)
        if not validate(T).connected:
            conn_fail += 1
        P = np.asarray(pts)
        for lo in range(0, n, 1000):
            d = ((P[lo:lo + 1000, None, :] - P[None, :, :]) ** 2).sum(-1)
            d[np.arange(d.shape[0]), np.arange(lo, lo + d.shape[0])] = np.inf
            mins = d.min(1)
            for r in range(d.shape[0]):
                i = lo + r
                nearest = np.nonzero(d[r] == mins[r])[0]
                adj = set(T.adjacency[i])
                nn_fail += sum(1 for j in nearest if int(j) not in adj)
    ok = criterion(
        "C5 Delaunay property suite",
        oracle_fail == 0 and conn_fail == 0 and nn_fail == 0,
        f"oracle mismatches {oracle_fail}/50, disconnected {conn_fail}/50, NN-graph violations {nn_fail}",
    )
    assert ok


def test_c6_index_oracles(criterion):
    rng = np.random.default_rng(SEED + 6)
    P = rng.random((10_000, 2))
    pts = [tuple(p) for p in P.tolist()]
    T = bulk_load(pts)
    w_fail = 0
    for _ in range(10_000):
        x0, x1 = np.sort(rng.random(2))
        y0, y1 = np.sort(rng.random(2))
        got = sorted(window_query(T, Rect(float(x0), float(y0), float(x1), float(y1))))
        mask = (P[:, 0] >= x0) & (P[:, 0] <= x1) & (P[:, 1] >= y0) & (P[:, 1] <= y1)
        if got != np.nonzero(mask)[0].tolist():
            w_fail += 1
    nn_fail = 0
    for _ in range(1000):
        q = rng.uniform(-0.1, 1.1, 2)
        d = (P[:, 0] - q[0]) ** 2 + (P[:, 1] - q[1]) ** 2
        if nearest_neighbor(T, (float(q[0]), float(q[1]))) != int(np.argmin(d)):
            nn_fail += 1
    ok = criterion(
        "C6 index oracles",
        w_fail == 0 and nn_fail == 0,
        f"window mismatches {w_fail}/10000, NN mismatches {nn_fail}/1000",
    )
    assert ok


def _inversions(values):
    return sum(1 for a, b in zip(values, values[1:]) if b < a)


def test_c7_timing_trends(query_sweep, data_sweep, criterion):
    cells = list(query_sweep.rows) + list(data_sweep.rows)
    positive = all(r.cand_savings_pct > 0 for r in cells)
    inv = {}
    for name, rep in (("query", query_sweep), ("data", data_sweep)):
        for eng, attr in (("trad", "time_trad_ns"), ("voro", "time_voro_ns")):
            inv[f"{name}/{eng}"] = _inversions([getattr(r, attr) for r in rep.rows])
    big = next(r for r in query_sweep.rows if r.query_size == 0.32)
    faster = big.time_voro_ns < big.time_trad_ns
    detail = (
        f"(a) candidate savings > 0 in all {len(cells)} cells: {positive}; "
        f"(b) inversions {inv}; "
        f"(c) n=1e5 q=32%: voronoi {big.time_voro_ns / 1e6:.1f} ms vs "
        f"traditional {big.time_trad_ns / 1e6:.1f} ms"
    )
    ok = criterion(
        "C7 timing substitutes",
        positive and all(v <= 1 for v in inv.values()) and faster,
        detail,
    )
    for r in cells:
        print(
            f"  n={r.data_size} q={r.query_size:g} t_trad={r.time_trad_ns / 1e6:.2f}ms "
            f"t_voro={r.time_voro_ns / 1e6:.2f}ms time_savings={r.time_savings_pct:.1f}%"
        )
    assert ok


def test_c8_sweep_determinism(tmp_path, criterion):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("data_sizes = 2000, 8000\nquery_sizes = 0.02\nrepetitions = 20\nrng_seed = 8\n")
    outs = [tmp_path / "run1", tmp_path / "run2"]
    for out in outs:
        assert main(["sweep", "--mode", "data", "--config", str(cfg), "--out-dir", str(out)]) == 0
    same = (outs[0] / "report.csv").read_bytes() == (outs[1] / "report.csv").read_bytes()
    ok = criterion("C8 sweep determinism", same, f"report.csv byte-identical across two runs: {same}")
    assert ok
