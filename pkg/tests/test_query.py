import random

import pytest

from areaquery.geometry import (
    Point,
    Polygon,
    interior_point,
    mbr,
    point_in_polygon,
    random_query_polygon,
    segment_intersects_polygon,
)
from areaquery.query import (
    Dataset,
    QueryError,
    brute_force_query,
    filter_refine_query,
    voronoi_area_query,
)

from oracles import linear_nn

FULL = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])


def make_dataset(n, seed):
    rng = random.Random(seed)
    return Dataset.build([(rng.random(), rng.random()) for _ in range(n)])


@pytest.fixture(scope="module")
def d1000():
    return make_dataset(1000, 1)


def test_full_domain(d1000):
    t = filter_refine_query(d1000, FULL)
    v = voronoi_area_query(d1000, FULL)
    assert t.result_ids == v.result_ids == set(range(1000))
    assert t.candidate_count == 1000
    assert brute_force_query(d1000, FULL) == set(range(1000))


def test_empty_region():
    D = Dataset.build([(0.1, 0.1), (0.9, 0.1), (0.5, 0.9), (0.2, 0.3)])
    A = Polygon([(0.6, 0.5), (0.7, 0.5), (0.65, 0.6)])
    t = filter_refine_query(D, A)
    v = voronoi_area_query(D, A)
    assert t.result_ids == v.result_ids == brute_force_query(D, A) == set()
    assert t.candidate_count == 0
    assert v.candidate_count >= 1


def test_single_point_inside():
    D = Dataset.build([(0.5, 0.5), (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)])
    A = Polygon([(0.4, 0.4), (0.6, 0.4), (0.6, 0.6), (0.4, 0.6)])
    v = voronoi_area_query(D, A)
    assert v.result_ids == {0}
    assert v.seed == 0
    assert v.candidate_count >= 1


def test_point_ids_accepted():
    pts = [Point(0.1, 0.2, 2), Point(0.8, 0.1, 0), Point(0.4, 0.9, 1)]
    D = Dataset.build(pts)
    assert D.points == [(0.8, 0.1), (0.4, 0.9), (0.1, 0.2)]
    with pytest.raises(QueryError):
        Dataset.build([Point(0.1, 0.2, 5), Point(0.8, 0.1, 0), Point(0.4, 0.9, 1)])


def test_three_engines_agree(d1000):
    for s in range(100):
        A = random_query_polygon(s, random.Random(s).uniform(0.01, 0.6))
        truth = brute_force_query(d1000, A)
        t = filter_refine_query(d1000, A)
        v = voronoi_area_query(d1000, A)
        assert v.result_ids == truth
        assert t.result_ids == truth
        assert t.candidate_count == sum(1 for p in d1000.points if mbr(A).contains(p))


@pytest.mark.parametrize("n", [100, 1000, 5000])
def test_agreement_across_sizes(n):
    D = make_dataset(n, n)
    for s in range(60):
        A = random_query_polygon(n * 100 + s, random.Random(s).uniform(0.005, 0.5))
        assert voronoi_area_query(D, A).result_ids == brute_force_query(D, A)


def test_outcome_invariants(d1000):
    for s in range(50):
        A = random_query_polygon(s, 0.1)
        for o in (filter_refine_query(d1000, A), voronoi_area_query(d1000, A)):
            assert o.candidate_count == o.containment_tests
            assert o.candidate_count >= len(o.result_ids)
            assert o.elapsed > 0


def test_trace_enqueue_rules(d1000):
    pts = d1000.points
    adj = d1000.triangulation.adjacency
    for s in range(60):
        A = random_query_polygon(s, 0.08)
        v = voronoi_area_query(d1000, A, record_trace=True)
        ids = [p for p, _, _ in v.trace]
        assert len(ids) == len(set(ids)) == v.candidate_count  # no re-enqueue
        assert v.trace[0] == (v.seed, "seed", None)
        for p, reason, parent in v.trace[1:]:
            assert p in adj[parent]
            if reason == "internal":
                assert point_in_polygon(pts[parent], A)
            else:
                assert reason == "segment"
                assert not point_in_polygon(pts[parent], A)
                assert segment_intersects_polygon((pts[parent], pts[p]), A)
            # an enqueued point is inside A, next to an internal point, or joined by a crossing segment
            assert (
                point_in_polygon(pts[p], A)
                or reason == "internal"
                or segment_intersects_polygon((pts[parent], pts[p]), A)
            )
        assert v.result_ids == {p for p in ids if point_in_polygon(pts[p], A)}


def test_seed_is_global_nearest(d1000):
    for s in range(100):
        A = random_query_polygon(s, 0.02)
        v = voronoi_area_query(d1000, A)
        assert v.seed == linear_nn(d1000.points, interior_point(A))


def test_termination_bound(d1000):
    for s in range(30):
        A = random_query_polygon(s, 1.0)
        assert voronoi_area_query(d1000, A).candidate_count <= len(d1000)


def test_mean_candidate_dominance():
    D = make_dataset(20_000, 3)
    ct = cv = 0
    for s in range(100):
        A = random_query_polygon(s, 0.04)
        ct += filter_refine_query(D, A).candidate_count
        cv += voronoi_area_query(D, A).candidate_count
    assert cv < ct


def test_query_on_empty_dataset_rejected():
    with pytest.raises(QueryError):
        Dataset.build([])
