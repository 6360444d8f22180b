"""
Test the greedy spanner construction and its verification.
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.sparse.csgraph import floyd_warshall

import spanners.greedy as greedy
from spanners.exceptions import DisconnectedGraph, InvalidEps, SingleVertex
from spanners.greedy import (
    STRETCH_RTOL,
    Spanner,
    greedy_spanner,
    spanner_metrics,
    verify_mst_containment,
    verify_stretch,
)
from spanners.metric import MetricSpace, WeightedGraph, metric_graph, validate_metric

EPS_VALUES = [0.1, 0.25, 0.5, 0.9]


def greedy_spanner_reference(g: WeightedGraph, eps: float) -> list[int]:
    """Brute-force greedy: exact all-pairs spanner distances after every insertion."""
    kept: list[int] = []
    dist = np.full((g.n, g.n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for k in g.sorted_order().tolist():
        x, y, w = int(g.u[k]), int(g.v[k]), float(g.w[k])
        if (1 + eps) * w < dist[x, y]:
            kept.append(k)
            dist = floyd_warshall(g.take(kept).to_csr(), directed=False)
    return kept


def points_graph(points) -> WeightedGraph:
    return metric_graph(MetricSpace.from_points(np.asarray(points, dtype=float)))


def random_metric(n: int, seed: int) -> MetricSpace:
    """Shortest-path closure of a random complete graph: always a metric."""
    rng = np.random.default_rng(seed)
    w = rng.uniform(1.0, 10.0, size=(n, n))
    w = np.triu(w, 1)
    w = w + w.T
    d = floyd_warshall(w, directed=False)
    return validate_metric(d)


def run_test(name, g, eps):
    """Helper to build a spanner and print its metrics."""
    print(f"\n--- {name} ---")
    s = greedy_spanner(g, eps)
    metrics = spanner_metrics(s)
    print(f"Edges: {s.m} / {g.m}")
    print(f"Lightness: {metrics.lightness}")
    return s, metrics


def test_collinear_three_points():
    g = points_graph([[0.0], [1.0], [2.0]])
    s, metrics = run_test("Collinear n=3", g, 0.5)
    assert sorted(zip(s.graph.u.tolist(), s.graph.v.tolist())) == [(0, 1), (1, 2)]
    assert metrics.lightness == pytest.approx(1.0)
    assert metrics.sparsity == pytest.approx(2 / 3)
    assert metrics.max_stretch == pytest.approx(1.0)


def test_collinear_keeps_only_the_path():
    g = points_graph(np.arange(10, dtype=float).reshape(-1, 1))
    for eps in EPS_VALUES:
        s, metrics = run_test(f"Collinear n=10 eps={eps}", g, eps)
        assert s.m == 9
        assert metrics.lightness == pytest.approx(1.0)


def test_square_keeps_the_diagonal_only_for_small_eps():
    # unit square: diagonal sqrt(2) vs detour 2
    square = [[0, 0], [1, 0], [0, 1], [1, 1]]
    loose = greedy_spanner(points_graph(square), 0.5)
    tight = greedy_spanner(points_graph(square), 0.1)
    assert loose.m == 4
    assert tight.m == 6


def test_uses_bounded_search(mocker):
    spy = mocker.spy(greedy, "bounded_dijkstra")
    g = points_graph([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    greedy_spanner(g, 0.5)
    assert spy.call_count == g.m
    for call, k in zip(spy.call_args_list, g.sorted_order().tolist()):
        _, x, y, cutoff = call.args
        assert (x, y) == (int(g.u[k]), int(g.v[k]))
        assert cutoff == pytest.approx(1.5 * g.w[k])


def test_trace_is_monotone():
    g = points_graph(np.random.default_rng(3).random((30, 2)))
    s = greedy_spanner(g, 0.25)
    assert [step.edge for step in s.trace] == s.edge_ids.tolist()
    cutoffs = [step.cutoff for step in s.trace]
    assert cutoffs == sorted(cutoffs)
    # the first edge joins two isolated vertices
    assert not s.trace[0].above_cutoff


def test_invalid_eps():
    g = points_graph([[0.0], [1.0]])
    for eps in (0, 1, -0.5, 1.5, "x"):
        with pytest.raises(InvalidEps):
            greedy_spanner(g, eps)


def test_disconnected_input():
    with pytest.raises(DisconnectedGraph):
        greedy_spanner(WeightedGraph.from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]), 0.5)


def test_metrics_need_two_vertices():
    g = WeightedGraph.from_edges(1, [])
    with pytest.raises(SingleVertex):
        spanner_metrics(Spanner(g, np.array([], dtype=np.int64), 0.5))


def test_deleted_edge_is_caught():
    g = points_graph([[0.0], [1.0], [2.0], [3.5]])
    s = greedy_spanner(g, 0.5)
    broken = Spanner(g, s.edge_ids[1:], s.eps)
    report = verify_stretch(broken)
    assert report.max_stretch > 1.5
    assert report.worst_pair is not None
    assert not verify_mst_containment(broken).passed


@settings(max_examples=150, deadline=None)
@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=4, max_value=60),
    st.sampled_from(EPS_VALUES),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_stretch_and_mst_on_random_points(dim, n, eps, seed):
    g = points_graph(np.random.default_rng(seed).random((n, dim)))
    s = greedy_spanner(g, eps)
    assert verify_stretch(s).max_stretch <= (1 + eps) * (1 + STRETCH_RTOL)
    check = verify_mst_containment(s)
    assert check.contained
    assert check.passed


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=2, max_value=40),
    st.sampled_from(EPS_VALUES),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_stretch_on_random_metrics(n, eps, seed):
    g = metric_graph(random_metric(n, seed))
    s = greedy_spanner(g, eps)
    assert verify_stretch(s).max_stretch <= (1 + eps) * (1 + STRETCH_RTOL)
    assert verify_mst_containment(s).passed


@settings(max_examples=100, deadline=None)
@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=2, max_value=12),
    st.sampled_from(EPS_VALUES),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_matches_brute_force_greedy(dim, n, eps, seed):
    g = points_graph(np.random.default_rng(seed).random((n, dim)))
    assert greedy_spanner(g, eps).edge_ids.tolist() == greedy_spanner_reference(g, eps)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=50), st.integers(min_value=0, max_value=2**32 - 1))
def test_deterministic(n, seed):
    points = np.random.default_rng(seed).random((n, 2))
    first = greedy_spanner(points_graph(points), 0.25)
    second = greedy_spanner(points_graph(points.copy()), 0.25)
    assert first.edge_ids.tolist() == second.edge_ids.tolist()
