"""
Test MST subdivision, the credit ledger and the edge partition.
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spanners.exceptions import EpsOutOfRange, InsufficientCredit
from spanners.greedy import greedy_spanner, spanner_metrics
from spanners.metric import MetricSpace, all_pairs_distances, metric_graph
from spanners.partition import (
    LIGHT,
    LOW,
    CreditLedger,
    allocate_credits,
    check_weight_bounds,
    classify_edges,
    level_bounds,
    mst_account,
    mst_summary,
    partition_grid,
    piece_count,
    stream_count,
    subdivide,
)


def build(points, eps=0.5):
    g = metric_graph(MetricSpace.from_points(np.asarray(points, dtype=float)))
    return greedy_spanner(g, eps)


@pytest.fixture
def uneven_path():
    """Points 0, 1, 3 on a line: MST weights 1 and 2, w0 = 1.5."""
    return build([[0.0], [1.0], [3.0]])


def test_w0(uneven_path):
    summary = mst_summary(uneven_path.graph)
    assert summary.total_weight == pytest.approx(3.0)
    assert summary.w0 == pytest.approx(1.5)


def test_piece_count_exact_multiples():
    assert piece_count(3.0, 1.5) == 2
    assert piece_count(0.9, 0.3) == 3
    assert piece_count(1.0, 1.5) == 1
    assert piece_count(3.1, 1.5) == 3


def test_subdivide_numbers_virtual_vertices(uneven_path):
    sp = subdivide(uneven_path, mst_summary(uneven_path.graph))
    assert sp.n_original == 3
    assert sp.n_virtual == 1
    edges = sorted(zip(sp.graph.u.tolist(), sp.graph.v.tolist(), sp.graph.w.tolist()))
    assert edges == [(0, 1, 1.0), (1, 3, 1.0), (2, 3, 1.0)]
    assert sp.is_mst.all()
    assert np.all(sp.graph.w <= sp.w0 * (1 + 1e-12))
    assert sp.graph.w.sum() == pytest.approx(sp.mst_weight)


def test_subdivide_keeps_non_mst_edges():
    s = build([[0, 0], [1, 0], [0, 1], [1, 1]], eps=0.1)
    sp = subdivide(s, mst_summary(s.graph))
    assert int((~sp.is_mst).sum()) == 3
    assert len(sp.from_spanner) == 3
    for k, e in sp.from_spanner.items():
        assert not sp.is_mst[e]
        assert sp.graph.w[e] == s.graph.w[k]


def test_allocate_credits(uneven_path):
    sp = subdivide(uneven_path, mst_summary(uneven_path.graph))
    ledger = allocate_credits(sp, 2.0)
    assert ledger.initial_total == pytest.approx(3 * 2.0 * 1.5)
    assert ledger.initial_total <= 2 * 2.0 * sp.mst_weight
    e = int(np.flatnonzero(sp.is_mst)[0])
    assert ledger.balance(mst_account(sp, e)) == pytest.approx(3.0)


def test_ledger_moves_are_conserved():
    ledger = CreditLedger(1.0)
    ledger.deposit("a", 5.0)
    ledger.transfer("a", "b", 2.0)
    ledger.pay("b", edge=7, amount=1.5)
    assert ledger.balance("a") == pytest.approx(3.0)
    assert ledger.balance("b") == pytest.approx(0.5)
    assert ledger.paid_total == pytest.approx(1.5)
    assert ledger.is_conserved()
    assert not ledger.negative_accounts()


def test_ledger_refuses_overdraft():
    ledger = CreditLedger(1.0)
    ledger.deposit("a", 1.0)
    with pytest.raises(InsufficientCredit) as info:
        ledger.pay("a", edge=0, amount=2.0)
    assert info.value.account == "a"
    assert ledger.balance("a") == 1.0


def test_partition_grid_half_eps():
    levels, streams = partition_grid(np.array([0.5, 1.0, 3.0, 5.0, 9.0]), 1.0, 0.5)
    assert levels.tolist() == [LIGHT, LIGHT, LOW, 2, 3]
    assert streams.tolist() == [-1, -1, -1, 0, 0]


def test_partition_grid_quarter_eps():
    assert stream_count(0.25) == 2
    levels, streams = partition_grid(np.array([6.0, 10.0, 20.0]), 1.0, 0.25)
    assert levels.tolist() == [LOW, 1, 2]
    assert streams.tolist() == [-1, 1, 0]


@settings(max_examples=200, deadline=None)
@given(
    st.floats(min_value=1e-3, max_value=1e6),
    st.sampled_from([0.1, 0.2, 0.3, 0.5, 0.7]),
)
def test_every_heavy_weight_lands_in_its_bracket(weight, eps):
    levels, streams = partition_grid(np.array([weight]), 1.0, eps)
    i, j = int(levels[0]), int(streams[0])
    if i > LOW:
        low, high = level_bounds(i, j, 1.0, eps)
        assert low < weight * (1 + 1e-9) and weight <= high * (1 + 1e-9)


def test_classify_edges(uneven_path):
    summary = mst_summary(uneven_path.graph)
    part = classify_edges(uneven_path, summary, 0.5, 0)
    assert len(part.light) == 1
    assert len(part.low) == 1
    assert part.light_weight == pytest.approx(1.0)
    assert part.low_weight == pytest.approx(2.0)
    assert part.as_dict()["L_S"]["count"] == 1


def test_classify_rejects_bad_stream(uneven_path):
    summary = mst_summary(uneven_path.graph)
    with pytest.raises(EpsOutOfRange):
        classify_edges(uneven_path, summary, 0.5, 1)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=4, max_value=60),
    st.sampled_from([0.1, 0.25, 0.5, 0.9]),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_weight_bounds_with_measured_sparsity(dim, n, eps, seed):
    s = build(np.random.default_rng(seed).random((n, dim)), eps)
    report = check_weight_bounds(classify_edges(s, mst_summary(s.graph), eps, 0), spanner_metrics(s))
    assert report.passed, report.as_dict()


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=3, max_value=40),
    st.sampled_from([0.1, 0.3, 0.5]),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_subdivision_preserves_distances(dim, n, eps, seed):
    s = build(np.random.default_rng(seed).random((n, dim)), eps)
    sp = subdivide(s, mst_summary(s.graph))
    before = all_pairs_distances(s.graph)
    after = all_pairs_distances(sp.graph)[:n, :n]
    np.testing.assert_allclose(after, before, rtol=1e-9)
    assert sp.graph.w[sp.is_mst].sum() == pytest.approx(sp.mst_weight)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=4, max_value=50),
    st.sampled_from([0.1, 0.25, 0.5, 0.9]),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_partition_is_exhaustive_and_disjoint(dim, n, eps, seed):
    s = build(np.random.default_rng(seed).random((n, dim)), eps)
    summary = mst_summary(s.graph)
    parts = [classify_edges(s, summary, eps, j) for j in range(stream_count(eps))]
    seen = list(parts[0].light) + list(parts[0].low)
    for part in parts:
        for i, ids in part.levels.items():
            assert i >= 1
            low, high = level_bounds(i, part.j, summary.w0, eps)
            assert np.all(s.graph.w[ids] > low * (1 - 1e-9))
            assert np.all(s.graph.w[ids] <= high * (1 + 1e-9))
            seen.extend(ids.tolist())
        assert part.other_streams == sum(len(p) for q in parts if q.j != part.j for p in q.levels.values())
    assert sorted(int(e) for e in seen) == list(range(s.m))
