"""
Desk-scale acceptance runs. Minutes each; run with ``pytest -m slow``.
"""

import json
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spanners.certifier import CertConfig, certify
from spanners.certifier.report import ERROR
from spanners.generators import GenSpec, generate
from spanners.greedy import STRETCH_RTOL, greedy_spanner, spanner_metrics, verify_mst_containment, verify_stretch
from spanners.metric import MetricSpace, extract_net, metric_graph, packing_test
from spanners.partition import check_weight_bounds, classify_edges, mst_summary

pytestmark = pytest.mark.slow

SEEDS = range(5)


def build(kind, n, eps, seed=0, dim=2):
    points = generate(GenSpec(kind, n=n, dim=dim, seed=seed))
    return greedy_spanner(metric_graph(MetricSpace.from_points(points)), eps)


def u_shape(depth, width):
    left = [[0.0, y] for y in range(depth + 1)]
    bottom = [[x, 0.0] for x in range(1, width + 1)]
    right = [[width, y] for y in range(1, depth + 1)]
    points = np.array(left + bottom + right, dtype=float)
    return greedy_spanner(metric_graph(MetricSpace.from_points(points)), 0.7)


@settings(max_examples=500, deadline=None)
@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=4, max_value=200),
    st.sampled_from([0.1, 0.25, 0.5, 0.9]),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_stretch_mst_and_weight_bounds(dim, n, eps, seed):
    s = greedy_spanner(metric_graph(MetricSpace.from_points(np.random.default_rng(seed).random((n, dim)))), eps)
    assert verify_stretch(s).max_stretch <= (1 + eps) * (1 + STRETCH_RTOL)
    assert verify_mst_containment(s).passed
    bounds = check_weight_bounds(classify_edges(s, mst_summary(s.graph), eps, 0), spanner_metrics(s))
    assert bounds.passed, bounds.as_dict()


@settings(max_examples=200, deadline=None)
@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=2, max_value=300),
    st.integers(min_value=0, max_value=2**32 - 1),
    st.floats(min_value=0.05, max_value=0.5),
)
def test_net_extractions_respect_packing(dim, n, seed, ratio):
    space = MetricSpace.from_points(np.random.default_rng(seed).random((n, dim)))
    net = extract_net(space, 0, 0.5, 0.5 * ratio)
    assert packing_test(space, 0, 0.5, 0.5 * ratio, dim, subset=net).passed


@pytest.fixture(scope="module")
def growth():
    """Seed-averaged (sparsity, lightness) at n=256 and n=2048."""
    result = {}
    for n in (256, 2048):
        metrics = [spanner_metrics(build("uniform-cube", n, 0.5, seed)) for seed in SEEDS]
        result[n] = (
            float(np.mean([m.sparsity for m in metrics])),
            float(np.mean([m.lightness for m in metrics])),
        )
    print(f"\nsparsity/lightness by n: {result}")
    return result


def test_sparsity_is_flat_in_n(growth):
    assert growth[2048][0] <= 1.15 * growth[256][0]


def test_lightness_is_flat_in_n(growth):
    # a log n law would give about 1.375
    assert growth[2048][1] <= 1.2 * growth[256][1]


@pytest.mark.parametrize("n", [64, 128, 256])
@pytest.mark.parametrize("seed", range(7))
def test_certifier_soundness(n, seed):
    spanner = build("uniform-cube", n, 0.25, seed)
    config = CertConfig(eps=0.25, allow_fallback=True, dimension=2)
    report = certify(spanner, config)
    assert report.min_feasible_c is not None
    assert not [a for a in report.anomalies if a.severity == ERROR]
    for level in report.per_level:
        if level.skipped:
            continue
        assert level.max_diam_ratio <= 33 * (1 + 1e-9)
        assert level.k_simple
        assert level.dc1_ok
        if not level.exception:
            assert level.exceptional_count == 0
    assert report.pair_rate is None or 0.0 <= report.pair_rate <= 1.0

    again = certify(build("uniform-cube", n, 0.25, seed), config)
    assert json.dumps(again.as_dict(), sort_keys=True) == json.dumps(report.as_dict(), sort_keys=True)


@pytest.mark.parametrize("depth,width", [(60, 160), (90, 240), (120, 320)])
def test_u_shapes_take_the_exception_path(depth, width):
    spanner = u_shape(depth, width)
    assert spanner.m == spanner.n
    report = certify(spanner, CertConfig(eps=0.7, g=4, s=52))
    built = [level for level in report.per_level if level.level >= 1 and not level.skipped]
    assert built
    assert all(level.exception for level in built)

    eps_a = report.config.eps_analysis
    degree = max(max(level.k_degree for level in built), 1)
    mst_weight = 2 * depth + width
    assert report.exceptional_weight <= 4 * 4 * degree / eps_a * mst_weight / (1 - eps_a)
    assert not [a for a in report.anomalies if a.kind in ("exceptional_bound", "exceptional_total")]


@pytest.mark.parametrize("n", [16, 64, 256])
def test_collinear_builds_no_levels(n):
    spanner = build("collinear", n, 0.25)
    assert spanner.m == n - 1
    report = certify(spanner, CertConfig(eps=0.25))
    assert report.passed
    assert all(level.level == 0 or level.skipped for level in report.per_level)
    assert report.exceptional_count == 0
