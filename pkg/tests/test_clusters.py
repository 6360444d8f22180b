"""
Test base clustering, cluster trees and cluster graphs.
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import math

import networkx as nx
import numpy as np
import pytest

from spanners.certifier.clusters import Cluster, Provenance, base_clusters, subgraph_diameter
from spanners.certifier.report import check_dc2
from spanners.certifier.tree import (
    CenterDistances,
    build_cluster_graph,
    check_center_separation,
    cluster_tree,
    ediam,
    packing_degree_bound,
    path_ediam,
)
from spanners.exceptions import UncoveredEndpoint
from spanners.greedy import greedy_spanner
from spanners.metric import MetricSpace, WeightedGraph, metric_graph
from spanners.partition import mst_summary, subdivide


def subdivided(points, eps=0.5):
    g = metric_graph(MetricSpace.from_points(np.asarray(points, dtype=float)))
    s = greedy_spanner(g, eps)
    return s, subdivide(s, mst_summary(s.graph))


@pytest.fixture
def line():
    """Ten unit-spaced points on a line."""
    return subdivided(np.arange(10, dtype=float).reshape(-1, 1))


def members(clusters):
    return {c.id: c.vertices.tolist() for c in clusters}


def test_subgraph_diameter_path():
    g = WeightedGraph.from_edges(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (0, 3, 10.0)])
    d, walk = subgraph_diameter(g, np.array([0, 1, 2, 3]), np.array([0, 1, 2]))
    assert d == 4.0
    assert walk == (0, 1, 2, 3)


def test_subgraph_diameter_uses_only_cluster_edges():
    g = WeightedGraph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.5)])
    d, _ = subgraph_diameter(g, np.array([0, 1, 2]), np.array([0, 1]))
    assert d == 2.0
    d, _ = subgraph_diameter(g, np.array([0, 1, 2]), np.array([0]))
    assert math.isinf(d)


def test_base_clusters_on_a_line(line):
    _, sp = line
    clusters = base_clusters(sp, 2.0)
    assert members(clusters) == {0: [7, 8, 9], 1: [4, 5, 6], 2: [0, 1, 2, 3]}
    assert [c.diameter for c in clusters] == [2.0, 2.0, 3.0]
    assert all(c.origin == Provenance.BASE for c in clusters)
    assert not any(c.undersized for c in clusters)
    assert len(clusters[2].credit_edges) == 3
    assert check_dc2(clusters, 2.0, 33.0).passed


def test_base_clusters_partition_the_vertices(line):
    _, sp = line
    for ell0 in (1.0, 2.0, 3.0, 4.0, 8.0):
        clusters = base_clusters(sp, ell0)
        covered = sorted(v for c in clusters for v in c.vertices.tolist())
        assert covered == list(range(sp.graph.n))


def test_undersized_single_cluster(line):
    _, sp = line
    clusters = base_clusters(sp, 16.0)
    assert len(clusters) == 1
    assert clusters[0].undersized
    assert clusters[0].diameter == 9.0
    # undersized clusters only need their own diameter in credit
    assert clusters[0].dc1_floor(16.0) == 9.0


def test_base_clusters_after_subdivision():
    # points 0, 1, 3: the weight-2 MST edge is split in two
    _, sp = subdivided([[0.0], [1.0], [3.0]])
    clusters = base_clusters(sp, 2.0 * sp.w0)
    covered = sorted(v for c in clusters for v in c.vertices.tolist())
    assert covered == [0, 1, 2, 3]
    virtual = [c for c in clusters if c.is_virtual]
    assert not virtual


def test_cluster_tree_on_a_line(line):
    _, sp = line
    clusters = base_clusters(sp, 2.0)
    tree = cluster_tree(sp, clusters)
    assert sorted(tree.edges()) == [(0, 1), (1, 2)]
    assert path_ediam(tree, [0, 1, 2]) == 7.0
    assert ediam(tree, tree.nodes) == 7.0
    assert ediam(tree, [0, 2]) == 3.0


def test_ediam_on_a_star():
    tree = nx.star_graph(3)
    nx.set_node_attributes(tree, {0: 1.0, 1: 2.0, 2: 3.0, 3: 4.0}, "diam")
    assert ediam(tree, tree.nodes) == 8.0


def test_cluster_graph_edges_and_self_loops(line):
    _, sp = line
    clusters = base_clusters(sp, 2.0)
    index = sp.graph.edge_index
    kg = build_cluster_graph(clusters, sp.graph, [index[(3, 4)], index[(6, 7)], index[(4, 5)]])
    assert sorted(kg.graph.edges()) == [(0, 1), (1, 2)]
    assert kg.self_loops == [index[(4, 5)]]
    assert not kg.simple
    assert kg.max_degree == 2


def test_cluster_graph_parallel_edges(line):
    _, sp = line
    clusters = base_clusters(sp, 2.0)
    # both edges join cluster 2 (0..3) to cluster 1 (4..6)
    extra = WeightedGraph.from_edges(sp.graph.n, [(3, 4, 1.0), (2, 5, 3.0)])
    kg = build_cluster_graph(clusters, extra, [0, 1])
    assert kg.parallel == [1]
    assert kg.graph.number_of_edges() == 1


def test_cluster_graph_uncovered_endpoint(line):
    _, sp = line
    clusters = [c for c in base_clusters(sp, 2.0) if c.id != 0]
    with pytest.raises(UncoveredEndpoint) as info:
        build_cluster_graph(clusters, sp.graph, [sp.graph.edge_index[(6, 7)]])
    assert info.value.vertex == 7


def test_center_separation(line):
    s, sp = line
    clusters = base_clusters(sp, 2.0)
    by_id = {c.id: c for c in clusters}
    index = sp.graph.edge_index
    kg = build_cluster_graph(clusters, sp.graph, [index[(3, 4)], index[(6, 7)]])
    distance = CenterDistances(s.base)
    # centers 7, 4 and 0; the hub's neighbours are 7 apart
    assert check_center_separation(kg, by_id, 10.0, 0.1, distance).passed
    report = check_center_separation(kg, by_id, 100.0, 0.1, distance)
    assert report.too_close == [(1, 0, 2, 7.0)]
    report = check_center_separation(kg, by_id, 1.0, 0.1, distance)
    assert report.too_far


def test_center_distances_without_a_metric():
    g = WeightedGraph.from_edges(3, [(0, 1, 1.0), (1, 2, 2.0)])
    distance = CenterDistances(g)
    assert distance(0, 2) == 3.0
    assert distance(2, 0) == 3.0


def test_packing_degree_bound():
    assert packing_degree_bound(0.1, 2) == pytest.approx(14400.0)
    assert math.isinf(packing_degree_bound(0.1, 0))


def synthetic(cid, origin, diameter, augmentations=(), **notes):
    return Cluster(
        id=cid,
        level=1,
        vertices=np.array([cid]),
        edges=np.array([], dtype=np.int64),
        origin=origin,
        augmentations=list(augmentations),
        diameter=diameter,
        notes=notes,
    )


def test_dc2_flags_an_oversized_cluster():
    report = check_dc2([synthetic(0, Provenance.PHASE1, 10.0), synthetic(1, Provenance.PHASE1, 70.0)], 2.0, 33.0)
    assert not report.passed
    assert report.max_ratio == pytest.approx(35.0)
    assert report.violations == [{"cluster": 1, "kind": "diameter", "value": 70.0, "bound": 66.0}]


def test_dc2_phase4_bounds_hold_after_augmentation():
    augmented = synthetic(3, Provenance.PHASE4, 9.0, [Provenance.PHASE3_AUGMENTED], ediam=4.0)
    assert augmented.provenance == Provenance.PHASE3_AUGMENTED
    report = check_dc2([augmented], 2.0, 33.0)
    assert [v["kind"] for v in report.violations] == ["phase4", "effective"]
    assert check_dc2([synthetic(4, Provenance.PHASE4, 8.0, [Provenance.PHASE3_AUGMENTED], ediam=4.0)], 2.0, 33.0).passed
