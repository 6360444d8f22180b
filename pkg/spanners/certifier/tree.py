"""
Cluster tree, effective diameters and the contracted cluster graph.

The cluster tree joins the clusters of one level through S' MST pieces;
the cluster graph joins them through the next level's spanner edges.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from itertools import combinations

import networkx as nx
import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.sparse.csgraph import dijkstra

from ..exceptions import UncoveredEndpoint
from ..metric import WeightedGraph
from ..partition import SubdividedSpanner
from .clusters import Cluster, owner_map


def cluster_tree(sp: SubdividedSpanner, clusters: Iterable[Cluster]) -> nx.Graph:
    """
    Spanning tree of MST(S') contracted onto ``clusters``.

    Kruskal over MST pieces in (weight, u, v) order; every tree edge keeps
    the piece that realises it in the ``mst`` attribute.
    """
    clusters = sorted(clusters, key=lambda c: c.id)
    owner = owner_map(clusters, sp.graph.n)
    tree = nx.Graph()
    for cluster in clusters:
        tree.add_node(cluster.id, diam=cluster.diameter)
    forest = DisjointSet(c.id for c in clusters)
    for e in sp.mst_pieces().tolist():
        a, b = int(owner[sp.graph.u[e]]), int(owner[sp.graph.v[e]])
        if a != b and forest.merge(a, b):
            tree.add_edge(a, b, mst=e)
    return tree


def path_ediam(tree: nx.Graph, path: Sequence[int]) -> float:
    """Effective diameter of a cluster path: the sum of member diameters."""
    return float(sum(tree.nodes[x]["diam"] for x in path))


def ediam(tree: nx.Graph, nodes: Iterable[int]) -> float:
    """
    Effective diameter of a set of tree nodes.

    The heaviest node-weighted path inside the induced forest; for a path
    this is the plain sum.
    """
    sub = tree.subgraph(nodes)
    best = 0.0
    for component in nx.connected_components(sub):
        down: dict[int, float] = {}
        for v in nx.dfs_postorder_nodes(sub, min(component)):
            weight = sub.nodes[v]["diam"]
            tops = sorted((down[c] for c in sub.neighbors(v) if c in down), reverse=True)[:2]
            down[v] = weight + (tops[0] if tops else 0.0)
            best = max(best, weight + sum(tops))
    return best


def connector_key(sp: SubdividedSpanner, e: int) -> tuple[int, int]:
    """Lexicographic tie-break key of an MST piece."""
    return int(sp.graph.u[e]), int(sp.graph.v[e])


@dataclass
class ClusterGraph:
    """
    Clusters of one level joined by the next level's spanner edges.

    Self-loops and parallel edges are kept out of ``graph`` and listed
    separately as violations.
    """

    graph: nx.Graph
    self_loops: list[int] = field(default_factory=list)
    parallel: list[int] = field(default_factory=list)

    @property
    def simple(self) -> bool:
        return not self.self_loops and not self.parallel

    @property
    def max_degree(self) -> int:
        return max((d for _, d in self.graph.degree()), default=0)


def build_cluster_graph(clusters: Iterable[Cluster], graph: WeightedGraph, edges: Iterable[int]) -> ClusterGraph:
    """
    Contract ``clusters`` and join them by ``edges`` (S' edge ids).

    Raises:
        UncoveredEndpoint: An edge endpoint is in no cluster.
    """
    clusters = list(clusters)
    owner = owner_map(clusters, graph.n)
    kg = ClusterGraph(graph=nx.Graph())
    kg.graph.add_nodes_from(sorted(c.id for c in clusters))
    for e in edges:
        x, y = int(graph.u[e]), int(graph.v[e])
        for z in (x, y):
            if owner[z] < 0:
                raise UncoveredEndpoint(z)
        a, b = int(owner[x]), int(owner[y])
        if a == b:
            kg.self_loops.append(e)
        elif kg.graph.has_edge(a, b):
            kg.parallel.append(e)
        else:
            kg.graph.add_edge(a, b, edge=e)
    return kg


class CenterDistances:
    """d_G between original vertices, from the metric or by Dijkstra on the base graph."""

    def __init__(self, base: WeightedGraph):
        self.base = base
        self._rows: dict[int, np.ndarray] = {}

    def __call__(self, a: int, b: int) -> float:
        if self.base.source is not None:
            return self.base.source.distance(a, b)
        if a not in self._rows:
            self._rows[a] = dijkstra(self.base.to_csr(), directed=False, indices=a)
        return float(self._rows[a][b])


@dataclass
class SeparationReport:
    checked: int = 0
    too_close: list[tuple[int, int, int, float]] = field(default_factory=list)
    too_far: list[tuple[int, int, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.too_close and not self.too_far


def check_center_separation(
    kg: ClusterGraph,
    clusters: dict[int, Cluster],
    ell: float,
    eps: float,
    distance: Callable[[int, int], float],
) -> SeparationReport:
    """
    For every hub in ``kg``: neighbour centers pairwise more than eps*ell
    apart, and each within 3*ell of the hub center.
    """
    report = SeparationReport()
    for hub in sorted(kg.graph.nodes):
        hub_center = clusters[hub].center
        around = [x for x in sorted(kg.graph.neighbors(hub)) if clusters[x].center is not None]
        if hub_center is not None:
            for x in around:
                report.checked += 1
                d = distance(hub_center, clusters[x].center)
                if d > 3.0 * ell:
                    report.too_far.append((hub, x, d))
        for a, b in combinations(around, 2):
            report.checked += 1
            d = distance(clusters[a].center, clusters[b].center)
            if not d > eps * ell:
                report.too_close.append((hub, a, b, d))
    return report


def packing_degree_bound(eps: float, dimension: int) -> float:
    """(12/eps)^d: the most cluster-graph neighbours a ball of radius 3*ell can pack."""
    return (12.0 / eps) ** dimension if dimension else math.inf
