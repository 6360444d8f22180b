"""
Clusters of S' vertices and the level-0 (base) clustering.

A cluster is a connected subgraph of S'. Its diameter is measured exactly
inside that subgraph, using only the cluster's own edges.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np
from scipy.sparse import csr_array
from scipy.sparse.csgraph import dijkstra

from ..metric import WeightedGraph
from ..partition import SubdividedSpanner

DIAMETER_CHUNK = 256


class Provenance(StrEnum):
    BASE = "Base"
    PHASE1 = "Phase1"
    PHASE2 = "Phase2"
    PHASE3_AUGMENTED = "Phase3-augmented"
    PHASE4 = "Phase4"
    PHASE4_AUGMENTED = "Phase4-augmented"
    RESIDUAL = "Residual"


@dataclass(eq=False)
class Cluster:
    """
    A level-``level`` cluster.

    ``members`` are the ids of the level-(level-1) clusters it is made of
    (empty for base clusters). ``connectors`` are the S' MST pieces joining
    members, and ``extra_edges`` the spanner edges added while building it.
    """

    id: int
    level: int
    vertices: np.ndarray
    edges: np.ndarray
    origin: Provenance
    members: tuple[int, ...] = ()
    connectors: tuple[int, ...] = ()
    extra_edges: tuple[int, ...] = ()
    augmentations: list[Provenance] = field(default_factory=list)
    diameter: float = 0.0
    diameter_path: tuple[int, ...] = ()
    center: int | None = None
    undersized: bool = False
    credit_edges: tuple[int, ...] = ()
    notes: dict[str, Any] = field(default_factory=dict)

    @property
    def provenance(self) -> Provenance:
        if Provenance.PHASE4_AUGMENTED in self.augmentations:
            return Provenance.PHASE4_AUGMENTED
        if Provenance.PHASE3_AUGMENTED in self.augmentations:
            return Provenance.PHASE3_AUGMENTED
        return self.origin

    @property
    def is_virtual(self) -> bool:
        return self.center is None

    @property
    def connected(self) -> bool:
        return math.isfinite(self.diameter)

    def dc1_floor(self, ell: float) -> float:
        """DC1 asks for c times this many credits."""
        if self.undersized or self.origin == Provenance.RESIDUAL:
            return self.diameter
        return max(self.diameter, ell / 2.0)

    def as_dict(self, with_vertices: bool = False) -> dict[str, Any]:
        data: dict[str, Any] = {
            "id": self.id,
            "level": self.level,
            "provenance": str(self.provenance),
            "origin": str(self.origin),
            "size": int(len(self.vertices)),
            "members": list(self.members),
            "diameter": self.diameter,
            "center": self.center,
        }
        if self.undersized:
            data["undersized"] = True
        if with_vertices:
            data["vertices"] = self.vertices.tolist()
        return data


def subgraph_diameter(graph: WeightedGraph, vertices: np.ndarray, edges: np.ndarray) -> tuple[float, tuple[int, ...]]:
    """
    Exact diameter of the subgraph (vertices, edges) and one diameter path.

    Returns ``(inf, ())`` when the subgraph is disconnected. The attaining
    pair is the first maximum in row-major order of local indices.
    """
    k = len(vertices)
    if k <= 1:
        return 0.0, tuple(int(v) for v in vertices)
    local = {int(v): i for i, v in enumerate(vertices.tolist())}
    eu = [local[int(a)] for a in graph.u[edges].tolist()]
    ev = [local[int(b)] for b in graph.v[edges].tolist()]
    ew = graph.w[edges]
    matrix = csr_array(
        (np.concatenate([ew, ew]), (np.array(eu + ev, dtype=np.int64), np.array(ev + eu, dtype=np.int64))),
        shape=(k, k),
    )

    best, pair = -1.0, (0, 0)
    for start in range(0, k, DIAMETER_CHUNK):
        rows = np.arange(start, min(k, start + DIAMETER_CHUNK))
        dist = dijkstra(matrix, directed=False, indices=rows)
        if not np.all(np.isfinite(dist)):
            return math.inf, ()
        flat = int(np.argmax(dist))
        r, col = divmod(flat, k)
        if dist[r, col] > best:
            best, pair = float(dist[r, col]), (int(rows[r]), col)

    _, pred = dijkstra(matrix, directed=False, indices=pair[0], return_predecessors=True)
    walk = [pair[1]]
    while walk[-1] != pair[0]:
        walk.append(int(pred[walk[-1]]))
    walk.reverse()
    return best, tuple(int(vertices[i]) for i in walk)


def make_cluster(
    cid: int,
    level: int,
    graph: WeightedGraph,
    n_original: int,
    vertices: Iterable[int],
    edges: Iterable[int],
    origin: Provenance,
    **extra: Any,
) -> Cluster:
    """Build a cluster and measure it."""
    vs = np.array(sorted(set(int(v) for v in vertices)), dtype=np.int64)
    es = np.array(sorted(set(int(e) for e in edges)), dtype=np.int64)
    cluster = Cluster(id=cid, level=level, vertices=vs, edges=es, origin=origin, **extra)
    measure(cluster, graph, n_original)
    return cluster


def measure(cluster: Cluster, graph: WeightedGraph, n_original: int) -> None:
    """Recompute diameter, diameter path and center in place."""
    cluster.diameter, cluster.diameter_path = subgraph_diameter(graph, cluster.vertices, cluster.edges)
    real = cluster.vertices[cluster.vertices < n_original]
    cluster.center = int(real[0]) if len(real) else None


def path_edges(graph: WeightedGraph, walk: tuple[int, ...]) -> tuple[int, ...]:
    """S' edge ids along a vertex walk."""
    index = graph.edge_index
    return tuple(index[(min(a, b), max(a, b))] for a, b in zip(walk, walk[1:]))


def _tree_children(sp: SubdividedSpanner, root: int) -> tuple[list[list[tuple[int, int]]], list[int]]:
    graph = sp.graph
    adj: list[list[tuple[int, int]]] = [[] for _ in range(graph.n)]
    for e in np.flatnonzero(sp.is_mst).tolist():
        a, b = int(graph.u[e]), int(graph.v[e])
        adj[a].append((b, e))
        adj[b].append((a, e))
    for row in adj:
        row.sort()

    children: list[list[tuple[int, int]]] = [[] for _ in range(graph.n)]
    post: list[int] = []
    seen = np.zeros(graph.n, dtype=bool)
    seen[root] = True
    stack: list[tuple[int, Iterator[tuple[int, int]]]] = [(root, iter(adj[root]))]
    while stack:
        v, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            post.append(v)
            continue
        child, e = nxt
        if seen[child]:
            continue
        seen[child] = True
        children[v].append((child, e))
        stack.append((child, iter(adj[child])))
    return children, post


def base_clusters(sp: SubdividedSpanner, ell0: float, ids: Iterator[int] | None = None) -> list[Cluster]:
    """
    Break MST(S') into level-0 clusters of diameter in [ell0, 4 ell0].

    Post-order sweep from vertex 0, children in ascending id: a vertex whose
    pending subtree has height >= ell0 cuts that subtree off as a cluster.
    What is left at the root joins the adjacent cluster with the smallest
    id; if nothing was cut the whole tree is one cluster, flagged
    ``undersized`` when its diameter is below ell0.

    Each cluster's DC1 credit comes from the MST pieces on its diameter path
    (``credit_edges``).
    """
    ids = ids if ids is not None else itertools.count()
    graph = sp.graph
    children, post = _tree_children(sp, root=0)

    height = np.zeros(graph.n)
    pending_v: list[list[int]] = [[] for _ in range(graph.n)]
    pending_e: list[list[int]] = [[] for _ in range(graph.n)]
    cut_as: dict[int, int] = {}
    pieces: list[tuple[int, list[int], list[int]]] = []

    for v in post:
        verts, edges, h = [v], [], 0.0
        for child, e in children[v]:
            if child in cut_as:
                continue
            verts.extend(pending_v[child])
            edges.extend(pending_e[child])
            edges.append(e)
            h = max(h, height[child] + graph.w[e])
            pending_v[child], pending_e[child] = [], []
        height[v] = h
        if h >= ell0 and v != 0:
            cid = next(ids)
            cut_as[v] = cid
            pieces.append((cid, verts, edges))
        else:
            pending_v[v], pending_e[v] = verts, edges

    root = 0
    if height[root] >= ell0 or not pieces:
        pieces.append((next(ids), pending_v[root], pending_e[root]))
    else:
        # leftover root fragment joins its neighbouring cluster with the smallest id
        fragment = set(pending_v[root])
        options = [
            (cut_as[child], e)
            for v in fragment
            for child, e in children[v]
            if child in cut_as
        ]
        target, link = min(options)
        for k, (cid, verts, edges) in enumerate(pieces):
            if cid == target:
                pieces[k] = (cid, verts + pending_v[root], edges + pending_e[root] + [link])
                break

    clusters = []
    for cid, verts, edges in sorted(pieces):
        cluster = make_cluster(cid, 0, graph, sp.n_original, verts, edges, Provenance.BASE)
        cluster.undersized = cluster.diameter < ell0
        cluster.credit_edges = path_edges(graph, cluster.diameter_path)
        clusters.append(cluster)
    return clusters


def owner_map(clusters: Iterable[Cluster], size: int) -> np.ndarray:
    """Vertex -> id of the cluster holding it (-1 if none)."""
    owner = np.full(size, -1, dtype=np.int64)
    for cluster in clusters:
        owner[cluster.vertices] = cluster.id
    return owner
