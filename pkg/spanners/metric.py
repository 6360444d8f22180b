"""
Finite metric spaces, weighted graphs, shortest paths and MSTs.

Everything here is immutable once constructed. Edge lists are stored as
read-only numpy arrays with canonical ``u < v`` endpoints so the rest of
the library can sort, mask and slice them cheaply.
"""

from __future__ import annotations

import heapq
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.sparse import csr_array
from scipy.sparse.csgraph import connected_components, shortest_path as csgraph_shortest_path
from sklearn.metrics import pairwise_distances

from .exceptions import (
    AsymmetricMatrix,
    DisconnectedGraph,
    InvalidVertex,
    NonpositiveDistance,
    NotInBall,
    PairTooClose,
    SinglePoint,
    SpanlabError,
    TriangleViolation,
)

UNREACHABLE = math.inf
METRIC_RTOL = 1e-9

# p -> sklearn metric name
LP_METRICS: dict[float, str] = {
    1: "manhattan",
    2: "euclidean",
    math.inf: "chebyshev",
}


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PointSet:
    """Coordinates of n points in R^dim, one row per point."""

    points: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=np.float64)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise SpanlabError(f"Point set must be a non-empty n x dim array, got shape {points.shape}")
        if not np.all(np.isfinite(points)):
            raise SpanlabError("Point coordinates must be finite")
        object.__setattr__(self, "points", _readonly(points))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """
    A finite metric on points 0..n-1.

    Always carries the dense distance matrix. Spaces built from coordinates
    also keep the ``PointSet`` and the Lp exponent.
    """

    matrix: np.ndarray
    points: PointSet | None = None
    p: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", _readonly(np.asarray(self.matrix, dtype=np.float64)))

    @classmethod
    def from_points(cls, points: PointSet | np.ndarray, p: float = 2) -> MetricSpace:
        """
        Build an Lp metric over a point set.

        Args:
            points: PointSet or raw (n, dim) coordinates.
            p: 1, 2 or math.inf.

        Raises:
            SpanlabError: Unsupported p.
            NonpositiveDistance: Two distinct indices share coordinates.
        """
        if not isinstance(points, PointSet):
            points = PointSet(points)
        if p not in LP_METRICS:
            raise SpanlabError(f"Unsupported Lp exponent {p!r}; use 1, 2 or inf")
        matrix = pairwise_distances(points.points, metric=LP_METRICS[p])
        np.fill_diagonal(matrix, 0.0)
        if points.n > 1:
            off = matrix + np.eye(points.n)
            if np.any(off <= 0):
                i, j = np.argwhere(off <= 0)[0]
                raise NonpositiveDistance(int(i), int(j), float(matrix[i, j]))
        return cls(matrix=matrix, points=points, p=p)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int | None:
        return self.points.dim if self.points is not None else None

    @property
    def metric_name(self) -> str | None:
        return LP_METRICS.get(self.p) if self.p is not None else None

    def distance(self, i: int, j: int) -> float:
        return float(self.matrix[i, j])


def validate_metric(matrix: Sequence[Sequence[float]] | np.ndarray, rtol: float = METRIC_RTOL) -> MetricSpace:
    """
    Validate an explicit distance matrix.

    Args:
        matrix: Square matrix of pairwise distances.
        rtol: Relative tolerance for symmetry and the triangle inequality.

    Returns:
        The validated MetricSpace.

    Raises:
        AsymmetricMatrix: d(i,j) != d(j,i).
        NonpositiveDistance: A zero or negative off-diagonal entry.
        TriangleViolation: The first (i, j, k) in lexicographic order with
            d(i,j) > d(i,k) + d(k,j).
    """
    d = np.asarray(matrix, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 1:
        raise SpanlabError(f"Distance matrix must be square and non-empty, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise SpanlabError("Distance matrix entries must be finite")
    n = d.shape[0]

    asym = ~np.isclose(d, d.T, rtol=rtol, atol=0.0)
    if asym.any():
        i, j = np.argwhere(asym)[0]
        raise AsymmetricMatrix(int(i), int(j), float(d[i, j]), float(d[j, i]))

    if np.any(np.diag(d) != 0):
        i = int(np.flatnonzero(np.diag(d))[0])
        raise SpanlabError(f"Diagonal entry ({i}, {i}) must be 0, got {d[i, i]!r}")

    off = d + np.eye(n)
    if np.any(off <= 0):
        i, j = np.argwhere(off <= 0)[0]
        raise NonpositiveDistance(int(i), int(j), float(d[i, j]))

    for i in range(n):
        # via[j, k] = d(i,k) + d(k,j)
        via = d[i][None, :] + d
        bad = d[i][:, None] > via * (1.0 + rtol)
        bad[: i + 1, :] = False
        if bad.any():
            j, k = np.argwhere(bad)[0]
            raise TriangleViolation(i, int(j), int(k), float(d[i, j]), float(d[i, k]), float(d[k, j]))

    return MetricSpace(matrix=d)


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """
    Undirected graph on vertices 0..n-1 with positive edge weights.

    Endpoints are stored canonically with u < v. ``source`` keeps the metric
    a complete graph was generated from, when there is one.
    """

    n: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    source: MetricSpace | None = field(default=None, repr=False)

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.int64).reshape(-1)
        v = np.asarray(self.v, dtype=np.int64).reshape(-1)
        w = np.asarray(self.w, dtype=np.float64).reshape(-1)
        if not (len(u) == len(v) == len(w)):
            raise SpanlabError("Edge arrays must have equal length")
        if len(u):
            bad = (u < 0) | (u >= self.n) | (v < 0) | (v >= self.n)
            if bad.any():
                k = int(np.flatnonzero(bad)[0])
                raise InvalidVertex(int(u[k] if not 0 <= u[k] < self.n else v[k]), self.n)
            if np.any(u == v):
                k = int(np.flatnonzero(u == v)[0])
                raise SpanlabError(f"Self-loop at vertex {u[k]}")
            if not np.all(np.isfinite(w)):
                raise SpanlabError("Edge weights must be finite")
            if np.any(w <= 0):
                k = int(np.flatnonzero(w <= 0)[0])
                raise NonpositiveDistance(int(u[k]), int(v[k]), float(w[k]))
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        object.__setattr__(self, "u", _readonly(lo))
        object.__setattr__(self, "v", _readonly(hi))
        object.__setattr__(self, "w", _readonly(w))

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int, float]],
        source: MetricSpace | None = None,
    ) -> WeightedGraph:
        rows = list(edges)
        if not rows:
            return cls(n, np.empty(0), np.empty(0), np.empty(0), source)
        u, v, w = zip(*rows)
        return cls(n, np.array(u), np.array(v), np.array(w, dtype=np.float64), source)

    @property
    def m(self) -> int:
        return len(self.w)

    @property
    def total_weight(self) -> float:
        return float(self.w.sum())

    def edges(self) -> Iterable[tuple[int, int, float]]:
        for a, b, wt in zip(self.u.tolist(), self.v.tolist(), self.w.tolist()):
            yield a, b, wt

    def sorted_order(self) -> np.ndarray:
        """Edge indices sorted by (weight, u, v)."""
        return np.lexsort((self.v, self.u, self.w))

    def take(self, indices: Sequence[int] | np.ndarray) -> WeightedGraph:
        """Subgraph on the same vertex set keeping the given edges, in that order."""
        idx = np.asarray(indices, dtype=np.int64)
        return WeightedGraph(self.n, self.u[idx], self.v[idx], self.w[idx], self.source)

    @cached_property
    def adjacency(self) -> list[list[tuple[int, float]]]:
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for a, b, wt in self.edges():
            adj[a].append((b, wt))
            adj[b].append((a, wt))
        return adj

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(a, b): k for k, (a, b) in enumerate(zip(self.u.tolist(), self.v.tolist()))}

    def to_csr(self) -> csr_array:
        """Symmetric sparse adjacency matrix for scipy.sparse.csgraph."""
        rows = np.concatenate([self.u, self.v])
        cols = np.concatenate([self.v, self.u])
        data = np.concatenate([self.w, self.w])
        return csr_array((data, (rows, cols)), shape=(self.n, self.n))

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        count, _ = connected_components(self.to_csr(), directed=False)
        return count == 1


@dataclass(frozen=True)
class PathResult:
    """
    Outcome of a single-pair shortest-path query.

    ``distance`` is exact whenever finite. ``above_cutoff`` is set when the
    search stopped at the cutoff without settling the target.
    """

    distance: float
    predecessors: dict[int, int] | None = None
    above_cutoff: bool = False

    @property
    def reachable(self) -> bool:
        return math.isfinite(self.distance)

    def path(self, target: int) -> list[int]:
        """Vertex sequence from the source to ``target``."""
        if not self.reachable or self.predecessors is None or target not in self.predecessors:
            return []
        walk = [target]
        while self.predecessors[walk[-1]] != -1:
            walk.append(self.predecessors[walk[-1]])
        return walk[::-1]


def bounded_dijkstra(
    adjacency: Sequence[Sequence[tuple[int, float]]],
    source: int,
    target: int,
    cutoff: float | None = None,
) -> PathResult:
    """
    Dijkstra from ``source`` that stops at ``target``.

    Labels strictly greater than ``cutoff`` are pruned, so a finite result is
    always the exact distance, and a distance equal to the cutoff is still
    found.

    Args:
        adjacency: Neighbour lists of (vertex, weight).
        source: Start vertex.
        target: Goal vertex.
        cutoff: Optional search radius.

    Returns:
        PathResult with the exact distance, or UNREACHABLE.
    """
    dist: dict[int, float] = {source: 0.0}
    pred: dict[int, int] = {source: -1}
    heap: list[tuple[float, int]] = [(0.0, source)]
    pruned = False

    while heap:
        d, x = heapq.heappop(heap)
        if d > dist[x]:
            continue
        if x == target:
            return PathResult(d, pred)
        for y, wt in adjacency[x]:
            nd = d + wt
            if cutoff is not None and nd > cutoff:
                pruned = True
                continue
            if nd < dist.get(y, math.inf):
                dist[y] = nd
                pred[y] = x
                heapq.heappush(heap, (nd, y))

    return PathResult(UNREACHABLE, pred, above_cutoff=pruned)


def shortest_path(g: WeightedGraph, s: int, t: int, cutoff: float | None = None) -> PathResult:
    """
    Shortest s-t distance in ``g``, optionally bounded by ``cutoff``.

    Raises:
        InvalidVertex: s or t out of range.
    """
    for x in (s, t):
        if not 0 <= x < g.n:
            raise InvalidVertex(x, g.n)
    if cutoff is not None and not cutoff > 0:
        raise SpanlabError(f"cutoff must be positive, got {cutoff!r}")
    return bounded_dijkstra(g.adjacency, s, t, cutoff)


def all_pairs_distances(g: WeightedGraph, indices: Sequence[int] | None = None) -> np.ndarray:
    """All-pairs (or from ``indices``) shortest-path distances; inf when disconnected."""
    return csgraph_shortest_path(g.to_csr(), method="D", directed=False, indices=indices)


def metric_graph(space: MetricSpace) -> WeightedGraph:
    """
    Complete graph over a metric space, edges listed in (u, v) order.

    Raises:
        SinglePoint: Fewer than two points.
    """
    if space.n < 2:
        raise SinglePoint(f"A metric graph needs at least 2 points, got {space.n}")
    u, v = np.triu_indices(space.n, k=1)
    return WeightedGraph(space.n, u, v, space.matrix[u, v], source=space)


def mst_indices(g: WeightedGraph) -> np.ndarray:
    """
    Kruskal MST of ``g`` as edge indices in (weight, u, v) order.

    Raises:
        DisconnectedGraph: ``g`` has no spanning tree.
    """
    forest = DisjointSet(range(g.n))
    picked: list[int] = []
    for k in g.sorted_order().tolist():
        a, b = int(g.u[k]), int(g.v[k])
        if forest.merge(a, b):
            picked.append(k)
            if len(picked) == g.n - 1:
                break
    if len(picked) != max(g.n - 1, 0):
        raise DisconnectedGraph(f"Graph with {g.n} vertices is disconnected")
    return np.array(picked, dtype=np.int64)


def mst(g: WeightedGraph) -> WeightedGraph:
    """Minimum spanning tree with the (weight, u, v) tie-break."""
    return g.take(mst_indices(g))


@dataclass(frozen=True)
class PackingReport:
    count: int
    bound: float
    passed: bool


def _center_distances(space: MetricSpace, subset: np.ndarray, center: int | Sequence[float]) -> np.ndarray:
    if np.isscalar(center):
        c = int(center)
        if not 0 <= c < space.n:
            raise InvalidVertex(c, space.n)
        return space.matrix[subset, c]
    if space.points is None:
        raise SpanlabError("A coordinate center needs a coordinate space")
    coords = np.asarray(center, dtype=np.float64).reshape(1, -1)
    return pairwise_distances(space.points.points[subset], coords, metric=space.metric_name)[:, 0]


def packing_test(
    space: MetricSpace | PointSet,
    center: int | Sequence[float],
    R: float,
    r: float,
    d: int,
    subset: Sequence[int] | None = None,
) -> PackingReport:
    """
    Check ``|X| <= (4R/r)^d`` for a point set X inside a ball of radius R.

    Args:
        space: The ambient space (a PointSet gets the Euclidean metric).
        center: Ball center as a point index or a coordinate vector.
        R: Ball radius.
        r: Separation; every pair in X must be more than r apart.
        d: Dimension used in the bound.
        subset: Indices forming X (default: every point).

    Raises:
        NotInBall: A point of X lies outside the ball.
        PairTooClose: Two points of X are at distance <= r.
    """
    if isinstance(space, PointSet):
        space = MetricSpace.from_points(space)
    if not (R > 0 and r > 0 and d >= 1):
        raise SpanlabError("packing_test needs R > 0, r > 0 and d >= 1")
    idx = np.arange(space.n) if subset is None else np.asarray(subset, dtype=np.int64)

    radial = _center_distances(space, idx, center)
    outside = radial > R * (1.0 + METRIC_RTOL)
    if outside.any():
        k = int(np.flatnonzero(outside)[0])
        raise NotInBall(int(idx[k]), float(radial[k]), R)

    if len(idx) > 1:
        block = space.matrix[np.ix_(idx, idx)]
        iu, ju = np.triu_indices(len(idx), k=1)
        close = block[iu, ju] <= r
        if close.any():
            k = int(np.flatnonzero(close)[0])
            raise PairTooClose(int(idx[iu[k]]), int(idx[ju[k]]), float(block[iu[k], ju[k]]), r)

    bound = (4.0 * R / r) ** d
    return PackingReport(count=len(idx), bound=bound, passed=len(idx) <= bound)


def extract_net(space: MetricSpace, center: int, R: float, r: float) -> list[int]:
    """
    Greedy r-separated subset of the closed R-ball around ``center``.

    Points are scanned by index; a point is kept when it is more than r
    away from every point kept so far.
    """
    inside = np.flatnonzero(space.matrix[center] <= R).tolist()
    kept: list[int] = []
    for x in inside:
        if all(space.matrix[x, y] > r for y in kept):
            kept.append(x)
    return kept
