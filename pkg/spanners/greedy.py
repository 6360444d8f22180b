"""
Greedy (1+eps)-spanner construction and verification.

Edges are scanned in (weight, u, v) order and kept iff
``(1 + eps) * w(xy) < d_S(x, y)`` on the spanner built so far. The spanner
distance is found with a Dijkstra bounded at ``(1 + eps) * w(xy)``: any
distance it returns rejects the edge, and a search that runs past the
cutoff accepts it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np

from .exceptions import DisconnectedGraph, InvalidEps, SingleVertex
from .metric import WeightedGraph, all_pairs_distances, bounded_dijkstra, mst_indices

STRETCH_RTOL = 1e-9


def check_eps(eps: float) -> float:
    """Return eps as a float, raising InvalidEps unless 0 < eps < 1."""
    try:
        value = float(eps)
    except (TypeError, ValueError):
        raise InvalidEps(eps) from None
    if not 0.0 < value < 1.0:
        raise InvalidEps(eps)
    return value


@dataclass(frozen=True)
class InsertionStep:
    """One accepted edge and the search that justified it."""

    edge: int
    cutoff: float
    # True if the bounded search pruned labels, False if the endpoints were disconnected
    above_cutoff: bool


@dataclass(frozen=True, eq=False)
class Spanner:
    """
    A subgraph of ``base`` given by edge indices, in insertion order.
    """

    base: WeightedGraph
    edge_ids: np.ndarray
    eps: float
    trace: tuple[InsertionStep, ...] = field(default=(), repr=False)

    @cached_property
    def graph(self) -> WeightedGraph:
        return self.base.take(self.edge_ids)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def m(self) -> int:
        return len(self.edge_ids)

    @property
    def weight(self) -> float:
        return float(self.base.w[self.edge_ids].sum())

    def mask(self) -> np.ndarray:
        keep = np.zeros(self.base.m, dtype=bool)
        keep[self.edge_ids] = True
        return keep


def greedy_spanner(g: WeightedGraph, eps: float) -> Spanner:
    """
    Build the greedy (1+eps)-spanner of ``g``.

    Args:
        g: Connected input graph (usually a metric graph).
        eps: Stretch parameter in (0, 1).

    Returns:
        Spanner with the accepted edges and their insertion trace.

    Raises:
        InvalidEps: eps outside (0, 1).
        DisconnectedGraph: g is not connected.
    """
    eps = check_eps(eps)
    if not g.is_connected():
        raise DisconnectedGraph(f"Cannot span a disconnected graph on {g.n} vertices")

    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(g.n)]
    accepted: list[int] = []
    trace: list[InsertionStep] = []

    for k in g.sorted_order().tolist():
        x, y, wt = int(g.u[k]), int(g.v[k]), float(g.w[k])
        cutoff = (1.0 + eps) * wt
        found = bounded_dijkstra(adjacency, x, y, cutoff)
        if found.reachable:
            continue
        adjacency[x].append((y, wt))
        adjacency[y].append((x, wt))
        accepted.append(k)
        trace.append(InsertionStep(edge=k, cutoff=cutoff, above_cutoff=found.above_cutoff))

    return Spanner(base=g, edge_ids=np.array(accepted, dtype=np.int64), eps=eps, trace=tuple(trace))


@dataclass(frozen=True)
class StretchReport:
    max_stretch: float
    worst_pair: tuple[int, int] | None


def base_distances(s: Spanner) -> np.ndarray:
    """d_G for every pair, from the metric when the base carries one."""
    if s.base.source is not None:
        return np.asarray(s.base.source.matrix)
    return all_pairs_distances(s.base)


def verify_stretch(s: Spanner) -> StretchReport:
    """
    Exact all-pairs stretch of ``s`` against its base graph.

    Ties go to the first pair in row-major order. Pairs the spanner fails to
    connect have infinite stretch.
    """
    if s.n < 2:
        return StretchReport(max_stretch=1.0, worst_pair=None)
    d_s = all_pairs_distances(s.graph)
    d_g = base_distances(s)
    iu, ju = np.triu_indices(s.n, k=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = d_s[iu, ju] / d_g[iu, ju]
    ratio = np.where(np.isnan(ratio), math.inf, ratio)
    k = int(np.argmax(ratio))
    return StretchReport(max_stretch=float(ratio[k]), worst_pair=(int(iu[k]), int(ju[k])))


@dataclass(frozen=True)
class MstCheck:
    contained: bool
    missing: tuple[tuple[int, int], ...]
    base_weight: float
    spanner_weight: float

    @property
    def passed(self) -> bool:
        return self.contained and math.isclose(self.base_weight, self.spanner_weight, rel_tol=STRETCH_RTOL)


def verify_mst_containment(s: Spanner) -> MstCheck:
    """MST(G) must lie inside the spanner and MST(S) must weigh the same."""
    base_tree = mst_indices(s.base)
    kept = s.mask()
    missing = tuple(
        (int(s.base.u[k]), int(s.base.v[k])) for k in base_tree.tolist() if not kept[k]
    )
    # a disconnected spanner has no spanning tree
    spanner_weight = float(s.graph.w[mst_indices(s.graph)].sum()) if s.graph.is_connected() else math.inf
    return MstCheck(
        contained=not missing,
        missing=missing,
        base_weight=float(s.base.w[base_tree].sum()),
        spanner_weight=spanner_weight,
    )


@dataclass(frozen=True)
class SpannerMetrics:
    lightness: float
    sparsity: float
    max_stretch: float
    mst_weight: float
    n: int
    m_spanner: int
    worst_pair: tuple[int, int] | None = None

    def as_dict(self) -> dict[str, Any]:
        return {
            "lightness": self.lightness,
            "sparsity": self.sparsity,
            "max_stretch": self.max_stretch,
            "mst_weight": self.mst_weight,
            "n": self.n,
            "m_spanner": self.m_spanner,
        }


def spanner_metrics(s: Spanner) -> SpannerMetrics:
    """
    Lightness, sparsity and stretch of ``s``.

    Raises:
        SingleVertex: Lightness is undefined for n < 2.
    """
    if s.n < 2:
        raise SingleVertex(f"Spanner metrics need at least 2 vertices, got {s.n}")
    mst_weight = float(s.base.w[mst_indices(s.base)].sum())
    stretch = verify_stretch(s)
    return SpannerMetrics(
        lightness=s.weight / mst_weight,
        sparsity=s.m / s.n,
        max_stretch=stretch.max_stretch,
        mst_weight=mst_weight,
        n=s.n,
        m_spanner=s.m,
        worst_pair=stretch.worst_pair,
    )
