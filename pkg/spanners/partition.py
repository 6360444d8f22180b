"""
MST subdivision, credit allocation and weight-class partition of spanner edges.

Edge classes relative to w0 = w(MST) / (n - 1):

- ``L_S``: w <= w0
- ``J_0``: w0 < w <= 2 w0 / eps
- ``Pi[i][j]``: 2^j / eps^i * w0 < w <= 2^(j+1) / eps^i * w0, for i >= 1 and
  0 <= j < ceil(log2(1/eps))
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable

import numpy as np

from .exceptions import (
    CreditOverflowAssertion,
    EpsOutOfRange,
    InsufficientCredit,
    SingleVertex,
    SpanlabError,
)
from .greedy import Spanner, SpannerMetrics, check_eps
from .metric import WeightedGraph, mst_indices

PIECE_GUARD = 1e-12
CREDIT_RTOL = 1e-9

LIGHT = -1
LOW = 0


@dataclass(frozen=True, eq=False)
class MstSummary:
    mst: WeightedGraph
    total_weight: float
    w0: float

    @property
    def n(self) -> int:
        return self.mst.n


def mst_summary(g: WeightedGraph) -> MstSummary:
    """
    MST of ``g`` and its average edge weight w0.

    Raises:
        SingleVertex: n < 2.
        DisconnectedGraph: g is not connected.
    """
    if g.n < 2:
        raise SingleVertex(f"An MST summary needs at least 2 vertices, got {g.n}")
    tree = g.take(mst_indices(g))
    total = tree.total_weight
    return MstSummary(mst=tree, total_weight=total, w0=total / (g.n - 1))


def piece_count(weight: float, w0: float) -> int:
    """ceil(weight / w0), guarded so exact multiples are not over-split."""
    return max(1, math.ceil(weight / w0 * (1.0 - PIECE_GUARD)))


@dataclass(frozen=True, eq=False)
class SubdividedSpanner:
    """
    S' : the spanner with every MST edge heavier than w0 cut into equal pieces.

    Vertices ``n_original..`` are virtual. ``origin[e]`` is the index of the
    MST edge (in ``summary.mst``) that S' edge e comes from, or -1 for
    spanner edges outside the MST. ``spanner_edge[e]`` maps the other way
    for non-MST edges.
    """

    graph: WeightedGraph
    n_original: int
    is_mst: np.ndarray
    origin: np.ndarray
    spanner_edge: np.ndarray
    summary: MstSummary = field(repr=False)

    @property
    def virtual(self) -> np.ndarray:
        flags = np.zeros(self.graph.n, dtype=bool)
        flags[self.n_original :] = True
        return flags

    @property
    def n_virtual(self) -> int:
        return self.graph.n - self.n_original

    @property
    def w0(self) -> float:
        return self.summary.w0

    @property
    def mst_weight(self) -> float:
        return self.summary.total_weight

    @property
    def origin_map(self) -> dict[int, tuple[int, int]]:
        tree = self.summary.mst
        return {
            e: (int(tree.u[k]), int(tree.v[k]))
            for e, k in enumerate(self.origin.tolist())
            if k >= 0
        }

    @cached_property
    def from_spanner(self) -> dict[int, int]:
        """Spanner edge index -> S' edge index, for edges outside the MST."""
        return {k: e for e, k in enumerate(self.spanner_edge.tolist()) if k >= 0}

    def mst_pieces(self) -> np.ndarray:
        """Indices of MST pieces in (weight, u, v) order."""
        order = self.graph.sorted_order()
        return order[self.is_mst[order]]


def subdivide(s: Spanner, summary: MstSummary) -> SubdividedSpanner:
    """
    Subdivide the MST edges of ``s`` into pieces of weight at most w0.

    Virtual vertices are numbered n, n+1, ... following the (weight, u, v)
    order of the MST edges they split, walking from the smaller endpoint.

    Raises:
        SpanlabError: ``s`` does not contain the MST in ``summary``.
    """
    n = s.n
    spanner_graph = s.graph
    index = spanner_graph.edge_index
    tree = summary.mst

    in_tree = np.zeros(spanner_graph.m, dtype=bool)
    for a, b, _ in tree.edges():
        k = index.get((a, b))
        if k is None:
            raise SpanlabError(f"Spanner is missing MST edge ({a}, {b})")
        in_tree[k] = True

    us: list[int] = []
    vs: list[int] = []
    ws: list[float] = []
    origin: list[int] = []
    back: list[int] = []
    next_virtual = n

    for t in tree.sorted_order().tolist():
        a, b, wt = int(tree.u[t]), int(tree.v[t]), float(tree.w[t])
        pieces = piece_count(wt, summary.w0)
        chain = [a, *range(next_virtual, next_virtual + pieces - 1), b]
        next_virtual += pieces - 1
        for x, y in zip(chain, chain[1:]):
            us.append(x)
            vs.append(y)
            ws.append(wt / pieces)
            origin.append(t)
            back.append(-1)

    for k in np.flatnonzero(~in_tree).tolist():
        us.append(int(spanner_graph.u[k]))
        vs.append(int(spanner_graph.v[k]))
        ws.append(float(spanner_graph.w[k]))
        origin.append(-1)
        back.append(k)

    graph = WeightedGraph(next_virtual, np.array(us), np.array(vs), np.array(ws))
    origin_arr = np.array(origin, dtype=np.int64)
    return SubdividedSpanner(
        graph=graph,
        n_original=n,
        is_mst=origin_arr >= 0,
        origin=origin_arr,
        spanner_edge=np.array(back, dtype=np.int64),
        summary=summary,
    )


@dataclass(frozen=True)
class Payment:
    payer: Hashable
    edge: int
    amount: float


class CreditLedger:
    """
    Credit balances keyed by account.

    MST-piece accounts are ``("mst", a, b)`` with a < b. Cluster accounts
    are opened by the certifier as ``("cluster", level, id)``. Balances
    never go negative; every move is either a transfer between accounts or
    a payment for a spanner edge.
    """

    def __init__(self, c: float):
        self.c = c
        self.balances: dict[Hashable, float] = defaultdict(float)
        self.payments: list[Payment] = []
        self.initial_total = 0.0

    def deposit(self, account: Hashable, amount: float) -> None:
        self.balances[account] += amount
        self.initial_total += amount

    def balance(self, account: Hashable) -> float:
        return self.balances.get(account, 0.0)

    def _debit(self, account: Hashable, amount: float) -> float:
        available = self.balance(account)
        if amount > available * (1.0 + CREDIT_RTOL) + CREDIT_RTOL:
            raise InsufficientCredit(account, amount, available)
        taken = min(amount, available)
        self.balances[account] = available - taken
        return taken

    def transfer(self, source: Hashable, target: Hashable, amount: float | None = None) -> float:
        """Move ``amount`` (default: everything) from source to target."""
        if amount is None:
            amount = self.balance(source)
        if amount <= 0:
            return 0.0
        taken = self._debit(source, amount)
        self.balances[target] += taken
        return taken

    def pay(self, payer: Hashable, edge: int, amount: float) -> None:
        taken = self._debit(payer, amount)
        self.payments.append(Payment(payer, edge, taken))

    @property
    def paid_total(self) -> float:
        return sum(p.amount for p in self.payments)

    @property
    def total(self) -> float:
        return sum(self.balances.values())

    def negative_accounts(self) -> list[Hashable]:
        return [k for k, v in self.balances.items() if v < 0]

    def is_conserved(self) -> bool:
        """Initial credit == held credit + payments."""
        return math.isclose(
            self.initial_total, self.total + self.paid_total, rel_tol=CREDIT_RTOL, abs_tol=CREDIT_RTOL
        )


def mst_account(sp: SubdividedSpanner, e: int) -> tuple[str, int, int]:
    return ("mst", int(sp.graph.u[e]), int(sp.graph.v[e]))


def allocate_credits(sp: SubdividedSpanner, c: float) -> CreditLedger:
    """
    Give every MST piece of S' exactly c * w0 credits.

    Raises:
        CreditOverflowAssertion: The total exceeds 2 c w(MST).
    """
    if not c > 0:
        raise SpanlabError(f"Credit constant must be positive, got {c!r}")
    ledger = CreditLedger(c)
    for e in np.flatnonzero(sp.is_mst).tolist():
        ledger.deposit(mst_account(sp, e), c * sp.w0)
    limit = 2.0 * c * sp.mst_weight
    if ledger.initial_total > limit * (1.0 + CREDIT_RTOL):
        raise CreditOverflowAssertion(
            f"Initial credit {ledger.initial_total:.6g} exceeds 2*c*w(MST) = {limit:.6g}"
        )
    return ledger


def stream_count(eps: float) -> int:
    """I_eps = ceil(log2(1/eps))."""
    return max(1, math.ceil(math.log2(1.0 / eps)))


def level_count(n: int) -> int:
    """I_n = ceil(log2 n)."""
    return max(1, math.ceil(math.log2(n)))


def level_bounds(i: int, j: int, w0: float, eps: float) -> tuple[float, float]:
    """Half-open weight bracket (low, high] of Pi[i][j]."""
    scale = w0 / eps**i
    return 2.0**j * scale, 2.0 ** (j + 1) * scale


def _locate(weight: float, w0: float, eps: float, i_eps: int) -> tuple[int, int]:
    i = 1
    while True:
        for j in range(i_eps):
            low, high = level_bounds(i, j, w0, eps)
            if low < weight <= high:
                return i, j
        if weight <= level_bounds(i + 1, 0, w0, eps)[0]:
            # rounding seam between the top of level i and the bottom of i+1
            return i, i_eps - 1
        i += 1


def partition_grid(weights: np.ndarray, w0: float, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Level and stream index of every weight.

    Returns:
        (levels, streams): level -1 marks L_S and level 0 marks J_0 (stream
        -1 for both). Heavier edges get the smallest level i whose bracket
        holds them, then the smallest j.
    """
    eps = check_eps(eps)
    i_eps = stream_count(eps)
    levels = np.full(len(weights), LIGHT, dtype=np.int64)
    streams = np.full(len(weights), -1, dtype=np.int64)
    for k, wt in enumerate(np.asarray(weights, dtype=np.float64).tolist()):
        if wt <= w0:
            continue
        if wt <= 2.0 * w0 / eps:
            levels[k] = LOW
            continue
        levels[k], streams[k] = _locate(wt, w0, eps, i_eps)
    return levels, streams


@dataclass(frozen=True, eq=False)
class LevelPartition:
    """
    Classification of spanner edges for one stream j.

    Edge ids index ``graph``. Edges belonging to other streams are only
    counted, in ``other_streams``.
    """

    graph: WeightedGraph
    j: int
    eps: float
    w0: float
    light: np.ndarray
    low: np.ndarray
    levels: dict[int, np.ndarray]
    other_streams: int
    i_eps: int
    i_n: int

    def ell(self, i: int) -> float:
        """l_i = 2^(j+1) / eps^i * w0."""
        return 2.0 ** (self.j + 1) / self.eps**i * self.w0

    def weight(self, ids: np.ndarray) -> float:
        return float(self.graph.w[ids].sum()) if len(ids) else 0.0

    @property
    def light_weight(self) -> float:
        return self.weight(self.light)

    @property
    def low_weight(self) -> float:
        return self.weight(self.low)

    def as_dict(self) -> dict[str, Any]:
        return {
            "j": self.j,
            "eps": self.eps,
            "w0": self.w0,
            "L_S": {"count": len(self.light), "weight": self.light_weight},
            "J_0": {"count": len(self.low), "weight": self.low_weight},
            "levels": [
                {
                    "i": i,
                    "j": self.j,
                    "count": len(ids),
                    "weight": self.weight(ids),
                    "ell": self.ell(i),
                }
                for i, ids in sorted(self.levels.items())
            ],
            "other_streams": self.other_streams,
        }


def classify_edges(graph: WeightedGraph | Spanner, summary: MstSummary, eps: float, j: int) -> LevelPartition:
    """
    Split spanner edges into L_S, J_0 and the Pi[i][j] sets of stream j.

    Raises:
        InvalidEps: eps outside (0, 1).
        EpsOutOfRange: j outside [0, I_eps).
    """
    eps = check_eps(eps)
    if isinstance(graph, Spanner):
        graph = graph.graph
    i_eps = stream_count(eps)
    if not 0 <= j < i_eps:
        raise EpsOutOfRange(f"Stream index j={j} outside [0, {i_eps}) for eps={eps}")
    levels, streams = partition_grid(graph.w, summary.w0, eps)
    mine = streams == j
    per_level = {
        int(i): np.flatnonzero(mine & (levels == i)) for i in np.unique(levels[mine]).tolist()
    }
    return LevelPartition(
        graph=graph,
        j=j,
        eps=eps,
        w0=summary.w0,
        light=np.flatnonzero(levels == LIGHT),
        low=np.flatnonzero(levels == LOW),
        levels=per_level,
        other_streams=int(np.count_nonzero((levels > LOW) & ~mine)),
        i_eps=i_eps,
        i_n=level_count(graph.n),
    )


@dataclass(frozen=True)
class WeightBoundReport:
    delta: float
    light_weight: float
    light_bound: float
    low_weight: float
    low_bound: float

    @property
    def light_slack(self) -> float:
        return self.light_bound - self.light_weight

    @property
    def low_slack(self) -> float:
        return self.low_bound - self.low_weight

    @property
    def passed(self) -> bool:
        tol = CREDIT_RTOL * max(self.light_bound, self.low_bound, 1.0)
        return self.light_slack >= -tol and self.low_slack >= -tol

    def as_dict(self) -> dict[str, Any]:
        return {
            "delta": self.delta,
            "L_S": {"weight": self.light_weight, "bound": self.light_bound, "slack": self.light_slack},
            "J_0": {"weight": self.low_weight, "bound": self.low_bound, "slack": self.low_slack},
            "passed": self.passed,
        }


def check_weight_bounds(
    partition: LevelPartition, metrics: SpannerMetrics, delta: float | None = None
) -> WeightBoundReport:
    """
    w(L_S) <= 2 delta w(MST) and w(J_0) <= (4 delta / eps) w(MST), with
    delta the measured sparsity unless given.
    """
    delta = metrics.sparsity if delta is None else delta
    return WeightBoundReport(
        delta=delta,
        light_weight=partition.light_weight,
        light_bound=2.0 * delta * metrics.mst_weight,
        low_weight=partition.low_weight,
        low_bound=4.0 * delta / partition.eps * metrics.mst_weight,
    )
