"""
Credit accounting over a built cluster hierarchy.

Everything structural (canonical pairs, who pays for which edge, the
exceptional set B) is decided once per hierarchy by ``plan_level``. The
ledger is then replayed for a candidate credit constant c by
``replay_stream``; feasibility is monotone in c, so ``search_min_c``
bisects on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..exceptions import CanonicalPairNotFound, InsufficientCredit
from ..partition import CREDIT_RTOL, CreditLedger, SubdividedSpanner, allocate_credits, mst_account
from .clusters import Cluster, Provenance, owner_map
from .config import CertConfig
from .phases import LevelBuild, PathPiece

SELF = "self"
SPARE = "spare"
SIBLING = "sibling"
EXCEPTIONAL = "B"
NONE = "none"
FALLBACK = "fallback"


def cluster_account(level: int, cid: int) -> tuple[str, int, int]:
    return ("cluster", level, cid)


@dataclass(frozen=True)
class CanonicalPair:
    """A credit-sufficient subset of a cluster's eps-clusters plus a spare one."""

    cluster: int
    subset: tuple[int, ...]
    spare: int
    case: str
    walk: tuple[int, ...]

    @property
    def reserved(self) -> set[int]:
        return set(self.subset) | {self.spare}


def cluster_walk(cluster: Cluster, owner_prev: np.ndarray) -> tuple[int, ...]:
    """Eps-clusters met along the diameter path, consecutive repeats collapsed."""
    walk: list[int] = []
    for v in cluster.diameter_path:
        x = int(owner_prev[v])
        if not walk or walk[-1] != x:
            walk.append(x)
    return tuple(walk)


def canonical_pair(
    cluster: Cluster,
    build: LevelBuild,
    owner_prev: np.ndarray,
    config: CertConfig,
    w0: float,
    connector_owners: dict[int, tuple[int, int]],
) -> CanonicalPair:
    """
    Find the canonical pair of a Phase-1 or Phase-2 cluster.

    The subset is the diameter walk truncated to floor(2g/eps) eps-clusters.
    The spare cluster is an off-walk neighbour of the branching cluster
    (Phase 1), a member of an affix disjoint from the walk (Phase 2 on
    separate spans), or a member of the shared stretch between the edge
    endpoints (Phase 2 on overlapping spans).

    Raises:
        CanonicalPairNotFound: A side condition fails or the subset cannot
            carry the cluster's DC1 credit.
    """
    walk = cluster_walk(cluster, owner_prev)
    if len(set(walk)) != len(walk):
        raise CanonicalPairNotFound(cluster.id, "diameter walk revisits an eps-cluster")
    on_walk = set(walk)
    members = set(cluster.members)

    if cluster.origin == Provenance.PHASE1:
        hub = cluster.notes["branching"]
        off = sorted(x for x in build.tree.neighbors(hub) if x in members and x not in on_walk)
        if not off:
            raise CanonicalPairNotFound(cluster.id, "every neighbour of the branching cluster is on the walk")
        spare, case = off[0], "branching"
    elif cluster.origin == Provenance.PHASE2 and cluster.notes.get("case") == "c":
        off = sorted(x for x in cluster.notes["Pxy"] if x not in on_walk)
        if not off:
            raise CanonicalPairNotFound(cluster.id, "the stretch between the edge endpoints lies on the walk")
        spare, case = off[0], "shared"
    elif cluster.origin == Provenance.PHASE2:
        for name in ("P1", "P2", "Q1", "Q2"):
            part = cluster.notes[name]
            if not on_walk.intersection(part):
                spare, case = min(part), "distinct"
                break
        else:
            raise CanonicalPairNotFound(cluster.id, "every affix meets the walk")
    else:
        raise CanonicalPairNotFound(cluster.id, f"{cluster.origin} clusters have no canonical pair")

    subset = walk[: config.truncation]
    chosen = set(subset)
    floor = sum(build.eps_clusters[x].dc1_floor(build.ell * config.eps_analysis) for x in subset)
    floor += w0 * sum(1 for e in cluster.connectors if set(connector_owners[e]) <= chosen)
    if floor < cluster.dc1_floor(build.ell) * (1.0 - CREDIT_RTOL):
        raise CanonicalPairNotFound(
            cluster.id,
            f"subset credit {floor:.6g}c is below the DC1 requirement {cluster.dc1_floor(build.ell):.6g}c",
        )
    return CanonicalPair(cluster=cluster.id, subset=tuple(subset), spare=spare, case=case, walk=walk)


@dataclass(frozen=True)
class Duty:
    """Who pays for level-i edges at one eps-cluster."""

    kind: str
    payer: int | None = None
    share: float = 1.0


@dataclass
class LevelPlan:
    """Structural payment plan for one level."""

    level: int
    ell: float
    pairs: dict[int, CanonicalPair] = field(default_factory=dict)
    failures: dict[int, str] = field(default_factory=dict)
    duties: dict[int, Duty] = field(default_factory=dict)
    assignment: dict[int, Duty] = field(default_factory=dict)
    unpaid_pairs: list[int] = field(default_factory=list)
    fallback: bool = False
    exceptional: list[int] = field(default_factory=list)


def _long_duty(piece: PathPiece, x: int, config: CertConfig) -> Duty:
    path = list(piece.members)
    head = path[: config.truncation]
    spare = path[config.truncation] if len(path) > config.truncation else path[-1]
    if x in head or x == spare:
        return Duty(SPARE, spare)
    return Duty(SELF, x, 1.0)


def assign_duties(build: LevelBuild, pairs: dict[int, CanonicalPair], config: CertConfig) -> dict[int, Duty]:
    """Responsibility of every eps-cluster for its incident level-i edges."""
    piece_of: dict[int, PathPiece] = {x: piece for piece in build.pieces for x in piece.members}
    duties: dict[int, Duty] = {}
    for x, cid in build.member_of.items():
        cluster = build.clusters[cid]
        piece = piece_of.get(x)
        if cluster.origin == Provenance.RESIDUAL:
            duties[x] = Duty(FALLBACK)
        elif piece is not None and piece.long:
            duties[x] = _long_duty(piece, x, config)
        elif piece is not None and piece.affix and piece.own:
            if build.exception:
                duties[x] = Duty(EXCEPTIONAL)
                continue
            if piece.sibling is None:
                duties[x] = Duty(SELF, x, 1.0)
                continue
            sibling = build.pieces[piece.sibling]
            pair = pairs.get(sibling.target)
            if pair is not None and set(sibling.members) & set(pair.walk):
                duties[x] = Duty(SPARE, pair.spare)
            else:
                duties[x] = Duty(SIBLING, sibling.index, 0.5)
        elif piece is not None and piece.own:
            duties[x] = Duty(NONE)
        elif cluster.origin in (Provenance.PHASE1, Provenance.PHASE2):
            pair = pairs.get(cid)
            if pair is None:
                duties[x] = Duty(FALLBACK)
            elif x in pair.reserved:
                duties[x] = Duty(SPARE, pair.spare)
            else:
                duties[x] = Duty(SELF, x, 0.5)
        else:
            duties[x] = Duty(SELF, x, 0.5)
    return duties


PAYER_RANK = {SELF: 0, SPARE: 0, SIBLING: 0, EXCEPTIONAL: 1, FALLBACK: 2}


def choose_payer(duties: list[Duty]) -> Duty | None:
    """The first paying endpoint duty, else B, else fallback; None if no endpoint may pay."""
    ranked = [d for d in duties if d.kind in PAYER_RANK]
    if not ranked:
        return None
    return min(ranked, key=lambda d: PAYER_RANK[d.kind])


def plan_level(build: LevelBuild, sp: SubdividedSpanner, config: CertConfig) -> LevelPlan:
    """Canonical pairs, duties and the payer of every level-i edge."""
    plan = LevelPlan(level=build.level, ell=build.ell)
    owner_prev = owner_map(build.eps_clusters.values(), sp.graph.n)
    connector_owners = {
        e: (int(owner_prev[sp.graph.u[e]]), int(owner_prev[sp.graph.v[e]]))
        for cluster in build.clusters.values()
        for e in cluster.connectors
    }

    for cid, cluster in sorted(build.clusters.items()):
        if cluster.origin not in (Provenance.PHASE1, Provenance.PHASE2):
            continue
        try:
            plan.pairs[cid] = canonical_pair(cluster, build, owner_prev, config, sp.w0, connector_owners)
        except CanonicalPairNotFound as e:
            plan.failures[cid] = e.reason

    plan.duties = assign_duties(build, plan.pairs, config)
    for e in build.edges:
        ends = (int(owner_prev[sp.graph.u[e]]), int(owner_prev[sp.graph.v[e]]))
        duty = choose_payer([plan.duties[x] for x in ends])
        if duty is None:
            plan.unpaid_pairs.append(e)
            duty = Duty(FALLBACK)
        plan.assignment[e] = duty

    plan.fallback = bool(plan.failures or plan.unpaid_pairs)
    if plan.fallback:
        plan.assignment = {
            e: (d if d.kind == EXCEPTIONAL else Duty(FALLBACK)) for e, d in plan.assignment.items()
        }
    plan.exceptional = [e for e, d in plan.assignment.items() if d.kind == EXCEPTIONAL]
    return plan


@dataclass(frozen=True)
class ExceptionCheck:
    """Size of B at one level against 4 g Delta / eps edges of weight <= l."""

    level: int
    active: bool
    count: int
    weight: float
    count_bound: float
    weight_bound: float

    @property
    def passed(self) -> bool:
        tol = CREDIT_RTOL * max(self.weight_bound, 1.0)
        return self.count <= self.count_bound and self.weight <= self.weight_bound + tol


def exception_handler(build: LevelBuild, plan: LevelPlan, degree: int, config: CertConfig, weights: np.ndarray) -> ExceptionCheck:
    """
    Account for the exceptional edges of a level.

    Active when the level has no Phase-1/2 cluster, so the cluster tree was
    a path and short affix pieces have nobody to bill.
    """
    bound = 4.0 * config.g * max(degree, 1) / config.eps_analysis
    return ExceptionCheck(
        level=build.level,
        active=build.exception,
        count=len(plan.exceptional),
        weight=float(weights[plan.exceptional].sum()) if plan.exceptional else 0.0,
        count_bound=bound,
        weight_bound=bound * build.ell,
    )


@dataclass
class LevelLedger:
    level: int
    paid_weight: float = 0.0
    fallback_weight: float = 0.0
    exceptional_weight: float = 0.0
    dc1_ok: bool = True
    dc1_failures: list[int] = field(default_factory=list)


@dataclass
class StreamLedger:
    c: float
    feasible: bool
    reason: str = ""
    levels: list[LevelLedger] = field(default_factory=list)
    conserved: bool = True
    negative: list[Any] = field(default_factory=list)


class _Budgets:
    """Per-level spending caps: half of each eps-cluster's credit for itself, half for pools."""

    def __init__(self, ledger: CreditLedger, level: int, ids: list[int]):
        self.ledger = ledger
        self.prev = level - 1
        self.own = {x: 0.5 * ledger.balance(cluster_account(self.prev, x)) for x in ids}
        self.pool = dict(self.own)

    def draw(self, x: int, amount: float, edge: int, sources: tuple[str, ...]) -> float:
        taken = 0.0
        for name in sources:
            budget = self.own if name == "own" else self.pool
            step = min(budget[x], amount - taken)
            if step > 0:
                self.ledger.pay(cluster_account(self.prev, x), edge, step)
                budget[x] -= step
                taken += step
            if taken >= amount * (1.0 - CREDIT_RTOL):
                break
        return taken


def check_dc1_and_pay(
    build: LevelBuild,
    plan: LevelPlan,
    ledger: CreditLedger,
    sp: SubdividedSpanner,
    pieces: list[PathPiece],
) -> LevelLedger:
    """
    Pay every level-i edge and move the rest of the credit into the new clusters.

    Order: per-claim payments from eps-cluster budgets, then retention of
    all member and connector credit into each level-i cluster with a DC1
    check, then fallback payments from surplus above the DC1 requirement.

    Raises:
        InsufficientCredit: A payer or the fallback pool runs dry.
    """
    c = ledger.c
    weights = sp.graph.w
    out = LevelLedger(level=build.level)
    budgets = _Budgets(ledger, build.level, sorted(build.eps_clusters))
    deferred: list[int] = []

    for e in build.edges:
        duty = plan.assignment[e]
        amount = float(weights[e])
        if duty.kind == EXCEPTIONAL:
            out.exceptional_weight += amount
            continue
        if duty.kind == FALLBACK:
            deferred.append(e)
            continue
        if duty.kind == SIBLING:
            taken = 0.0
            for x in sorted(pieces[duty.payer].members):
                taken += budgets.draw(x, amount - taken, e, ("pool",))
                if taken >= amount * (1.0 - CREDIT_RTOL):
                    break
            payer = ("sibling-pool", build.level, duty.payer)
        else:
            sources = ("own",) if duty.kind == SELF and duty.share < 1.0 else ("own", "pool")
            taken = budgets.draw(duty.payer, amount, e, sources)
            payer = cluster_account(build.level - 1, duty.payer)
        if taken < amount * (1.0 - CREDIT_RTOL):
            raise InsufficientCredit(payer, amount, taken)
        out.paid_weight += amount

    for cid, cluster in sorted(build.clusters.items()):
        account = cluster_account(build.level, cid)
        for x in cluster.members:
            ledger.transfer(cluster_account(build.level - 1, x), account)
        for e in cluster.connectors:
            ledger.transfer(mst_account(sp, e), account)
        need = c * cluster.dc1_floor(build.ell)
        if ledger.balance(account) < need * (1.0 - CREDIT_RTOL):
            out.dc1_ok = False
            out.dc1_failures.append(cid)

    for e in deferred:
        amount = float(weights[e])
        left = amount
        for cid, cluster in sorted(build.clusters.items()):
            account = cluster_account(build.level, cid)
            surplus = ledger.balance(account) - c * cluster.dc1_floor(build.ell)
            step = min(max(surplus, 0.0), left)
            if step > 0:
                ledger.pay(account, e, step)
                left -= step
            if left <= amount * CREDIT_RTOL:
                break
        if left > amount * CREDIT_RTOL:
            raise InsufficientCredit(("fallback", build.level), amount, amount - left)
        out.paid_weight += amount
        out.fallback_weight += amount

    return out


@dataclass
class StreamBuild:
    """A built hierarchy for one stream j: base clusters, levels and their plans."""

    j: int
    ell0: float
    base: list[Cluster]
    levels: list[LevelBuild] = field(default_factory=list)
    plans: list[LevelPlan] = field(default_factory=list)


def replay_stream(stream: StreamBuild, sp: SubdividedSpanner, c: float) -> StreamLedger:
    """Run the ledger for credit constant ``c``; infeasibility is reported, not raised."""
    ledger = allocate_credits(sp, c)
    out = StreamLedger(c=c, feasible=True)

    base = LevelLedger(level=0)
    for cluster in stream.base:
        account = cluster_account(0, cluster.id)
        for e in cluster.credit_edges:
            ledger.transfer(mst_account(sp, e), account)
        if ledger.balance(account) < c * cluster.dc1_floor(stream.ell0) * (1.0 - CREDIT_RTOL):
            base.dc1_ok = False
            base.dc1_failures.append(cluster.id)
    out.levels.append(base)

    try:
        for build, plan in zip(stream.levels, stream.plans):
            out.levels.append(check_dc1_and_pay(build, plan, ledger, sp, build.pieces))
    except InsufficientCredit as e:
        out.feasible = False
        out.reason = str(e)

    if out.feasible and not all(level.dc1_ok for level in out.levels):
        out.feasible = False
        failed = next(level for level in out.levels if not level.dc1_ok)
        out.reason = f"DC1 fails at level {failed.level} for clusters {failed.dc1_failures}"
    out.conserved = ledger.is_conserved()
    out.negative = ledger.negative_accounts()
    return out


def round_up(value: float, digits: int) -> float:
    """Round ``value`` up to ``digits`` significant digits."""
    if value <= 0:
        return value
    exponent = math.floor(math.log10(value)) - digits + 1
    scale = 10.0**exponent
    return math.ceil(value / scale - 1e-9) * scale


def search_min_c(stream: StreamBuild, sp: SubdividedSpanner, config: CertConfig) -> float | None:
    """
    Least credit constant (to ``config.c_digits`` significant digits) for
    which the stream's ledger clears, or None if even ``c_high`` fails.
    """
    lo, hi = config.c_low, config.c_high
    if replay_stream(stream, sp, lo).feasible:
        return lo
    if not replay_stream(stream, sp, hi).feasible:
        return None
    while hi / lo - 1.0 >= 10.0**-config.c_digits:
        mid = math.sqrt(lo * hi) if hi / lo > 4.0 else 0.5 * (lo + hi)
        if replay_stream(stream, sp, mid).feasible:
            hi = mid
        else:
            lo = mid
    return round_up(hi, config.c_digits)
