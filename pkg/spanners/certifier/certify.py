"""
Certification driver.

For every stream j: classify the spanner edges at eps_analysis, cluster
MST(S') at level 0, build levels 1.. up to the last one holding a
non-MST edge of the stream, run the structural checks, then search the
least credit constant for which the ledger clears.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable

from ..greedy import Spanner
from ..partition import MstSummary, classify_edges, mst_summary, stream_count, subdivide
from .accounting import StreamBuild, exception_handler, plan_level, replay_stream, search_min_c
from .clusters import Cluster, Provenance, base_clusters
from .config import CertConfig
from .phases import build_level
from .report import ERROR, FALLBACK, INFO, WARNING, CertReport, LevelReport, check_dc2
from .tree import CenterDistances, build_cluster_graph, check_center_separation, packing_degree_bound

Log = Callable[[str, str], None]


def _quiet(message: str, level: str = "INFO") -> None:
    pass


def certify(
    spanner: Spanner,
    config: CertConfig,
    summary: MstSummary | None = None,
    dump_clusters: bool = False,
    log: Log = _quiet,
) -> CertReport:
    """
    Certify a spanner.

    Args:
        spanner: Spanner to certify (MST(G) must be inside it).
        config: Certifier parameters.
        summary: MST summary of the spanner, computed if omitted.
        dump_clusters: Attach every cluster with its vertex list to the report.
        log: ``log(message, level)`` sink.

    Returns:
        CertReport; failures are recorded as anomalies, never raised.
    """
    summary = summary or mst_summary(spanner.graph)
    sp = subdivide(spanner, summary)
    eps = config.eps_analysis
    g = config.g
    report = CertReport(config=config)
    if dump_clusters:
        report.clusters = []

    dimension = config.dimension or spanner.base.source and spanner.base.source.dim
    distance = CenterDistances(spanner.base)
    degree_bound = packing_degree_bound(eps, dimension) if dimension else None
    w = sp.graph.w
    key = lambda e: (w[e], sp.graph.u[e], sp.graph.v[e])  # noqa: E731

    log(
        f"S' has {sp.graph.n} vertices ({sp.n_virtual} virtual), w0={sp.w0:.6g}, eps_analysis={eps:.6g}",
        "INFO",
    )
    if spanner.n <= 3:
        report.add("degenerate", INFO, f"n={spanner.n}: base clustering only")

    streams = [config.j] if config.j is not None else list(range(stream_count(eps)))
    worst_degree = 0
    per_stream_c: list[float | None] = []

    for j in streams:
        partition = classify_edges(spanner.graph, summary, eps, j)
        ids = itertools.count()
        ell0 = 2.0 ** (j + 1) * sp.w0
        base = base_clusters(sp, ell0, ids)
        stream = StreamBuild(j=j, ell0=ell0, base=base)
        reports = [_base_report(report, j, ell0, base, g)]
        if len(base) == 1 and base[0].undersized:
            report.add("undersized", INFO, "MST diameter is below l0; one undersized base cluster", j=j, level=0)

        level_edges = {
            i: sorted((sp.from_spanner[k] for k in ids_ if k in sp.from_spanner), key=key)
            for i, ids_ in partition.levels.items()
        }
        last = max((i for i, es in level_edges.items() if es), default=0) if spanner.n > 3 else 0

        previous: list[Cluster] = base
        for i in range(1, last + 1):
            ell = partition.ell(i)
            edges = level_edges.get(i, [])
            by_id = {c.id: c for c in previous}
            kg = build_cluster_graph(previous, sp.graph, edges)
            separation = check_center_separation(kg, by_id, ell, eps, distance)
            build = build_level(sp, previous, edges, i, ell, config, ids)
            plan = plan_level(build, sp, config)
            exc = exception_handler(build, plan, kg.max_degree, config, w)
            dc2 = check_dc2(build.clusters.values(), ell, g)
            where = {"j": j, "level": i}

            if not kg.simple:
                report.add(
                    "k_not_simple",
                    ERROR,
                    f"{len(kg.self_loops)} self-loops, {len(kg.parallel)} parallel edges",
                    detail={"self_loops": kg.self_loops, "parallel": kg.parallel},
                    **where,
                )
            busy_virtual = [x for x in kg.graph.nodes if by_id[x].is_virtual and kg.graph.degree(x)]
            if busy_virtual:
                report.add("virtual_not_isolated", ERROR, f"virtual clusters {busy_virtual} have level edges", **where)
            if not separation.passed:
                report.add(
                    "center_separation",
                    ERROR,
                    f"{len(separation.too_close)} close pairs, {len(separation.too_far)} far neighbours",
                    detail={"too_close": separation.too_close, "too_far": separation.too_far},
                    **where,
                )
            if degree_bound is not None and kg.max_degree > degree_bound:
                report.add("degree_bound", ERROR, f"degree {kg.max_degree} > {degree_bound:.6g}", **where)
            if not dc2.passed:
                report.add("dc2", ERROR, f"{len(dc2.violations)} diameter violations", detail={"violations": dc2.violations}, **where)
            for cid, reason in sorted(plan.failures.items()):
                report.add(
                    "canonical_pair",
                    FALLBACK,
                    f"cluster {cid}: {reason}",
                    detail={"cluster": build.clusters[cid].as_dict(with_vertices=True)},
                    **where,
                )
            if plan.unpaid_pairs:
                report.add(
                    "internally_short_pair",
                    ERROR,
                    f"{len(plan.unpaid_pairs)} level edges join two internally short clusters",
                    detail={"edges": plan.unpaid_pairs},
                    **where,
                )
            if plan.fallback:
                log(f"j={j} i={i}: level paid from the fallback pool", "WARNING")
            for component in build.orphans:
                report.add("orphan_component", ERROR, f"low component {component} has no connector", **where)
            for component in build.irregular:
                report.add("irregular_component", WARNING, f"long component {component} is not a path", **where)
            if not exc.passed:
                report.add(
                    "exceptional_bound",
                    ERROR,
                    f"B holds {exc.count} edges of weight {exc.weight:.6g} "
                    f"(bounds {exc.count_bound:.6g}, {exc.weight_bound:.6g})",
                    **where,
                )

            report.pair_successes += len(plan.pairs)
            report.pair_failures += len(plan.failures)
            report.exceptional_count += exc.count
            report.exceptional_weight += exc.weight
            worst_degree = max(worst_degree, kg.max_degree)
            stream.levels.append(build)
            stream.plans.append(plan)
            reports.append(
                LevelReport(
                    j=j,
                    level=i,
                    ell=ell,
                    clusters=len(build.clusters),
                    max_diam_ratio=dc2.max_ratio,
                    k_degree=kg.max_degree,
                    k_simple=kg.simple,
                    exceptional_count=exc.count,
                    exceptional_weight=exc.weight,
                    exception=build.exception,
                    fallback=plan.fallback,
                    phases=build.phase_counts(),
                )
            )
            log(f"j={j} i={i}: {len(build.clusters)} clusters, {len(edges)} edges, degree {kg.max_degree}", "INFO")
            if dump_clusters:
                report.clusters.extend({"j": j, **c.as_dict(with_vertices=True)} for c in build.clusters.values())
            previous = list(build.clusters.values())

        if last + 1 < partition.i_n:
            reports.append(
                LevelReport(j=j, level=last + 1, ell=partition.ell(last + 1), skipped="no edges at or above this level")
            )

        if config.c is not None:
            c_j = config.c if replay_stream(stream, sp, config.c).feasible else None
        else:
            c_j = search_min_c(stream, sp, config)
        ledger = replay_stream(stream, sp, c_j if c_j is not None else config.c or config.c_high)
        for entry, outcome in zip((r for r in reports if not r.skipped), ledger.levels):
            entry.dc1_ok = outcome.dc1_ok
            entry.paid_weight = outcome.paid_weight
            entry.fallback_weight = outcome.fallback_weight
        unchecked = [r.level for r in reports if not r.skipped and not r.checked]
        if c_j is None:
            report.add(
                "infeasible_credit",
                ERROR,
                ledger.reason or "ledger does not clear",
                detail={"unchecked_levels": unchecked},
                j=j,
            )
        if not ledger.conserved:
            report.add("conservation", ERROR, "ledger credit is not conserved", j=j)
        if ledger.negative:
            report.add("negative_balance", ERROR, f"negative accounts {ledger.negative}", j=j)
        report.per_level.extend(reports)
        per_stream_c.append(c_j)
        log(f"j={j}: {len(stream.levels)} levels, min c = {c_j}", "INFO")
        if dump_clusters:
            report.clusters.extend({"j": j, **c.as_dict(with_vertices=True)} for c in base)

    report.min_feasible_c = None if any(c is None for c in per_stream_c) else max(per_stream_c, default=config.c_low)

    total_bound = 4.0 * g * max(worst_degree, 1) / eps * sp.mst_weight / (1.0 - eps)
    if report.exceptional_weight > total_bound:
        report.add(
            "exceptional_total",
            ERROR,
            f"w(B) = {report.exceptional_weight:.6g} exceeds {total_bound:.6g}",
        )
    return report


def _base_report(report: CertReport, j: int, ell0: float, base: list[Cluster], g: float) -> LevelReport:
    dc2 = check_dc2(base, ell0, g)
    if not dc2.passed:
        report.add("dc2", ERROR, f"{len(dc2.violations)} base diameter violations", detail={"violations": dc2.violations}, j=j, level=0)
    return LevelReport(
        j=j,
        level=0,
        ell=ell0,
        clusters=len(base),
        max_diam_ratio=dc2.max_ratio,
        phases={str(Provenance.BASE): len(base)},
    )
