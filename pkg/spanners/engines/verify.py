"""
Verify engine: re-check a spanner file against its instance.
"""

from pathlib import Path

from ..fileio import SCHEMA_VERSION
from ..generators import GenSpec
from ..greedy import STRETCH_RTOL, spanner_metrics, verify_mst_containment
from ..partition import check_weight_bounds, classify_edges, mst_summary
from .base import BaseEngine, EngineResult


class VerifyEngine(BaseEngine):
    """
    Exact all-pairs stretch, MST containment and the light/low weight
    bounds of a stored spanner.
    """

    def __init__(self, source: GenSpec, spanner_path: Path | str, eps: float | None = None, p: float = 2):
        super().__init__(source, p)
        self.spanner_path = spanner_path
        self.eps = eps

    def execute(self) -> EngineResult:
        spanner = self.load_spanner(self.spanner_path, self.eps)
        metrics = spanner_metrics(spanner)
        mst = verify_mst_containment(spanner)
        bounds = None
        if spanner.graph.is_connected():
            bounds = check_weight_bounds(
                classify_edges(spanner, mst_summary(spanner.graph), spanner.eps, 0), metrics
            )
        else:
            self.log("Spanner is disconnected; light/low weight bounds skipped", "ERROR")

        stretch_ok = metrics.max_stretch <= (1.0 + spanner.eps) * (1.0 + STRETCH_RTOL)
        if stretch_ok:
            self.log(f"max_stretch={metrics.max_stretch:.12g} <= 1+eps={1 + spanner.eps:g}")
        else:
            u, v = metrics.worst_pair
            self.log(
                f"Stretch {metrics.max_stretch:.12g} exceeds 1+eps={1 + spanner.eps:g} at pair ({u}, {v})",
                "ERROR",
            )
        if not mst.contained:
            self.log(f"MST edges missing from spanner: {list(mst.missing)}", "ERROR")
        elif not mst.passed:
            self.log(f"w(MST(S))={mst.spanner_weight!r} differs from w(MST(G))={mst.base_weight!r}", "ERROR")
        if bounds is not None and not bounds.passed:
            self.log(f"Light/low weight bounds fail: {bounds.as_dict()}", "WARNING")

        return EngineResult(
            success=True,
            passed=stretch_ok and mst.passed,
            metrics={
                "schema": SCHEMA_VERSION,
                "instance": self.source.label,
                "eps": spanner.eps,
                **metrics.as_dict(),
                "worst_pair": list(metrics.worst_pair) if metrics.worst_pair else None,
                "mst_contained": mst.contained,
                "mst_missing": [list(e) for e in mst.missing],
                "weight_bounds": bounds.as_dict() if bounds is not None else None,
            },
            spanner=spanner,
        )
