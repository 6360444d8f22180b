"""
Build engine: greedy spanner of a generated or loaded instance.
"""

import time

from ..exceptions import BadSpec
from ..fileio import SCHEMA_VERSION
from ..generators import GenSpec
from ..greedy import check_eps, greedy_spanner, spanner_metrics, verify_mst_containment
from ..metric import WeightedGraph
from .base import BaseEngine, EngineResult


class BuildEngine(BaseEngine):
    """Runs the greedy construction and measures the result."""

    def __init__(self, source: GenSpec, eps: float, p: float = 2, max_n: int | None = None):
        super().__init__(source, p)
        self.eps = eps
        self.max_n = max_n

    def _guard(self, n: int) -> None:
        # the edge stream is quadratic in n
        if self.max_n is not None and n > self.max_n:
            raise BadSpec(f"n={n} exceeds the build guardrail of {self.max_n}; pass --force")

    def load_instance(self) -> WeightedGraph:
        self._guard(self.source.n)
        base = super().load_instance()
        self._guard(base.n)
        return base

    def execute(self) -> EngineResult:
        eps = check_eps(self.eps)
        started = time.perf_counter()
        spanner = greedy_spanner(self.base, eps)
        build_ms = (time.perf_counter() - started) * 1000.0
        self.log(f"Greedy kept {spanner.m} of {self.base.m} edges in {build_ms:.1f} ms")

        metrics = spanner_metrics(spanner)
        mst = verify_mst_containment(spanner)
        if not mst.passed:
            # Greedy always keeps the MST; anything else is a bug
            self.log(f"MST edges missing from spanner: {list(mst.missing)}", "ERROR")
        self.log(
            f"lightness={metrics.lightness:.6g} sparsity={metrics.sparsity:.6g} "
            f"max_stretch={metrics.max_stretch:.12g}"
        )
        return EngineResult(
            success=mst.passed,
            metrics={
                "schema": SCHEMA_VERSION,
                "instance": self.source.label,
                "metric": self.space.metric_name,
                "eps": eps,
                "build_ms": build_ms,
                **metrics.as_dict(),
            },
            error_message=None if mst.passed else "spanner misses MST edges",
            spanner=spanner,
        )
