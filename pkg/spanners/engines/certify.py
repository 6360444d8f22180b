"""
Certify engine: build (or load) a spanner and run the cluster certifier.
"""

from pathlib import Path
from typing import Any

from ..certifier import CertConfig, certify
from ..certifier.report import ERROR, FALLBACK, WARNING
from ..generators import GenSpec
from ..greedy import Spanner, check_eps, greedy_spanner
from .base import BaseEngine, EngineResult


class CertifyEngine(BaseEngine):
    """
    Certification of one spanner.

    ``options`` are CertConfig fields other than ``eps`` and ``dimension``,
    which come from the spanner and the instance. A prebuilt ``spanner``
    skips both loading and construction.
    """

    def __init__(
        self,
        source: GenSpec,
        eps: float | None,
        spanner_path: Path | str | None = None,
        spanner: Spanner | None = None,
        dump_clusters: bool = False,
        p: float = 2,
        **options: Any,
    ):
        super().__init__(source, p)
        self.eps = eps
        self.spanner_path = spanner_path
        self.dump_clusters = dump_clusters
        self.options = options
        self.spanner = spanner
        if spanner is not None:
            self.base = spanner.base
            self.space = spanner.base.source

    def execute(self) -> EngineResult:
        if self.spanner is not None:
            spanner = self.spanner
        elif self.spanner_path is not None:
            spanner = self.load_spanner(self.spanner_path, self.eps)
        else:
            spanner = greedy_spanner(self.base, check_eps(self.eps))
            self.log(f"Built greedy spanner: {spanner.m} edges, eps={spanner.eps}")

        dimension = self.space.dim if self.space is not None else None
        config = CertConfig(eps=spanner.eps, dimension=dimension, **self.options)
        self.log(f"Certifying at eps_analysis={config.eps_analysis:.6g} (g={config.g:g}, s={config.s:g})")
        report = certify(spanner, config, dump_clusters=self.dump_clusters, log=self.log)

        for anomaly in report.anomalies:
            if anomaly.severity == ERROR or (anomaly.severity == FALLBACK and not config.allow_fallback):
                level = "ERROR"
            elif anomaly.severity in (FALLBACK, WARNING):
                level = "WARNING"
            else:
                level = "INFO"
            self.log(f"{anomaly.kind} (j={anomaly.j}, i={anomaly.level}): {anomaly.message}", level)

        rate = report.pair_rate
        self.log(
            f"min_feasible_c={report.min_feasible_c} B={report.exceptional_count} edges "
            f"canonical pairs={report.pair_successes}/{report.pair_successes + report.pair_failures}"
            + (f" ({rate:.1%})" if rate is not None else "")
        )
        return EngineResult(
            success=True,
            passed=report.passed,
            metrics=report.as_dict(),
            spanner=spanner,
            report=report,
        )
