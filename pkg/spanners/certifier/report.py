"""
Certification report and the structural DC2 check.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Any

from .clusters import Cluster, Provenance
from .config import CertConfig

ERROR = "error"
FALLBACK = "fallback"
WARNING = "warning"
INFO = "info"


@dataclass(frozen=True)
class Anomaly:
    kind: str
    severity: str
    message: str
    j: int | None = None
    level: int | None = None
    detail: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "severity": self.severity,
            "j": self.j,
            "i": self.level,
            "message": self.message,
            "detail": self.detail,
        }


@dataclass
class DC2Report:
    max_ratio: float = 0.0
    violations: list[dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def check_dc2(clusters: Iterable[Cluster], ell: float, g: float) -> DC2Report:
    """
    Diameter bounds for one level's clusters.

    Every cluster stays within g*ell. Phase-4 clusters also stay within
    4*ell and within twice their effective diameter. Base clusters land in
    [ell, 4*ell] unless flagged undersized.
    """
    report = DC2Report()
    for cluster in clusters:
        d = cluster.diameter
        if not math.isfinite(d):
            report.violations.append({"cluster": cluster.id, "kind": "disconnected"})
            continue
        report.max_ratio = max(report.max_ratio, d / ell)
        if d > g * ell * (1 + 1e-9):
            report.violations.append({"cluster": cluster.id, "kind": "diameter", "value": d, "bound": g * ell})
        if cluster.origin == Provenance.PHASE4:
            if d > 4.0 * ell * (1 + 1e-9):
                report.violations.append({"cluster": cluster.id, "kind": "phase4", "value": d, "bound": 4.0 * ell})
            effective = cluster.notes.get("ediam")
            if effective is not None and d > 2.0 * effective * (1 + 1e-9):
                report.violations.append(
                    {"cluster": cluster.id, "kind": "effective", "value": d, "bound": 2.0 * effective}
                )
        if cluster.origin == Provenance.BASE and not cluster.undersized:
            if not ell * (1 - 1e-9) <= d <= 4.0 * ell * (1 + 1e-9):
                report.violations.append({"cluster": cluster.id, "kind": "base", "value": d, "bound": 4.0 * ell})
    return report


@dataclass
class LevelReport:
    j: int
    level: int
    ell: float
    clusters: int = 0
    max_diam_ratio: float = 0.0
    k_degree: int = 0
    k_simple: bool = True
    # None until the ledger reaches this level
    dc1_ok: bool | None = None
    paid_weight: float = 0.0
    fallback_weight: float = 0.0
    exceptional_count: int = 0
    exceptional_weight: float = 0.0
    exception: bool = False
    fallback: bool = False
    phases: dict[str, int] = field(default_factory=dict)
    skipped: str | None = None

    @property
    def checked(self) -> bool:
        return self.dc1_ok is not None

    def as_dict(self) -> dict[str, Any]:
        if self.skipped:
            return {"j": self.j, "i": self.level, "ell": self.ell, "skipped": self.skipped}
        return {
            "j": self.j,
            "i": self.level,
            "ell": self.ell,
            "clusters": self.clusters,
            "max_diam_ratio": self.max_diam_ratio,
            "k_degree": self.k_degree,
            "k_simple": self.k_simple,
            "checked": self.checked,
            "dc1_ok": self.dc1_ok,
            "paid_weight": self.paid_weight,
            "fallback_weight": self.fallback_weight,
            "B": {"count": self.exceptional_count, "weight": self.exceptional_weight},
            "exception": self.exception,
            "fallback": self.fallback,
            "phases": self.phases,
        }


@dataclass
class CertReport:
    config: CertConfig
    schema: int = 1
    per_level: list[LevelReport] = field(default_factory=list)
    exceptional_count: int = 0
    exceptional_weight: float = 0.0
    min_feasible_c: float | None = None
    anomalies: list[Anomaly] = field(default_factory=list)
    pair_successes: int = 0
    pair_failures: int = 0
    clusters: list[dict[str, Any]] | None = None

    def add(self, kind: str, severity: str, message: str, **where: Any) -> None:
        detail = where.pop("detail", {})
        self.anomalies.append(Anomaly(kind, severity, message, detail=detail, **where))

    @property
    def pair_rate(self) -> float | None:
        total = self.pair_successes + self.pair_failures
        return self.pair_successes / total if total else None

    @property
    def passed(self) -> bool:
        blocking = {ERROR} if self.config.allow_fallback else {ERROR, FALLBACK}
        if any(a.severity in blocking for a in self.anomalies):
            return False
        return self.min_feasible_c is not None

    def as_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "schema": self.schema,
            "config": self.config.as_dict(),
            "per_level": [level.as_dict() for level in self.per_level],
            "B": {"count": self.exceptional_count, "weight": self.exceptional_weight},
            "min_feasible_c": self.min_feasible_c,
            "anomalies": [a.as_dict() for a in self.anomalies],
            "canonical_pairs": {
                "successes": self.pair_successes,
                "failures": self.pair_failures,
                "rate": self.pair_rate,
            },
            "passed": self.passed,
        }
        if self.clusters is not None:
            data["clusters"] = self.clusters
        return data
