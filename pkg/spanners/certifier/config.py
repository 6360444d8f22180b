"""Certifier parameters."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any

from ..exceptions import EpsOutOfRange
from ..greedy import check_eps


@dataclass(frozen=True)
class CertConfig:
    """
    Parameters of one certification run.

    ``eps`` is the stretch parameter the spanner was built with. The
    hierarchy is analysed at ``eps_analysis = eps / s``.

    Args:
        eps: Greedy stretch parameter.
        g: Diameter constant of the DC2 invariant.
        s: Stretch coupling; must satisfy s >= 12g + 4 and s >= 8g + 1.
        j: Single stream to certify, or None for every stream.
        c: Fixed credit constant, or None to search for the least feasible one.
        c_low, c_high, c_digits: Search range and precision.
        allow_fallback: Accept levels paid through the per-level fallback pool.
        dimension: Ambient dimension for the cluster-graph degree bound.
    """

    eps: float
    g: float = 33.0
    s: float = 400.0
    j: int | None = None
    c: float | None = None
    c_low: float = 1.0
    c_high: float = 2.0**40
    c_digits: int = 3
    allow_fallback: bool = False
    dimension: int | None = None

    def __post_init__(self):
        check_eps(self.eps)
        if self.s < 12 * self.g + 4 or self.s < 8 * self.g + 1:
            raise EpsOutOfRange(f"s={self.s} must be at least 12g+4 and 8g+1 for g={self.g}")
        ea = self.eps_analysis
        if not (ea <= 0.25 and ea < 1.0 / self.g and ea < 1.0 / (2.0 * self.g)):
            raise EpsOutOfRange(f"eps_analysis={ea:g} must be <= 1/4 and < 1/(2g) = {1.0 / (2.0 * self.g):g}")
        if self.c is not None and not self.c > 0:
            raise EpsOutOfRange(f"credit constant must be positive, got {self.c!r}")
        if not 0 < self.c_low < self.c_high:
            raise EpsOutOfRange(f"bad credit search range [{self.c_low}, {self.c_high}]")

    @property
    def eps_analysis(self) -> float:
        return self.eps / self.s

    @property
    def truncation(self) -> int:
        """Size cap floor(2g / eps) on a credit-carrying subset."""
        return math.floor(2.0 * self.g / self.eps_analysis)

    @property
    def long_threshold(self) -> float:
        """Member count from which a Phase-4 cluster is long."""
        return 2.0 * self.g / self.eps_analysis + 1.0

    def as_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["eps_analysis"] = self.eps_analysis
        return data
