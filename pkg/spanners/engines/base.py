"""
Base engine interface.

Build, verify and certify each load an instance, compute, and report. The
engine collects log lines as it goes and never raises: failures come back
as an EngineResult with ``success=False``.
"""

import re
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..exceptions import BadInputFile, BadSpec, EpsOutOfRange, InvalidEps, SpanlabError
from ..fileio import read_instance, read_spanner, spanner_from_file
from ..generators import GenKind, GenSpec, generate
from ..greedy import Spanner
from ..metric import MetricSpace, WeightedGraph, metric_graph

# Bad flags or unreadable inputs, as opposed to a failed check
USAGE_ERRORS = (BadSpec, BadInputFile, InvalidEps, EpsOutOfRange)

LOG_LINE = re.compile(r"\[(?P<level>[A-Z]+)\] (?P<message>.*)", re.DOTALL)


def split_log_line(line: str) -> tuple[str | None, str]:
    """(level, message) of a line written by ``BaseEngine.log``; level is None for foreign lines."""
    match = LOG_LINE.fullmatch(line)
    if match is None:
        return None, line
    return match["level"], match["message"]


@dataclass
class EngineResult:
    """Result of an engine run."""

    success: bool
    # Did every check hold (verify and certify); always True for build
    passed: bool = True
    metrics: dict[str, Any] | None = None
    error_message: str | None = None
    usage_error: bool = False
    logs: list[str] = field(default_factory=list)
    spanner: Spanner | None = None
    report: Any = None


class BaseEngine(ABC):
    """
    Abstract base class for all engines.

    Subclasses implement ``execute()``, which may raise SpanlabError.
    """

    def __init__(self, source: GenSpec, p: float = 2):
        """
        Args:
            source: Instance to load: a generator spec, or ``explicit-file``
                with a point or matrix file.
            p: Lp norm for coordinate instances.
        """
        self.source = source
        self.p = p
        self.logs: list[str] = []
        self.space: MetricSpace | None = None
        self.base: WeightedGraph | None = None

    def log(self, message: str, level: str = "INFO") -> None:
        """Add a log message."""
        self.logs.append(f"[{level}] {message}")

    def load_instance(self) -> WeightedGraph:
        """Load the metric space and its complete graph, unless already given."""
        if self.base is not None:
            return self.base
        if self.source.kind == GenKind.EXPLICIT_FILE:
            self.space = read_instance(self.source.path, p=self.p)
        else:
            self.space = MetricSpace.from_points(generate(self.source), p=self.p)
        self.base = metric_graph(self.space)
        self.log(f"Loaded {self.source.label}: n={self.space.n}, {self.base.m} metric edges")
        return self.base

    def load_spanner(self, path: Path | str, eps: float | None = None) -> Spanner:
        """Read a spanner file and match it to the loaded instance."""
        spanner = spanner_from_file(self.base, read_spanner(path), eps)
        self.log(f"Loaded spanner {path}: {spanner.m} edges, eps={spanner.eps}")
        return spanner

    @abstractmethod
    def execute(self) -> EngineResult:
        """
        Do the engine's work on the loaded instance.

        Returns:
            EngineResult with metrics.
        """
        pass

    def run(self) -> EngineResult:
        """
        Main entry point: load, compute and report.

        Returns:
            EngineResult with metrics and logs.
        """
        self.logs = []

        try:
            self.load_instance()
            result = self.execute()
            result.logs = self.logs + result.logs
            return result
        except SpanlabError as e:
            self.log(f"{type(e).__name__}: {e}", "ERROR")
            return EngineResult(
                success=False,
                passed=False,
                error_message=str(e),
                usage_error=isinstance(e, USAGE_ERRORS),
                logs=self.logs,
            )
        except Exception as e:
            self.log(f"Unexpected error: {e}", "ERROR")
            return EngineResult(success=False, passed=False, error_message=str(e), logs=self.logs)
