from django.utils import timezone

from spanners.app_settings import cert_options, spanlab_setting
from spanners.engines.base import split_log_line
from spanners.engines.build import BuildEngine
from spanners.engines.certify import CertifyEngine
from spanners.generators import GenSpec

from .models import CellLog, CellStatus, LogLevel, SweepCell


def add_cell_log(cell: SweepCell, message: str, level: str = LogLevel.INFO) -> None:
    """Helper to add a log entry to a sweep cell."""
    CellLog.objects.create(cell=cell, level=level, message=message)


def cell_log_entry(line: str) -> tuple[LogLevel, str]:
    """Map an engine log line onto a CellLog level; unknown levels keep the raw line as INFO."""
    level, message = split_log_line(line)
    if level in LogLevel.values:
        return LogLevel(level), message
    return LogLevel.INFO, line


def _save_logs(cell: SweepCell, logs: list[str]) -> None:
    CellLog.objects.bulk_create(
        CellLog(cell=cell, level=level, message=message)
        for level, message in map(cell_log_entry, logs)
    )


def _fail(cell: SweepCell, message: str) -> dict:
    cell.status = CellStatus.FAILED
    cell.error_message = message
    cell.finished_at = timezone.now()
    cell.save(update_fields=["status", "error_message", "finished_at"])
    add_cell_log(cell, message, LogLevel.ERROR)
    return {"success": False, "cell_id": cell.id, "error": message}


def run_sweep_cell(cell_id: int, force: bool = False) -> dict:
    """
    Build (and certify) one sweep cell.

    This is the task queued by Django-Q2 for parallel sweeps, and called
    directly for ``--jobs 1``.

    Args:
        cell_id: ID of the SweepCell to run.
        force: Skip the build guardrail on n.

    Returns:
        Dict with the cell's result summary.
    """
    try:
        cell = SweepCell.objects.select_related("sweep").get(id=cell_id)
    except SweepCell.DoesNotExist:
        return {"success": False, "error": f"Cell {cell_id} not found"}

    cell.status = CellStatus.PROCESSING
    cell.save(update_fields=["status"])
    add_cell_log(cell, "Started cell", LogLevel.INFO)

    try:
        source = GenSpec(cell.generator, n=cell.n, dim=cell.dim, seed=cell.seed)
        guardrail = None if force else int(spanlab_setting("BUILD_GUARDRAIL_N"))
        built = BuildEngine(source, cell.eps, max_n=guardrail).run()
        _save_logs(cell, built.logs)
        if not built.success:
            return _fail(cell, f"Build failed: {built.error_message}")

        metrics = dict(built.metrics)
        certified, min_c = False, 0.0
        if cell.sweep.certify:
            checked = CertifyEngine(
                source,
                cell.eps,
                spanner=built.spanner,
                **cert_options(allow_fallback=cell.sweep.allow_fallback),
            ).run()
            _save_logs(cell, checked.logs)
            if not checked.success:
                return _fail(cell, f"Certification failed: {checked.error_message}")
            report = checked.report
            certified = report.passed
            min_c = report.min_feasible_c or 0.0
            metrics["certification"] = {
                "passed": report.passed,
                "min_feasible_c": report.min_feasible_c,
                "B": {"count": report.exceptional_count, "weight": report.exceptional_weight},
                "canonical_pair_rate": report.pair_rate,
                "anomalies": len(report.anomalies),
            }

        cell.status = CellStatus.SUCCESS
        cell.lightness = metrics["lightness"]
        cell.sparsity = metrics["sparsity"]
        cell.max_stretch = metrics["max_stretch"]
        cell.build_ms = metrics["build_ms"]
        cell.certified = certified
        cell.min_c = min_c
        cell.all_metrics = metrics
        cell.finished_at = timezone.now()
        cell.save()
        add_cell_log(
            cell,
            f"Cell completed. lightness={cell.lightness:.6g} certified={certified} min_c={min_c}",
            LogLevel.INFO,
        )
        return {
            "success": True,
            "cell_id": cell.id,
            "lightness": cell.lightness,
            "certified": certified,
            "min_c": min_c,
        }

    except Exception as e:
        return _fail(cell, f"Unexpected error: {e}")
