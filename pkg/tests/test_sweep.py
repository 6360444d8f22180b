"""
Test the sweep command, its cell task and the CSV summary.
"""

import sys
import tempfile
from io import StringIO
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase, override_settings

from experiments.models import CellLog, CellStatus, LogLevel, Sweep, SweepCell, SweepStatus
from experiments.tasks import cell_log_entry, run_sweep_cell
from experiments.utils import CSV_COLUMNS, METRIC_COLUMNS, SUMMARY_COLUMNS, growth_summary, summary_path
from spanners.engines.base import split_log_line
from spanners.engines.build import BuildEngine
from spanners.generators import GenSpec

class SweepCommandTest(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name) / "sweep.csv"

    def tearDown(self):
        self.tmp.cleanup()

    def sweep(self, *args):
        out, err = StringIO(), StringIO()
        call_command("sweep", *args, "--out", str(self.out), "--jobs", "1", stdout=out, stderr=err)
        return out.getvalue()

    def test_collinear_sweep(self):
        """Every cell becomes one CSV row and the summary compares consecutive n."""
        out = self.sweep("--gen", "collinear", "--n", "8,16", "--eps", "0.5")
        self.assertIn("2 rows written", out)

        df = pd.read_csv(self.out)
        self.assertEqual(list(df.columns), CSV_COLUMNS)
        self.assertEqual(df["n"].tolist(), [8, 16])
        self.assertEqual(df["status"].tolist(), [CellStatus.SUCCESS, CellStatus.SUCCESS])
        self.assertTrue(df["certified"].all())
        self.assertEqual(df["min_c"].tolist(), [1.0, 1.0])
        self.assertFalse(df.isna().any().any())
        # a path is its own MST
        self.assertEqual(df["lightness"].tolist(), [1.0, 1.0])

        summary = pd.read_csv(summary_path(self.out))
        self.assertEqual(list(summary.columns), SUMMARY_COLUMNS)
        self.assertEqual(len(summary), 1)
        self.assertEqual(summary.loc[0, "lightness_ratio"], 1.0)

        sweep = Sweep.objects.get()
        self.assertEqual(sweep.status, SweepStatus.DONE)
        self.assertIsNotNone(sweep.finished_at)
        self.assertEqual(sweep.grid["n"], [8, 16])
        self.assertEqual(sweep.cells.filter(status=CellStatus.SUCCESS).count(), 2)
        self.assertTrue(CellLog.objects.filter(cell__sweep=sweep).exists())

    def test_grid_size(self):
        self.sweep(
            "--gen", "grid,collinear", "--n", "9,16", "--eps", "0.5,0.25",
            "--repeats", "2", "--no-certify",
        )
        df = pd.read_csv(self.out)
        self.assertEqual(len(df), 2 * 2 * 2 * 2)
        self.assertEqual(df["seed"].unique().tolist(), [0, 1])

    def test_no_certify(self):
        self.sweep("--gen", "uniform-cube", "--n", "12", "--eps", "0.5", "--seed", "7", "--no-certify")
        df = pd.read_csv(self.out)
        self.assertEqual(len(df), 1)
        self.assertFalse(df.loc[0, "certified"])
        self.assertEqual(df.loc[0, "min_c"], 0.0)
        self.assertEqual(df.loc[0, "seed"], 7)
        self.assertLessEqual(df.loc[0, "max_stretch"], 1.5 * (1 + 1e-9))

        cell = SweepCell.objects.get()
        self.assertNotIn("certification", cell.all_metrics)
        self.assertIn("build_ms", cell.all_metrics)

    @override_settings(SPANLAB={"BUILD_GUARDRAIL_N": 10})
    def test_failed_cells_exit_nonzero(self):
        """A cell above the guardrail fails; the rest are still written."""
        with self.assertRaises(CommandError) as ctx:
            self.sweep("--gen", "collinear", "--n", "8,16", "--eps", "0.5", "--no-certify")
        self.assertEqual(ctx.exception.returncode, 1)

        df = pd.read_csv(self.out)
        # one row per grid cell, failed ones without metrics
        self.assertEqual(df["n"].tolist(), [8, 16])
        self.assertEqual(df["status"].tolist(), [CellStatus.SUCCESS, CellStatus.FAILED])
        self.assertFalse(df.loc[0, METRIC_COLUMNS].isna().any())
        self.assertTrue(df.loc[1, METRIC_COLUMNS].isna().all())
        failed = SweepCell.objects.get(status=CellStatus.FAILED)
        self.assertEqual(failed.n, 16)
        self.assertIn("guardrail", failed.error_message)
        self.assertTrue(failed.logs.filter(level=LogLevel.ERROR).exists())

    def test_usage_errors(self):
        for args in (
            ["--gen", "spiral", "--n", "8", "--eps", "0.5"],
            ["--gen", "grid", "--n", "8", "--eps", "0.5", "--jobs", "0"],
            ["--gen", "grid", "--n", "8", "--eps", "0.5", "--repeats", "0"],
        ):
            with self.subTest(args=args):
                with self.assertRaises(CommandError) as ctx:
                    self.sweep(*args)
                self.assertEqual(ctx.exception.returncode, 64)

class SweepCellTaskTest(TestCase):
    def setUp(self):
        self.sweep = Sweep.objects.create(name="cells", certify=False, output_path="unused.csv")

    def test_missing_cell(self):
        outcome = run_sweep_cell(999999)
        self.assertFalse(outcome["success"])
        self.assertIn("not found", outcome["error"])

    def test_cell_success(self):
        cell = SweepCell.objects.create(sweep=self.sweep, generator="grid", n=9, dim=2, eps=0.5, seed=0)
        outcome = run_sweep_cell(cell.id)
        self.assertTrue(outcome["success"])

        cell.refresh_from_db()
        self.assertEqual(cell.status, CellStatus.SUCCESS)
        self.assertGreaterEqual(cell.lightness, 1.0)
        self.assertEqual(cell.sparsity, cell.all_metrics["m_spanner"] / 9)
        self.assertIsNotNone(cell.finished_at)
        self.assertEqual(cell.logs.order_by("id").first().message, "Started cell")

    def test_force_skips_the_guardrail(self):
        cell = SweepCell.objects.create(sweep=self.sweep, generator="collinear", n=16, dim=2, eps=0.5, seed=0)
        with self.settings(SPANLAB={"BUILD_GUARDRAIL_N": 10}):
            self.assertTrue(run_sweep_cell(cell.id, force=True)["success"])

def test_cell_log_entry():
    assert cell_log_entry("[ERROR] bad") == (LogLevel.ERROR, "bad")
    assert cell_log_entry("[WARNING] two\nlines") == (LogLevel.WARNING, "two\nlines")
    assert cell_log_entry("[INFO] ok") == (LogLevel.INFO, "ok")
    assert cell_log_entry("[DEBUG] noisy") == (LogLevel.INFO, "[DEBUG] noisy")
    assert cell_log_entry("[INFO]glued") == (LogLevel.INFO, "[INFO]glued")
    assert cell_log_entry("plain") == (LogLevel.INFO, "plain")

def test_engine_log_lines_split_back():
    engine = BuildEngine(GenSpec("collinear", n=8), 0.5)
    engine.log("Spanner is disconnected", "ERROR")
    engine.log("[bracketed] text")
    assert [split_log_line(line) for line in engine.logs] == [
        ("ERROR", "Spanner is disconnected"),
        ("INFO", "[bracketed] text"),
    ]
    assert split_log_line("no level") == (None, "no level")

def test_growth_summary_averages_seeds():
    df = pd.DataFrame(
        {
            "generator": ["grid"] * 4,
            "dim": [2] * 4,
            "eps": [0.5] * 4,
            "n": [16, 16, 32, 32],
            "seed": [0, 1, 0, 1],
            "lightness": [1.0, 3.0, 3.0, 5.0],
            "sparsity": [1.0, 1.0, 2.0, 2.0],
        }
    )
    summary = growth_summary(df)
    assert len(summary) == 1
    row = summary.iloc[0]
    assert row["lightness_from"] == 2.0
    assert row["lightness_to"] == 4.0
    assert row["lightness_ratio"] == 2.0
    assert row["sparsity_ratio"] == 2.0

def test_growth_summary_empty():
    assert list(growth_summary(pd.DataFrame()).columns) == SUMMARY_COLUMNS

def test_growth_summary_skips_unfinished_cells():
    df = pd.DataFrame(
        {
            "generator": ["grid"] * 3,
            "dim": [2] * 3,
            "eps": [0.5] * 3,
            "n": [16, 32, 32],
            "seed": [0, 0, 1],
            "lightness": [2.0, 3.0, None],
            "sparsity": [1.0, 1.5, None],
            "status": [CellStatus.SUCCESS, CellStatus.SUCCESS, CellStatus.FAILED],
        }
    )
    row = growth_summary(df).iloc[0]
    assert row["lightness_ratio"] == 1.5
    assert row["sparsity_ratio"] == 1.5
    assert growth_summary(df[df["status"] == CellStatus.FAILED]).empty
