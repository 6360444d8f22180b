"""
Run a (generator x n x dim x eps x seed) grid of build + certify cells.

    manage.py sweep --gen uniform-cube --n 256,512,1024,2048 --eps 0.5 \
        --repeats 5 --jobs 4 --out results/lightness.csv

CSV columns: generator, n, dim, eps, seed, lightness, sparsity,
max_stretch, build_ms, certified, min_c, status. One row per grid cell;
cells that did not succeed leave the metric fields empty. Rows are
sorted by (generator, dim, eps, n, seed); plot lightness against n with
gnuplot ``using 2:6``. A second file, OUT.summary.csv, holds the
seed-averaged lightness ratio between consecutive n per (generator, dim,
eps). The CSV is rewritten after every cell and on interrupt.
"""

import itertools
import time

from django.core.management.base import CommandError
from django.utils import timezone
from django_q.cluster import Cluster
from django_q.conf import Conf
from django_q.tasks import async_task, count_group

from experiments.models import CellStatus, Sweep, SweepCell, SweepStatus
from experiments.tasks import run_sweep_cell
from experiments.utils import growth_summary, summary_path, sweep_frame, write_sweep_csv
from spanners.generators import GenKind
from spanners.management.commands._options import EXIT_USAGE, EXIT_VERIFY, SpanlabCommand, default_seed

POLL_SECONDS = 0.5
FINISHED = [CellStatus.SUCCESS, CellStatus.FAILED]


def _list(cast):
    def parse(text: str) -> list:
        return [cast(item) for item in text.split(",") if item.strip()]

    return parse


class Command(SpanlabCommand):
    help = (
        "Sweep a generator x n x dim x eps grid and write a CSV with columns "
        "generator,n,dim,eps,seed,lightness,sparsity,max_stretch,build_ms,certified,min_c,status "
        "plus OUT.summary.csv with lightness growth ratios between consecutive n."
    )

    def add_arguments(self, parser):
        parser.add_argument("--gen", type=_list(str), required=True, help="Comma-separated generators")
        parser.add_argument("--n", type=_list(int), required=True, help="Comma-separated point counts")
        parser.add_argument("--dim", type=_list(int), default=[2], help="Comma-separated dimensions (default: 2)")
        parser.add_argument("--eps", type=_list(float), required=True, help="Comma-separated eps values")
        parser.add_argument("--seed", type=int, help="First seed (default: $SPANLAB_SEED, else 0)")
        parser.add_argument("--repeats", type=int, default=1, help="Seeds per cell: seed, seed+1, ...")
        parser.add_argument("--jobs", type=int, default=1, help="Parallel workers (django-q2 cluster when > 1)")
        parser.add_argument("--out", required=True, help="Output CSV")
        parser.add_argument("--name", default="", help="Sweep name stored in the database")
        parser.add_argument("--no-certify", action="store_true", help="Skip certification (certified=False, min_c=0)")
        parser.add_argument("--allow-fallback", action="store_true", help="Count fallback-paid levels as certified")
        parser.add_argument("--force", action="store_true", help="Allow n above the build guardrail")

    def handle(self, *args, **options):
        generators = options["gen"]
        unknown = set(generators) - {k.value for k in GenKind if k != GenKind.EXPLICIT_FILE}
        if unknown:
            raise CommandError(f"unknown generators: {', '.join(sorted(unknown))}", returncode=EXIT_USAGE)
        if options["jobs"] < 1 or options["repeats"] < 1:
            raise CommandError("--jobs and --repeats must be positive", returncode=EXIT_USAGE)

        first = default_seed(options)
        seeds = list(range(first, first + options["repeats"]))
        grid = {
            "gen": generators,
            "n": options["n"],
            "dim": options["dim"],
            "eps": options["eps"],
            "seeds": seeds,
        }
        sweep = Sweep.objects.create(
            name=options["name"],
            grid=grid,
            certify=not options["no_certify"],
            allow_fallback=options["allow_fallback"],
            output_path=options["out"],
        )
        SweepCell.objects.bulk_create(
            SweepCell(sweep=sweep, generator=g, n=n, dim=d, eps=e, seed=s)
            for g, n, d, e, s in itertools.product(generators, options["n"], options["dim"], options["eps"], seeds)
        )
        ids = list(sweep.cells.values_list("id", flat=True))
        self.stdout.write(f"Sweep #{sweep.id}: {len(ids)} cells, {options['jobs']} job(s)")

        sweep.status = SweepStatus.RUNNING
        sweep.save(update_fields=["status"])
        try:
            if options["jobs"] == 1:
                for k, cell_id in enumerate(ids, 1):
                    outcome = run_sweep_cell(cell_id, options["force"])
                    write_sweep_csv(sweep)
                    self._progress(k, len(ids), cell_id, outcome)
            else:
                self._run_pool(sweep, ids, options["jobs"], options["force"])
            sweep.status = SweepStatus.DONE
        except KeyboardInterrupt:
            sweep.status = SweepStatus.INTERRUPTED
            self.stderr.write(self.style.WARNING("Interrupted; writing partial results"))
        finally:
            rows = write_sweep_csv(sweep)
            sweep.finished_at = timezone.now()
            sweep.save(update_fields=["status", "finished_at"])

        self._print_summary(sweep)
        failed = sweep.cells.filter(status=CellStatus.FAILED).count()
        if sweep.status == SweepStatus.INTERRUPTED or failed:
            raise CommandError(
                f"{rows} rows written to {sweep.output_path} ({failed} failed)",
                returncode=EXIT_VERIFY,
            )
        self.stdout.write(self.style.SUCCESS(f"{rows} rows written to {sweep.output_path}"))

    def _progress(self, k: int, total: int, cell_id: int, outcome: dict) -> None:
        if outcome.get("success"):
            self.stdout.write(
                f"[{k}/{total}] cell {cell_id}: lightness={outcome['lightness']:.6g} "
                f"certified={outcome['certified']} min_c={outcome['min_c']}"
            )
        else:
            self.stderr.write(self.style.ERROR(f"[{k}/{total}] cell {cell_id}: {outcome.get('error')}"))

    def _run_pool(self, sweep: Sweep, ids: list[int], jobs: int, force: bool) -> None:
        """Queue every cell with django-q2 and run an in-process cluster of ``jobs`` workers."""
        Conf.WORKERS = jobs
        group = f"sweep-{sweep.id}"
        for cell_id in ids:
            async_task("experiments.tasks.run_sweep_cell", cell_id, force, group=group)

        cluster = Cluster()
        cluster.start()
        try:
            pending = set(ids)
            while pending:
                time.sleep(POLL_SECONDS)
                done = set(
                    SweepCell.objects.filter(id__in=pending, status__in=FINISHED).values_list("id", flat=True)
                )
                if done:
                    pending -= done
                    write_sweep_csv(sweep)
                    self.stdout.write(f"[{len(ids) - len(pending)}/{len(ids)}] cells finished")
                elif count_group(group) >= len(ids):
                    # every task has a result, so the rest died without marking their cell
                    SweepCell.objects.filter(id__in=pending).update(
                        status=CellStatus.FAILED, error_message="task died", finished_at=timezone.now()
                    )
        finally:
            cluster.stop()

    def _print_summary(self, sweep: Sweep) -> None:
        summary = growth_summary(sweep_frame(sweep))
        if summary.empty:
            return
        self.stdout.write(f"Lightness growth ({summary_path(sweep.output_path)}):")
        self.stdout.write(summary.to_string(index=False, float_format=lambda x: f"{x:.4g}"))
