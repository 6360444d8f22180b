"""
Verify a spanner file: exact stretch over all pairs and MST containment.

Exits 1 when the stretch exceeds 1+eps or an MST edge is missing.
"""

from pathlib import Path

from django.core.management.base import CommandError

from spanners.engines.verify import VerifyEngine
from spanners.fileio import write_json

from ._options import EXIT_VERIFY, SpanlabCommand, add_instance_arguments, instance_spec


class Command(SpanlabCommand):
    help = "Check a spanner file against its instance; exit 1 on a stretch or MST-containment failure."

    def add_arguments(self, parser):
        parser.add_argument("spanner", help="Spanner file written by 'build' (any format)")
        add_instance_arguments(parser)
        parser.add_argument("--eps", type=float, help="Override the eps stored in the spanner file")
        parser.add_argument("--out", help="Write the verification metrics JSON here")

    def handle(self, *args, **options):
        engine = VerifyEngine(instance_spec(options), options["spanner"], eps=options["eps"])
        result = engine.run()
        self.echo_logs(result, options["verbosity"])
        if not result.success:
            raise self.fail(result, EXIT_VERIFY)

        metrics = result.metrics
        if options["out"]:
            write_json(Path(options["out"]), metrics)
        summary = (
            f"max_stretch={metrics['max_stretch']:.12g} worst_pair={metrics['worst_pair']} "
            f"lightness={metrics['lightness']:.6g} sparsity={metrics['sparsity']:.6g}"
        )
        if not result.passed:
            raise CommandError(f"FAILED {summary}", returncode=EXIT_VERIFY)
        self.stdout.write(self.style.SUCCESS(f"OK {summary}"))
