"""
Run the cluster certifier on a spanner.

    manage.py certify --gen collinear --n 64 --eps 0.5 --out report.json

Exits 2 on any error anomaly, and on ledger fallback unless
--allow-fallback is given.
"""

import json
from pathlib import Path

from django.core.management.base import CommandError

from spanners.app_settings import cert_options
from spanners.engines.certify import CertifyEngine
from spanners.fileio import write_json

from ._options import EXIT_CERTIFY, EXIT_USAGE, SpanlabCommand, add_instance_arguments, instance_spec


class Command(SpanlabCommand):
    help = "Certify a spanner through the hierarchical clustering; exit 2 on anomalies."

    def add_arguments(self, parser):
        add_instance_arguments(parser)
        parser.add_argument("--spanner", help="Spanner file; built greedily when omitted")
        parser.add_argument("--eps", type=float, help="Stretch parameter (default: the spanner file's)")
        parser.add_argument("--out", help="Write the report JSON here instead of stdout")
        parser.add_argument(
            "--allow-fallback",
            action="store_true",
            help="Treat levels paid through the fallback ledger as warnings, not failures",
        )
        parser.add_argument("--dump-clusters", action="store_true", help="Include every cluster in the report")
        parser.add_argument("--j", type=int, dest="stream", help="Certify one stream j only")
        parser.add_argument("--c", type=float, dest="credit", help="Check one credit constant instead of searching")
        parser.add_argument("--g", type=float, help="Diameter constant (default: SPANLAB_CERT_G)")
        parser.add_argument("--s", type=float, help="Stretch coupling, eps_analysis = eps/s (default: SPANLAB_CERT_S)")

    def handle(self, *args, **options):
        if options["eps"] is None and not options["spanner"]:
            raise CommandError("--eps is required unless --spanner is given", returncode=EXIT_USAGE)

        engine = CertifyEngine(
            instance_spec(options),
            options["eps"],
            spanner_path=options["spanner"],
            dump_clusters=options["dump_clusters"],
            **cert_options(
                g=options["g"],
                s=options["s"],
                j=options["stream"],
                c=options["credit"],
                allow_fallback=options["allow_fallback"],
            ),
        )
        result = engine.run()
        self.echo_logs(result, options["verbosity"])
        if not result.success:
            raise self.fail(result, EXIT_CERTIFY)

        if options["out"]:
            write_json(Path(options["out"]), result.metrics)
        else:
            self.stdout.write(json.dumps(result.metrics, indent=2, sort_keys=True))

        report = result.report
        summary = (
            f"min_feasible_c={report.min_feasible_c} B={report.exceptional_count} "
            f"anomalies={len(report.anomalies)}"
        )
        if not result.passed:
            raise CommandError(f"NOT CERTIFIED {summary}", returncode=EXIT_CERTIFY)
        self.stderr.write(self.style.SUCCESS(f"CERTIFIED {summary}"))
