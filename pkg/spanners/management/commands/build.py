"""
Build a greedy (1+eps)-spanner.

    manage.py build --gen uniform-cube --n 256 --dim 2 --eps 0.5 --out s.edges

Writes the spanner to --out and its metrics to --out + ".json".
"""

from pathlib import Path

from spanners.app_settings import spanlab_setting
from spanners.engines.build import BuildEngine
from spanners.fileio import write_json, write_spanner

from ._options import EXIT_VERIFY, FORMAT_CHOICES, SpanlabCommand, add_instance_arguments, instance_spec


class Command(SpanlabCommand):
    help = "Build the greedy (1+eps)-spanner of an instance and write it with its metrics."

    def add_arguments(self, parser):
        add_instance_arguments(parser)
        parser.add_argument("--eps", type=float, required=True, help="Stretch parameter, 0 < eps < 1")
        parser.add_argument("--out", required=True, help="Spanner output file; metrics go to OUT.json")
        parser.add_argument(
            "--format",
            choices=FORMAT_CHOICES,
            default="edges",
            help="edges: '# n m eps' header then 'u v weight' lines; csv: u,v,weight; json: metrics and edges",
        )
        parser.add_argument(
            "--force",
            action="store_true",
            help="Allow n above the build guardrail (SPANLAB_BUILD_GUARDRAIL_N, default 4096)",
        )

    def handle(self, *args, **options):
        source = instance_spec(options)
        guardrail = None if options["force"] else int(spanlab_setting("BUILD_GUARDRAIL_N"))
        engine = BuildEngine(source, options["eps"], max_n=guardrail)
        result = engine.run()
        self.echo_logs(result, options["verbosity"])
        if not result.success:
            raise self.fail(result, EXIT_VERIFY)

        out = Path(options["out"])
        metrics = dict(result.metrics)
        build_ms = metrics.pop("build_ms")
        write_spanner(out, result.spanner, options["format"], metrics)
        write_json(Path(f"{out}.json"), metrics)

        self.stdout.write(
            self.style.SUCCESS(
                f"{out}: n={metrics['n']} m={metrics['m_spanner']} "
                f"lightness={metrics['lightness']:.6g} sparsity={metrics['sparsity']:.6g} "
                f"max_stretch={metrics['max_stretch']:.12g} ({build_ms:.0f} ms)"
            )
        )
