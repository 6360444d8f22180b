"""
Flags and helpers shared by the build, verify, certify and sweep commands.
"""

import sys
from argparse import ArgumentParser
from typing import Any

from django.core.management.base import BaseCommand, CommandError, CommandParser

from spanners.app_settings import spanlab_setting
from spanners.engines.base import EngineResult
from spanners.exceptions import BadSpec
from spanners.generators import GenKind, GenSpec

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CERTIFY = 2
EXIT_USAGE = 64

FORMAT_CHOICES = ["json", "csv", "edges"]


def add_instance_arguments(parser: ArgumentParser) -> None:
    group = parser.add_argument_group("instance")
    group.add_argument("--input", help="Point file, or a distance matrix: a first line n, then n rows of n distances")
    group.add_argument(
        "--gen",
        choices=[k.value for k in GenKind if k != GenKind.EXPLICIT_FILE],
        help="Generator for a synthetic point set",
    )
    group.add_argument("--n", type=int, help="Number of points to generate")
    group.add_argument("--dim", type=int, default=2, help="Ambient dimension (default: 2)")
    group.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Generator seed (default: $SPANLAB_SEED, else 0)",
    )


def instance_spec(options: dict[str, Any]) -> GenSpec:
    """GenSpec from ``--input`` or ``--gen/--n/--dim/--seed``."""
    if options.get("input") and options.get("gen"):
        raise CommandError("--input and --gen are mutually exclusive", returncode=EXIT_USAGE)
    if options.get("input"):
        return GenSpec("explicit-file", path=options["input"])
    if not options.get("gen"):
        raise CommandError("one of --input or --gen is required", returncode=EXIT_USAGE)
    if options.get("n") is None:
        raise CommandError("--gen needs --n", returncode=EXIT_USAGE)
    try:
        return GenSpec(options["gen"], n=options["n"], dim=options["dim"], seed=default_seed(options))
    except BadSpec as e:
        raise CommandError(str(e), returncode=EXIT_USAGE) from e


def default_seed(options: dict[str, Any]) -> int:
    if options.get("seed") is not None:
        return options["seed"]
    return int(spanlab_setting("DEFAULT_SEED"))


class SpanlabCommand(BaseCommand):
    """Base for spanlab commands: usage errors exit 64, engine logs go to stderr."""

    def create_parser(self, prog_name: str, subcommand: str, **kwargs: Any) -> CommandParser:
        parser = super().create_parser(prog_name, subcommand, **kwargs)

        def usage_error(message: str) -> None:
            if parser.called_from_command_line:
                parser.print_usage(sys.stderr)
                parser.exit(EXIT_USAGE, f"{parser.prog}: error: {message}\n")
            raise CommandError(f"Error: {message}", returncode=EXIT_USAGE)

        parser.error = usage_error
        return parser

    def echo_logs(self, result: EngineResult, verbosity: int) -> None:
        """WARNING and ERROR lines always; INFO lines from verbosity 2."""
        for line in result.logs:
            if line.startswith("[ERROR]"):
                self.stderr.write(self.style.ERROR(line))
            elif line.startswith("[WARNING]"):
                self.stderr.write(self.style.WARNING(line))
            elif verbosity >= 2:
                self.stderr.write(line)

    def fail(self, result: EngineResult, returncode: int) -> CommandError:
        """CommandError for a failed engine run; input errors become usage errors."""
        code = EXIT_USAGE if result.usage_error else returncode
        return CommandError(result.error_message or "failed", returncode=code)
