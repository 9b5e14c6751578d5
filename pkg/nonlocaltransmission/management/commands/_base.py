import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from ... import __title__
from ...constants import EXIT_CHECK_FAILED, EXIT_CONFIG_ERROR
from ...runner import run
from ...tasks import run_subcommand
from ...utils import LoggerAddTag

logger = LoggerAddTag(logging.getLogger(__name__), __title__)


def set_nested(overrides: dict, section: str, key: str, value) -> None:
    if value is not None:
        overrides.setdefault(section, {})[key] = value


class NtlCommand(BaseCommand):
    """Base for commands which run one subcommand of the runner"""

    subcommand = None

    def add_arguments(self, parser):
        parser.add_argument("--config", help="path of a JSON run configuration")
        parser.add_argument("--out", help="output directory")
        parser.add_argument("--seed", type=int, help="seed of random test suites")
        parser.add_argument(
            "--quiet", action="store_true", help="suppress progress lines"
        )
        parser.add_argument(
            "--background",
            action="store_true",
            help="run as celery task instead of inline",
        )
        self.add_subcommand_arguments(parser)

    def add_subcommand_arguments(self, parser):
        pass

    @staticmethod
    def add_parameter_arguments(parser):
        parser.add_argument("--s", type=float, help="fractional order in (0, 1]")
        parser.add_argument("--delta", type=float, help="horizon, 0 for the local limit")
        parser.add_argument("--p", type=float, help="integrability exponent > 1")
        parser.add_argument("--mode", help="mode, derived from s and delta if omitted")

    @staticmethod
    def parameter_overrides(options) -> dict:
        overrides = {}
        for key in ("s", "delta", "p", "mode"):
            set_nested(overrides, "params", key, options.get(key))
        return overrides

    def overrides(self, options) -> dict:
        return {}

    def _config_text(self, options) -> str:
        if not options["config"]:
            return ""
        try:
            return Path(options["config"]).read_text(encoding="utf-8")
        except OSError as ex:
            raise CommandError(
                f"Can not read config: {ex}", returncode=EXIT_CONFIG_ERROR
            ) from None

    def handle(self, *args, **options):
        config_text = self._config_text(options)
        overrides = self.overrides(options)
        if options["seed"] is not None:
            overrides["seed"] = options["seed"]
        if options["background"]:
            run_subcommand.delay(
                self.subcommand, config_text, options["out"], overrides
            )
            self.stdout.write(f"Started {self.subcommand} in background")
            return

        progress = None if options["quiet"] else self.stdout.write
        result = run(self.subcommand, config_text, options["out"], overrides, progress)
        if result.exit_status == EXIT_CONFIG_ERROR:
            for violation in result.violations:
                self.stderr.write(violation)
            raise CommandError("Invalid configuration", returncode=EXIT_CONFIG_ERROR)
        if result.exit_status == EXIT_CHECK_FAILED:
            raise CommandError(
                f"{self.subcommand} failed", returncode=EXIT_CHECK_FAILED
            )
        if not options["quiet"]:
            self.stdout.write(self.style.SUCCESS(f"{self.subcommand} complete"))
