from ...constants import SUBCOMMAND_VERIFY
from ...verify import CHECKS
from ._base import NtlCommand


class Command(NtlCommand):
    help = "Runs named numerical checks, all of them by default. Checks: " + ", ".join(
        sorted(CHECKS)
    )
    subcommand = SUBCOMMAND_VERIFY

    def add_subcommand_arguments(self, parser):
        # names are validated with the config
        parser.add_argument("checks", nargs="*", metavar="check")

    def overrides(self, options) -> dict:
        if options["checks"]:
            return {"verify": {"checks": list(options["checks"])}}
        return {}
