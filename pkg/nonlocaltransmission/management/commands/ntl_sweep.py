from ...constants import SUBCOMMAND_SWEEP
from ...harness import CaseId
from ._base import NtlCommand, set_nested


class Command(NtlCommand):
    help = "Runs a parameter sweep of one case and writes its table and summary"
    subcommand = SUBCOMMAND_SWEEP

    def add_subcommand_arguments(self, parser):
        parser.add_argument("--case", choices=[case.value for case in CaseId])
        parser.add_argument("--n", type=int, help="elements per part")
        parser.add_argument(
            "--emit-plot-data",
            action="store_true",
            help="also write nodal values of all minimizers",
        )

    def overrides(self, options) -> dict:
        overrides = {}
        set_nested(overrides, "sweep", "case", options["case"])
        set_nested(overrides, "mesh", "n_per_side", options["n"])
        if options["emit_plot_data"]:
            set_nested(overrides, "sweep", "emit_plot_data", True)
        return overrides
