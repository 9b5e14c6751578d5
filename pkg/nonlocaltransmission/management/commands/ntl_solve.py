from ...constants import SUBCOMMAND_SOLVE
from ._base import NtlCommand, set_nested


class Command(NtlCommand):
    help = "Solves the transmission problem and writes solution.csv and report.json"
    subcommand = SUBCOMMAND_SOLVE

    def add_subcommand_arguments(self, parser):
        self.add_parameter_arguments(parser)
        parser.add_argument("--n", type=int, help="elements per part")
        parser.add_argument("--load", help="load on both parts, e.g. constant:1")
        parser.add_argument("--alpha", help="coefficient on Omega_1")
        parser.add_argument("--beta", help="coefficient on Omega_2")
        parser.add_argument(
            "--penalty-eps",
            type=float,
            help="impose the transmission condition by a penalty with this epsilon",
        )

    def overrides(self, options) -> dict:
        overrides = self.parameter_overrides(options)
        set_nested(overrides, "mesh", "n_per_side", options["n"])
        set_nested(overrides, "loads", "f1", options["load"])
        set_nested(overrides, "loads", "f2", options["load"])
        set_nested(overrides, "coefficients", "alpha", options["alpha"])
        set_nested(overrides, "coefficients", "beta", options["beta"])
        set_nested(overrides, "solver", "penalty_eps", options["penalty_eps"])
        return overrides
