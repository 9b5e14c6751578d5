from ...config import QUANTITIES
from ...constants import SUBCOMMAND_ENERGY
from ._base import NtlCommand, set_nested


class Command(NtlCommand):
    help = "Evaluates a seminorm or energy of a named function and writes energy.json"
    subcommand = SUBCOMMAND_ENERGY

    def add_subcommand_arguments(self, parser):
        self.add_parameter_arguments(parser)
        parser.add_argument("--function", help="named function, e.g. sine:1")
        parser.add_argument("--quantity", choices=QUANTITIES)
        parser.add_argument("--part", type=int, choices=(1, 2))

    def overrides(self, options) -> dict:
        overrides = self.parameter_overrides(options)
        for key in ("function", "quantity", "part"):
            set_nested(overrides, "energy", key, options[key])
        return overrides
