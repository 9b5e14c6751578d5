from ...constants import SUBCOMMAND_CONVOLVE
from ._base import NtlCommand, set_nested


class Command(NtlCommand):
    help = "Evaluates the boundary-localized convolution of a named function"
    subcommand = SUBCOMMAND_CONVOLVE

    def add_subcommand_arguments(self, parser):
        parser.add_argument("--function", help="named function, e.g. sine:1")
        parser.add_argument("--delta", type=float)
        parser.add_argument("--part", type=int, choices=(1, 2))
        parser.add_argument("--points", type=int, help="number of sample points")

    def overrides(self, options) -> dict:
        overrides = {}
        for key in ("function", "delta", "part", "points"):
            set_nested(overrides, "convolve", key, options[key])
        return overrides
