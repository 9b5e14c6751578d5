# mollifier profile
MOLLIFIER_SUPPORT = 0.9
MOLLIFIER_PLATEAU = 0.45

# central differences
FD_STEP = 1e-6

# lower cut-off for |difference quotient| in Hessians of potentials
HESSIAN_FLOOR = 1e-10

# weak-topology proxies use this many test functions
WEAK_MOMENTS_COUNT = 5

# relative inversion tolerated by the monotonicity check of sweeps
MONOTONE_TOLERANCE = 0.05

# exit status of runs
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2

SUBCOMMAND_SOLVE = "solve"
SUBCOMMAND_SWEEP = "sweep"
SUBCOMMAND_VERIFY = "verify"
SUBCOMMAND_ENERGY = "energy"
SUBCOMMAND_CONVOLVE = "convolve"

SUBCOMMANDS = (
    SUBCOMMAND_SOLVE,
    SUBCOMMAND_SWEEP,
    SUBCOMMAND_VERIFY,
    SUBCOMMAND_ENERGY,
    SUBCOMMAND_CONVOLVE,
)

# subcommands which rely on traces and therefore need sp > 1
TRACE_SUBCOMMANDS = (SUBCOMMAND_SOLVE, SUBCOMMAND_SWEEP)
