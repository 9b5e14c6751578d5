import os

from .utils import clean_setting


def _threads_from_environment() -> int:
    try:
        return max(int(os.environ.get("NTL_THREADS", "0")), 0)
    except ValueError:
        return 0


NTL_THREADS = clean_setting("NTL_THREADS", _threads_from_environment())
"""Maximum number of worker threads for grid sweeps. 0 means all cores.
Defaults to the environment variable NTL_THREADS.
"""

NTL_QUADRATURE_ORDER = clean_setting("NTL_QUADRATURE_ORDER", 8, min_value=2)
"""Gauss order per element or piece of the outer integrals."""

NTL_INNER_ORDER = clean_setting("NTL_INNER_ORDER", 4, min_value=2)
"""Gauss order per piece of the inner ball integrals of discrete fields."""

NTL_FAR_FIELD_ORDER = clean_setting("NTL_FAR_FIELD_ORDER", 4, min_value=2)
"""Gauss order for well separated element pairs of the fractional form."""

NTL_GRADING_LEVELS = clean_setting("NTL_GRADING_LEVELS", 12, min_value=1)
"""Number of levels of geometric grading toward singular points."""

NTL_GRADING_RATIO = clean_setting(
    "NTL_GRADING_RATIO", 0.5, min_value=0.05, max_value=0.95
)
"""Ratio between consecutive cells of a geometric grading."""

NTL_OUTER_CELLS = clean_setting("NTL_OUTER_CELLS", 32, min_value=1)
"""Uniform cells of the outer rule when integrating continuous functions."""

NTL_MOLLIFIER_NODES = clean_setting("NTL_MOLLIFIER_NODES", 32, min_value=4)
"""Gauss-Legendre nodes of the z-quadrature of the boundary-localized convolution."""

NTL_DENSE_SOLVER_MAX_DOF = clean_setting("NTL_DENSE_SOLVER_MAX_DOF", 512)
"""Linear systems up to this many free unknowns are solved by Cholesky,
larger ones by conjugate gradients.
"""

NTL_CG_RTOL = clean_setting("NTL_CG_RTOL", 1e-10, min_value=0.0)
"""Relative residual at which conjugate gradients stops."""

NTL_DESCENT_GTOL = clean_setting("NTL_DESCENT_GTOL", 1e-8, min_value=0.0)
"""General-p solves stop when the max-norm of the gradient drops below this."""

NTL_DESCENT_MAX_ITER = clean_setting("NTL_DESCENT_MAX_ITER", 100_000, min_value=1)
"""Iteration cap of general-p solves."""

NTL_ARMIJO_CONSTANT = clean_setting(
    "NTL_ARMIJO_CONSTANT", 1e-4, min_value=0.0, max_value=0.5
)
"""Sufficient decrease constant of the backtracking line search."""

NTL_ARMIJO_SHRINK = clean_setting("NTL_ARMIJO_SHRINK", 0.5, min_value=0.0, max_value=1.0)
"""Step reduction factor of the backtracking line search."""

NTL_CHECK_COEFFICIENT_BOUNDS = clean_setting("NTL_CHECK_COEFFICIENT_BOUNDS", False)
"""When True the declared bounds of the coefficients are asserted
at every quadrature point during assembly.
"""

NTL_RECORD_RUNS = clean_setting("NTL_RECORD_RUNS", True)
"""When True every run of a management command is recorded in the database."""

NTL_BULK_METHODS_BATCH_SIZE = clean_setting("NTL_BULK_METHODS_BATCH_SIZE", 500)
# Technical parameter defining the maximum number of objects processed per run
# of Django batch methods, e.g. bulk_create and bulk_update

NTL_TASKS_TIME_LIMIT = clean_setting("NTL_TASKS_TIME_LIMIT", 7200)
"""Global timeout for tasks in seconds."""
