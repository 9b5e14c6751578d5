from typing import Iterable, Optional


class NtlError(Exception):
    """Base class for all errors of this app"""


class DomainError(NtlError, ValueError):
    """A point lies outside of a part or a domain or mesh is malformed"""


class ParameterError(NtlError, ValueError):
    """A model or solver parameter is outside its admissible range"""


class ModeError(NtlError, ValueError):
    """An operation was requested in a mode where it is not defined"""


class SolverError(NtlError, RuntimeError):
    """A solve failed. Details are provided in `diagnostics`"""

    def __init__(self, message: str, diagnostics: Optional[dict] = None) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics or dict()


class LineSearchError(SolverError):
    """The step size of a line search underflowed"""


class ConvergenceError(SolverError):
    """An iterative method hit its iteration cap"""


class ConfigError(NtlError):
    """A run configuration is invalid. All violations are in `violations`"""

    def __init__(self, violations: Iterable[str]) -> None:
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
