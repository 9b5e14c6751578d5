"""Model parameters, coefficient fields, normalization constants and kernels."""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.special import gamma

from . import __title__
from .app_settings import NTL_CHECK_COEFFICIENT_BOUNDS
from .exceptions import DomainError, ModeError, ParameterError
from .geometry import Domain, Part, delta_threshold, sigma
from .utils import LoggerAddTag

logger = LoggerAddTag(logging.getLogger(__name__), __title__)


class Mode(str, Enum):
    """Corner or interior point of the (s, delta) parameter square."""

    NONLOCAL_FRACTIONAL = "nonlocal_fractional"
    WEIGHTED_FRACTIONAL = "weighted_fractional"
    NONLOCAL_LOCAL = "nonlocal_local"
    LOCAL_LOCAL = "local_local"

    @classmethod
    def from_parameters(cls, s: float, delta: float) -> "Mode":
        if delta > 0:
            return cls.NONLOCAL_FRACTIONAL if s < 1 else cls.NONLOCAL_LOCAL
        return cls.WEIGHTED_FRACTIONAL if s < 1 else cls.LOCAL_LOCAL

    @property
    def is_nonlocal(self) -> bool:
        """Omega_1 carries the heterogeneous-horizon form."""
        return self in (Mode.NONLOCAL_FRACTIONAL, Mode.NONLOCAL_LOCAL)

    @property
    def is_fractional(self) -> bool:
        """Omega_2 carries the regional fractional form."""
        return self in (Mode.NONLOCAL_FRACTIONAL, Mode.WEIGHTED_FRACTIONAL)


@dataclass(frozen=True)
class ModelParams:
    """Parameters (d, s, p, delta) and the mode they select.

    When mode is omitted it is derived from s and delta,
    when it is given it must agree with them.
    """

    s: float
    p: float
    delta: float = 0.0
    mode: Optional[Mode] = None
    d: int = 1

    def __post_init__(self):
        if self.d != 1:
            raise ParameterError(f"Only d = 1 is supported, got {self.d}")
        if not 0 < self.s <= 1:
            raise ParameterError(f"s must be in (0, 1], got {self.s}")
        if not self.p > 1:
            raise ParameterError(f"p must be > 1, got {self.p}")
        if self.delta < 0:
            raise ParameterError(f"delta must be >= 0, got {self.delta}")
        derived = Mode.from_parameters(self.s, self.delta)
        if self.mode is None:
            object.__setattr__(self, "mode", derived)
        else:
            mode = Mode(self.mode)
            if mode is not derived:
                raise ModeError(
                    f"mode {mode.value} does not match s={self.s}, "
                    f"delta={self.delta} (expected {derived.value})"
                )
            object.__setattr__(self, "mode", mode)

    @property
    def sp(self) -> float:
        return self.s * self.p

    def with_values(self, **kwargs) -> "ModelParams":
        """Copy with new values. The mode is derived again."""
        return replace(self, mode=None, **kwargs)

    def validate_for(self, domain: Domain) -> "ModelParams":
        threshold = delta_threshold(domain)
        if self.delta >= threshold:
            raise ParameterError(
                f"delta must be smaller than {threshold:.6g}, got {self.delta}"
            )
        return self

    def require_trace(self) -> "ModelParams":
        if self.sp <= 1:
            raise ParameterError(f"sp > 1 required, got sp={self.sp:.6g}")
        return self

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "s": self.s,
            "p": self.p,
            "delta": self.delta,
            "mode": self.mode.value,
        }


def _constant_one(x):
    return np.ones_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class CoefficientField:
    """Coefficients alpha on Omega_1 and beta on Omega_2.

    Both are bounded by alpha0 <= value <= 1 / alpha0.
    """

    alpha: Callable = _constant_one
    beta: Callable = _constant_one
    alpha0: float = 1.0

    def __post_init__(self):
        if not 0 < self.alpha0 <= 1:
            raise ParameterError(f"alpha0 must be in (0, 1], got {self.alpha0}")

    def _checked(self, name: str, values: np.ndarray) -> np.ndarray:
        if NTL_CHECK_COEFFICIENT_BOUNDS:
            lower, upper = self.alpha0, 1.0 / self.alpha0
            if np.any(values < lower) or np.any(values > upper):
                raise ParameterError(
                    f"{name} violates its bounds [{lower:.6g}, {upper:.6g}]"
                )
        return values

    def sample_alpha(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self._checked("alpha", np.broadcast_to(self.alpha(x), x.shape))

    def sample_beta(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self._checked("beta", np.broadcast_to(self.beta(x), x.shape))

    def sample(self, part: Part, x) -> np.ndarray:
        return self.sample_alpha(x) if Part(part) is Part.OMEGA1 else self.sample_beta(x)

    def lam(self, domain: Domain, x) -> np.ndarray:
        """Lambda = alpha on Omega_1 and beta on Omega_2."""
        x = np.asarray(x, dtype=float)
        in_first = x <= domain.xi
        return np.where(in_first, self.sample_alpha(x), self.sample_beta(x))


def a_dp(d: int, p: float) -> float:
    """Integral of |omega . e|^p over the unit sphere S^{d-1}."""
    return float(
        2.0 * np.pi ** ((d - 1) / 2.0) * gamma((p + 1.0) / 2.0) / gamma((d + p) / 2.0)
    )


def kappa_dsp(d: int, s: float, p: float) -> float:
    """Normalization of the regional fractional seminorm."""
    return (p - s * p) / a_dp(d, p)


def cbar_dp(d: int, p: float) -> float:
    """Normalization of the heterogeneous-horizon seminorm."""
    return (d + p) / a_dp(d, p)


def gamma_sym(x, y, params: ModelParams, domain: Domain, part: Part = Part.OMEGA1):
    """Symmetrized kernel of the heterogeneous-horizon seminorm."""
    if params.delta <= 0:
        raise ModeError("The symmetrized kernel needs delta > 0")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sx = np.asarray(sigma(domain, part, x))
    sy = np.asarray(sigma(domain, part, y))
    if np.any(sx <= 0) or np.any(sy <= 0):
        raise DomainError("The symmetrized kernel needs interior points")
    d, p, delta = params.d, params.p, params.delta
    exponent = d + params.sp
    distance = np.abs(x - y)
    value = np.where(distance < delta * sx, sx ** -exponent, 0.0) + np.where(
        distance < delta * sy, sy ** -exponent, 0.0
    )
    result = cbar_dp(d, p) / (2.0 * delta ** (d + p)) * value
    return float(result) if result.ndim == 0 else result


def frac_kernel(x, y, params: ModelParams):
    """Kernel |x - y|^(-d - sp) of the fractional seminorm."""
    distance = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    if np.any(distance == 0):
        raise DomainError("The fractional kernel is singular on the diagonal")
    result = distance ** -(params.d + params.sp)
    return float(result) if result.ndim == 0 else result


def weight(x, params: ModelParams, domain: Domain, part: Part = Part.OMEGA1):
    """Weight sigma^(p - sp) of the weighted Sobolev space."""
    distance = np.asarray(sigma(domain, part, x))
    if params.s == 1:
        result = np.ones_like(distance)
    else:
        result = distance ** (params.p - params.sp)
    return float(result) if result.ndim == 0 else result
