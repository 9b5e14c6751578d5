"""Named coefficients, loads, test functions and potentials.

Functions are addressed as ``name`` or ``name:arg1,arg2`` in configs and on
the command line, or as objects ``{"name": ..., "args": [...]}``. Tabulated
functions are given as ``{"name": "tabulated", "x": [...], "y": [...]}``.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial

from . import __title__
from .core.fields import PiecewiseLinear
from .exceptions import ParameterError
from .utils import LoggerAddTag

logger = LoggerAddTag(logging.getLogger(__name__), __title__)

FunctionSpec = Union[str, dict, "NamedFunction"]


@dataclass(frozen=True)
class NamedFunction:
    """Vectorized function with an optional analytic derivative."""

    name: str
    args: Tuple[float, ...]
    func: Callable = field(repr=False, compare=False)
    derivative: Optional[Callable] = field(default=None, repr=False, compare=False)
    breakpoints: Tuple[float, ...] = field(default=(), repr=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self.func(x), x.shape).astype(float)

    @property
    def label(self) -> str:
        if not self.args:
            return self.name
        return "{}:{}".format(self.name, ",".join(format(a, "g") for a in self.args))


def _constant(c=1.0):
    return lambda x: np.full_like(x, c), lambda x: np.zeros_like(x)


def _affine(a=0.0, b=1.0):
    return lambda x: a + b * x, lambda x: np.full_like(x, b)


def _linear():
    return _affine(0.0, 1.0)


def _quadratic():
    return lambda x: x ** 2, lambda x: 2.0 * x


def _sine(k=1.0):
    return lambda x: np.sin(k * np.pi * x), lambda x: k * np.pi * np.cos(k * np.pi * x)


def _cosine(k=1.0):
    return lambda x: np.cos(k * np.pi * x), lambda x: -k * np.pi * np.sin(k * np.pi * x)


def _bubble(a=-1.0, b=1.0):
    """(x - a)(b - x) / 2, the solution of -u'' = 1 with u(a) = u(b) = 0."""
    return lambda x: 0.5 * (x - a) * (b - x), lambda x: 0.5 * (a + b) - x


def _exponential(k=1.0):
    return lambda x: np.exp(k * x), lambda x: k * np.exp(k * x)


def _gaussian(center=0.0, width=1.0):
    def func(x):
        return np.exp(-(((x - center) / width) ** 2))

    def derivative(x):
        return -2.0 * (x - center) / width ** 2 * func(x)

    return func, derivative


def _bump(base=1.0, height=0.5, center=0.0, width=0.5):
    """base + height * exp(1 - 1 / (1 - r^2)) with r = (x - center) / width."""

    def _profile(x):
        r = (x - center) / width
        inside = np.abs(r) < 1
        safe = np.where(inside, 1.0 - r ** 2, 1.0)
        return r, inside, safe

    def func(x):
        _, inside, safe = _profile(x)
        return base + height * np.where(inside, np.exp(1.0 - 1.0 / safe), 0.0)

    def derivative(x):
        r, inside, safe = _profile(x)
        value = np.exp(1.0 - 1.0 / safe) * (-2.0 * r / safe ** 2) / width
        return height * np.where(inside, value, 0.0)

    return func, derivative


def _polynomial(*coefficients):
    coefficients = coefficients or (0.0,)
    derived = polynomial.polyder(coefficients)
    return (
        lambda x: polynomial.polyval(x, coefficients),
        lambda x: polynomial.polyval(x, derived),
    )


def _kink(center=0.5):
    return lambda x: np.abs(x - center), lambda x: np.sign(x - center)


FUNCTIONS: Dict[str, Callable] = {
    "affine": _affine,
    "bubble": _bubble,
    "bump": _bump,
    "constant": _constant,
    "cosine": _cosine,
    "exponential": _exponential,
    "gaussian": _gaussian,
    "kink": _kink,
    "linear": _linear,
    "polynomial": _polynomial,
    "quadratic": _quadratic,
    "sine": _sine,
}


def parse_function_text(text: str) -> Tuple[str, Tuple[float, ...]]:
    name, _, arg_text = text.strip().partition(":")
    try:
        args = tuple(float(x) for x in arg_text.split(",") if x.strip())
    except ValueError:
        raise ParameterError(f"Invalid arguments for function: {text}") from None
    return name.strip(), args


def make_function(spec: FunctionSpec) -> NamedFunction:
    """Create a named function from its text or object specification."""
    if isinstance(spec, NamedFunction):
        return spec
    if isinstance(spec, dict):
        name = spec.get("name", "")
        if name == "tabulated":
            return tabulated(spec.get("x", ()), spec.get("y", ()))
        args = tuple(float(x) for x in spec.get("args", ()))
    elif isinstance(spec, str):
        name, args = parse_function_text(spec)
    else:
        raise ParameterError(f"Invalid function specification: {spec!r}")
    try:
        factory = FUNCTIONS[name]
    except KeyError:
        raise ParameterError(f"Unknown function: {name}") from None
    try:
        func, derivative = factory(*args)
    except TypeError:
        raise ParameterError(f"Wrong number of arguments for function {name}") from None
    breakpoints = (args[0] if args else 0.5,) if name == "kink" else ()
    return NamedFunction(
        name=name, args=args, func=func, derivative=derivative, breakpoints=breakpoints
    )


def tabulated(x, y) -> NamedFunction:
    """Linear interpolation of samples. Constant beyond the samples."""
    try:
        field_ = PiecewiseLinear(x, y)
    except ValueError as ex:
        raise ParameterError(f"Invalid tabulated function: {ex}") from None
    return NamedFunction(
        name="tabulated",
        args=(),
        func=field_,
        derivative=field_.derivative,
        breakpoints=tuple(field_.nodes),
    )


def smooth_suite() -> Tuple[NamedFunction, ...]:
    """Ten smooth non-constant functions used by the inequality checks."""
    specs = (
        "linear",
        "quadratic",
        "polynomial:0,1,-3,2",
        "sine:1",
        "cosine:1",
        "sine:2",
        "exponential:1",
        "gaussian:0.5,0.3",
        "bump:0,1,0.5,0.4",
        "bubble:0,1",
    )
    return tuple(make_function(spec) for spec in specs)


def vanishing_suite() -> Tuple[NamedFunction, ...]:
    """Smooth functions on (0, 1) vanishing at both ends."""
    specs = ("sine:1", "bubble:0,1", "polynomial:0,0,1,-1", "sine:2")
    return tuple(make_function(spec) for spec in specs)


# potentials

SATURATING_MIN_P = (np.sqrt(13.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Potential:
    """Energy potential rho with c1 r^p <= rho(r) <= c2 r^p.

    "power" is rho(r) = r^p. "saturating" is
    rho(r) = r^p (1 + theta r^2 / (1 + r^2)) with 0 <= theta <= 1/2,
    which is convex for p >= SATURATING_MIN_P.
    """

    p: float
    name: str = "power"
    theta: float = 0.0

    def __post_init__(self):
        if self.name not in ("power", "saturating"):
            raise ParameterError(f"Unknown potential: {self.name}")
        if self.name == "saturating":
            if not 0 <= self.theta <= 0.5:
                raise ParameterError(f"theta must be in [0, 1/2], got {self.theta}")
            if self.p < SATURATING_MIN_P:
                raise ParameterError(
                    f"saturating potential needs p >= {SATURATING_MIN_P:.4f}"
                )

    @property
    def is_power(self) -> bool:
        return self.name == "power" or self.theta == 0

    @property
    def c1(self) -> float:
        return 1.0

    @property
    def c2(self) -> float:
        return 1.0 + self.theta

    def rho(self, r):
        r = np.asarray(r, dtype=float)
        value = r ** self.p
        if not self.is_power:
            value = value + self.theta * r ** (self.p + 2) / (1.0 + r ** 2)
        return value

    def drho(self, r):
        r = np.asarray(r, dtype=float)
        p = self.p
        value = p * r ** (p - 1)
        if not self.is_power:
            value = value + self.theta * r ** (p + 1) * ((p + 2) + p * r ** 2) / (
                1.0 + r ** 2
            ) ** 2
        return value

    def d2rho(self, r):
        r = np.asarray(r, dtype=float)
        p = self.p
        value = p * (p - 1) * r ** (p - 2)
        if not self.is_power:
            q = r ** 2
            value = value + self.theta * r ** p * (
                (p + 2) * (p + 1) + (2 * p * p + 2 * p - 6) * q + p * (p - 1) * q * q
            ) / (1.0 + q) ** 3
        return value


def make_potential(p: float, name: str = "power", theta: float = 0.0) -> Potential:
    return Potential(p=float(p), name=name, theta=float(theta))
