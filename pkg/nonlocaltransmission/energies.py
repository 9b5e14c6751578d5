"""Seminorms and energies of the transmission problem.

Continuous function handles are integrated with graded composite Gauss rules
(verification path). Discrete fields go through the forms of ``forms``
(solver path), which share their quadrature with the solvers.
"""

import logging
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import __title__
from .app_settings import (
    NTL_GRADING_LEVELS,
    NTL_GRADING_RATIO,
    NTL_QUADRATURE_ORDER,
)
from .constants import FD_STEP
from .core.quadrature import outer_rule, singular_unit_rule, window_rule
from .exceptions import ModeError
from .forms import FieldPair, Layout, build_forms, load_vector
from .geometry import Domain, Mesh, Part, sigma
from .kernels import CoefficientField, ModelParams, cbar_dp, kappa_dsp
from .library import Potential, make_potential
from .utils import LoggerAddTag

logger = LoggerAddTag(logging.getLogger(__name__), __title__)


class EnergyBreakdown(NamedTuple):
    part1_energy: float
    part2_energy: float
    load_term: float

    @property
    def total(self) -> float:
        return self.part1_energy + self.part2_energy - self.load_term

    def to_dict(self) -> dict:
        return {
            "part1_energy": self.part1_energy,
            "part2_energy": self.part2_energy,
            "load_term": self.load_term,
            "total": self.total,
        }


class FunctionPair(NamedTuple):
    """Pair of function handles, u1 on Omega_1 and u2 on Omega_2."""

    u1: Callable
    u2: Callable


class LoadSpec(NamedTuple):
    f1: Optional[Callable] = None
    f2: Optional[Callable] = None


def _breakpoints(u) -> np.ndarray:
    return np.asarray(getattr(u, "breakpoints", ()), dtype=float)


def _part_rule(u, domain: Domain, part: Part):
    lower, upper = domain.bounds(part)
    breakpoints = np.concatenate((_breakpoints(u), [0.5 * (lower + upper)]))
    return outer_rule(lower, upper, breakpoints=breakpoints)


def _sample(func: Optional[Callable], x: np.ndarray) -> np.ndarray:
    if func is None:
        return np.ones_like(x)
    return np.broadcast_to(np.asarray(func(x), dtype=float), x.shape)


def _ratio_values(ratios: np.ndarray, p: float, potential: Optional[Potential]):
    return ratios ** p if potential is None else potential.rho(ratios)


def derivative_of(u) -> Callable:
    """Analytic derivative of u when available, central differences otherwise."""
    derivative = getattr(u, "derivative", None)
    if derivative is not None:
        return derivative

    def central(x):
        x = np.asarray(x, dtype=float)
        return (np.asarray(u(x + FD_STEP)) - np.asarray(u(x - FD_STEP))) / (
            2.0 * FD_STEP
        )

    return central


def frak_integral(
    u: Callable,
    params: ModelParams,
    domain: Domain,
    part: Part = Part.OMEGA1,
    coefficient: Optional[Callable] = None,
    potential: Optional[Potential] = None,
) -> float:
    """Double integral of the heterogeneous-horizon seminorm, weighted by coefficient(x).

    With the power potential and no coefficient this is the seminorm to the power p.
    """
    p, sp = params.p, params.sp
    x, w = _part_rule(u, domain, part)
    distance = sigma(domain, part, x)
    radius = params.delta * distance
    inner = window_rule(x, radius, np.sort(_breakpoints(u)), NTL_QUADRATURE_ORDER)
    ratios = np.abs(np.asarray(u(x))[:, None] - np.asarray(u(inner.nodes))) / radius[
        :, None
    ]
    inner_values = np.sum(inner.weights * _ratio_values(ratios, p, potential), axis=1)
    values = cbar_dp(params.d, p) * distance ** (p - sp) / radius * inner_values
    return float(np.dot(w, _sample(coefficient, x) * values))


def frac_integral(
    u: Callable,
    params: ModelParams,
    domain: Domain,
    part: Part = Part.OMEGA2,
    coefficient: Optional[Callable] = None,
    potential: Optional[Potential] = None,
) -> float:
    """Regional fractional double integral, weighted by coefficient(x).

    The y-line is split at x and integrated in t = |x - y| with a rule
    graded toward t = 0 carrying the factor t^(p - 1 - sp).
    """
    p, sp = params.p, params.sp
    exponent = p - 1 - sp
    x, w = _part_rule(u, domain, part)
    lower, upper = domain.bounds(part)
    unit = singular_unit_rule(
        exponent, NTL_QUADRATURE_ORDER, NTL_GRADING_LEVELS, NTL_GRADING_RATIO
    )
    center = np.asarray(u(x))
    total = np.zeros_like(x)
    for length, direction in ((x - lower, -1.0), (upper - x, 1.0)):
        t = length[:, None] * unit.nodes
        weights = length[:, None] ** (1.0 + exponent) * unit.weights
        safe_t = np.where(t > 0, t, 1.0)
        ratios = np.abs(center[:, None] - np.asarray(u(x[:, None] + direction * t))) / safe_t
        total += np.sum(weights * _ratio_values(ratios, p, potential), axis=1)
    return float(kappa_dsp(params.d, params.s, p) * np.dot(w, _sample(coefficient, x) * total))


def weighted_integral(
    u: Callable,
    params: ModelParams,
    domain: Domain,
    part: Part = Part.OMEGA1,
    coefficient: Optional[Callable] = None,
    potential: Optional[Potential] = None,
    weighted: bool = True,
) -> float:
    """Integral of coefficient * sigma^(p - sp) * rho(|u'|), unweighted when asked."""
    p = params.p
    x, w = _part_rule(u, domain, part)
    slopes = np.abs(np.asarray(derivative_of(u)(x), dtype=float))
    values = _ratio_values(slopes, p, potential)
    if weighted and params.s < 1:
        values = values * sigma(domain, part, x) ** (p - params.sp)
    return float(np.dot(w, _sample(coefficient, x) * values))


def seminorm_frak(
    u: Callable,
    params: ModelParams,
    domain: Domain = None,
    part: Part = Part.OMEGA1,
) -> float:
    """Seminorm of the heterogeneous-horizon space on a part."""
    domain = domain or Domain()
    if params.delta <= 0:
        raise ModeError("The heterogeneous-horizon seminorm needs delta > 0")
    params.validate_for(domain)
    return frak_integral(u, params, domain, part) ** (1.0 / params.p)


def seminorm_frac(
    u: Callable,
    params: ModelParams,
    domain: Domain = None,
    part: Part = Part.OMEGA2,
) -> float:
    """Regional Gagliardo seminorm on a part, normalized by kappa_{d,s,p}."""
    domain = domain or Domain()
    if params.s >= 1:
        raise ModeError("The fractional seminorm needs s < 1, use the local seminorm")
    return frac_integral(u, params, domain, part) ** (1.0 / params.p)


def seminorm_weighted(
    u: Callable,
    params: ModelParams,
    domain: Domain = None,
    part: Part = Part.OMEGA1,
) -> float:
    """Gradient seminorm with weight sigma^(p - sp), the plain W^{1,p} one for s = 1."""
    domain = domain or Domain()
    return weighted_integral(u, params, domain, part) ** (1.0 / params.p)


def _continuous_breakdown(
    pair: FunctionPair,
    params: ModelParams,
    coeffs: CoefficientField,
    potential: Potential,
    loads: LoadSpec,
    domain: Domain,
) -> EnergyBreakdown:
    p = params.p
    if params.mode.is_nonlocal:
        part1 = frak_integral(pair.u1, params, domain, Part.OMEGA1, coeffs.sample_alpha, potential)
    else:
        part1 = weighted_integral(
            pair.u1, params, domain, Part.OMEGA1, coeffs.sample_alpha, potential
        )
    if params.mode.is_fractional:
        part2 = frac_integral(pair.u2, params, domain, Part.OMEGA2, coeffs.sample_beta, potential)
    else:
        part2 = weighted_integral(
            pair.u2, params, domain, Part.OMEGA2, coeffs.sample_beta, potential, weighted=False
        )
    load = 0.0
    for func, u, part in ((loads.f1, pair.u1, Part.OMEGA1), (loads.f2, pair.u2, Part.OMEGA2)):
        if func is not None:
            x, w = _part_rule(u, domain, part)
            load += float(np.dot(w, np.asarray(func(x)) * np.asarray(u(x))))
    return EnergyBreakdown(part1 / p, part2 / p, load)


def energy_eval(
    pair,
    params: ModelParams,
    coeffs: CoefficientField = None,
    potential: Potential = None,
    loads: LoadSpec = None,
    domain: Domain = None,
) -> EnergyBreakdown:
    """Energy of a discrete or continuous pair in the mode of params.

    Coefficients weight the x-slot of the double integrals.
    """
    coeffs = coeffs or CoefficientField()
    potential = potential or make_potential(params.p)
    loads = loads or LoadSpec()
    if potential.p != params.p:
        raise ModeError(
            f"Potential exponent {potential.p} does not match p={params.p}"
        )
    if isinstance(pair, FieldPair):
        form1, form2 = build_forms(params, coeffs, pair.layout, potential)
        load = float(np.dot(load_vector(loads.f1, loads.f2, pair.layout), pair.values))
        return EnergyBreakdown(
            form1.energy(pair.values), form2.energy(pair.values), load
        )
    if isinstance(pair, FunctionPair):
        domain = domain or Domain()
        params.validate_for(domain)
        return _continuous_breakdown(pair, params, coeffs, potential, loads, domain)
    raise ModeError(f"Cannot evaluate an energy of {type(pair).__name__}")


class LinearSystem(NamedTuple):
    """Quadratic energy 1/2 u^T A u - b^T u over the free dofs."""

    matrix: np.ndarray
    rhs: np.ndarray
    free_dofs: np.ndarray


def assemble_p2(
    params: ModelParams,
    coeffs: CoefficientField,
    mesh: Mesh,
    loads: LoadSpec = None,
) -> LinearSystem:
    """Dense matrix and load vector of the p = 2 energy.

    The interface value is shared and Dirichlet values are eliminated.
    """
    if params.p != 2:
        raise ModeError(f"Quadratic assembly needs p = 2, got p={params.p}")
    loads = loads or LoadSpec()
    layout = Layout(mesh)
    form1, form2 = build_forms(params, coeffs, layout, make_potential(2.0))
    zero = np.zeros(layout.size)
    matrix = form1.hessian(zero) + form2.hessian(zero)
    rhs = load_vector(loads.f1, loads.f2, layout)
    free = np.arange(1, layout.size - 1)
    reduced = matrix[np.ix_(free, free)]
    logger.debug("Assembled %d x %d system for %s", free.size, free.size, params.mode.value)
    return LinearSystem(0.5 * (reduced + reduced.T), rhs[free], free)
