"""Traces, transmission, boundary-data extension and functional inequalities."""

import logging
from typing import Callable, NamedTuple, Union

import numpy as np
from scipy import integrate, linalg, sparse

from . import __title__
from .app_settings import NTL_QUADRATURE_ORDER
from .core.fields import PiecewiseLinear, hat_matrix
from .core.quadrature import composite_rule
from .energies import FunctionPair, assemble_p2, energy_eval
from .exceptions import ModeError, ParameterError
from .forms import FieldPair, Layout, build_forms
from .geometry import Domain, Mesh, Part
from .kernels import CoefficientField, ModelParams, kappa_dsp
from .library import Potential, make_potential
from .utils import LoggerAddTag

logger = LoggerAddTag(logging.getLogger(__name__), __title__)

__all__ = [
    "BoundaryData",
    "FieldPair",
    "Trace",
    "extend_boundary_data",
    "hardy_constant",
    "hardy_lower_bound",
    "lp_distance",
    "lp_norm",
    "mass_matrix",
    "poincare_constant",
    "poincare_ratio",
    "trace",
    "transmission_residual",
]


class BoundaryData(NamedTuple):
    """Interface value g0 and Dirichlet values g1 at a and g2 at b."""

    g0: float = 0.0
    g1: float = 0.0
    g2: float = 0.0

    @property
    def is_homogeneous(self) -> bool:
        return self.g0 == 0 and self.g1 == 0 and self.g2 == 0

    def scaled(self, factor: float) -> "BoundaryData":
        return BoundaryData(*(factor * value for value in self))


class Trace(NamedTuple):
    lower: float
    upper: float


def trace(
    field: Union[FieldPair, PiecewiseLinear, Callable],
    params: ModelParams,
    part: Part = Part.OMEGA1,
    domain: Domain = None,
) -> Trace:
    """Values at both ends of a part. Only defined for sp > 1.

    Accepts a pair, a piecewise-linear field or a continuous handle
    together with the domain it lives on.
    """
    params.require_trace()
    if isinstance(field, FieldPair):
        values = field.nodal(part)
        return Trace(float(values[0]), float(values[-1]))
    if isinstance(field, PiecewiseLinear):
        return Trace(float(field.values[0]), float(field.values[-1]))
    lower, upper = (domain or Domain()).bounds(part)
    return Trace(float(field(lower)), float(field(upper)))


def transmission_residual(pair: FieldPair, g0: float = 0.0) -> float:
    """|T1 u1 - T2 u2 - g0| at the interface."""
    layout = pair.layout
    first = pair.values[layout.first_interface]
    second = pair.values[layout.second_interface]
    return float(abs(first - second - g0))


def _part_values(field, part: Part, x: np.ndarray) -> np.ndarray:
    if isinstance(field, FieldPair):
        return field.function(part)(x)
    if isinstance(field, FunctionPair):
        return np.asarray(field.u1(x) if Part(part) is Part.OMEGA1 else field.u2(x))
    return np.asarray(field(x), dtype=float)


def lp_distance(first: FieldPair, second, p: float = 2.0) -> float:
    """Distance in L^p(Omega_1) x L^p(Omega_2), element-wise Gauss on the mesh.

    `second` may be a pair, a FunctionPair or one handle used on both parts.
    """
    mesh = first.mesh
    total = 0.0
    for part in (Part.OMEGA1, Part.OMEGA2):
        x, w = composite_rule(mesh.part_nodes(part), NTL_QUADRATURE_ORDER)
        difference = first.function(part)(x)
        if second is not None:
            difference = difference - _part_values(second, part, x)
        total += float(np.dot(w, np.abs(difference) ** p))
    return total ** (1.0 / p)


def lp_norm(pair: FieldPair, p: float = 2.0) -> float:
    return lp_distance(pair, None, p)


def extend_boundary_data(
    g: BoundaryData,
    params: ModelParams,
    mesh: Mesh,
    coeffs: CoefficientField = None,
) -> FieldPair:
    """Minimal-energy field with value g0 at the interface and g1, g2 at the ends."""
    if params.p != 2:
        raise ModeError(f"The extension needs p = 2, got p={params.p}")
    params.require_trace()
    coeffs = coeffs or CoefficientField()
    layout = Layout(mesh)
    form1, form2 = build_forms(params, coeffs, layout, make_potential(2.0))
    zero = np.zeros(layout.size)
    matrix = form1.hessian(zero) + form2.hessian(zero)
    fixed = np.array([0, layout.first_interface, layout.size - 1])
    free = np.setdiff1d(np.arange(layout.size), fixed)
    values = np.zeros(layout.size)
    values[fixed] = (g.g1, g.g0, g.g2)
    rhs = -matrix[np.ix_(free, fixed)] @ values[fixed]
    values[free] = linalg.solve(matrix[np.ix_(free, free)], rhs, assume_a="pos")
    return FieldPair(layout, values)


def poincare_ratio(
    pair: FieldPair,
    params: ModelParams,
    coeffs: CoefficientField = None,
    potential: Potential = None,
) -> float:
    """||(u1, u2)||_p / (p E(u1, u2))^(1/p), zero for the zero field."""
    norm = lp_norm(pair, params.p)
    if norm == 0:
        return 0.0
    breakdown = energy_eval(pair, params, coeffs, potential)
    energy = breakdown.part1_energy + breakdown.part2_energy
    return norm / (params.p * energy) ** (1.0 / params.p)


def mass_matrix(mesh: Mesh) -> np.ndarray:
    """L^2 mass matrix of the shared layout."""
    layout = Layout(mesh)
    result = np.zeros((layout.size, layout.size))
    for part in (Part.OMEGA1, Part.OMEGA2):
        x, w = composite_rule(mesh.part_nodes(part), NTL_QUADRATURE_ORDER)
        evaluation = hat_matrix(mesh.part_nodes(part), x, layout.columns(part), layout.size)
        result += (evaluation.T @ (sparse.diags(w) @ evaluation)).toarray()
    return result


def poincare_constant(
    params: ModelParams, coeffs: CoefficientField, mesh: Mesh
) -> float:
    """Best discrete Poincare constant for p = 2 from the generalized eigenproblem (A, M)."""
    system = assemble_p2(params, coeffs, mesh)
    free = system.free_dofs
    mass = mass_matrix(mesh)[np.ix_(free, free)]
    smallest = linalg.eigh(
        system.matrix, mass, eigvals_only=True, subset_by_index=[0, 0]
    )[0]
    if smallest <= 0:
        raise ModeError(f"Energy matrix is not positive definite: {smallest:.3g}")
    return float(smallest ** -0.5)


def hardy_constant(s: float, p: float) -> float:
    """Sharp half-line Hardy constant 2 * integral_0^1 |1 - r^g|^p / (1 - r)^(1 + sp) dr, g = (sp - 1)/p."""
    sp = s * p
    if sp <= 1:
        raise ParameterError(f"sp > 1 required, got sp={sp:.6g}")
    exponent = (sp - 1.0) / p

    def quotient(r):
        if r >= 1.0:
            return exponent ** p
        return (-np.expm1(exponent * np.log(r)) / (1.0 - r)) ** p if r > 0 else 1.0

    value, _ = integrate.quad(
        quotient,
        0.0,
        1.0,
        weight="alg",
        wvar=(0.0, p - 1.0 - sp),
        epsabs=1e-14,
        epsrel=1e-12,
        limit=200,
    )
    return 2.0 * value


def hardy_lower_bound(s: float, p: float) -> float:
    """((sp - 1)/p)^p / kappa_{1,s,p}."""
    return ((s * p - 1.0) / p) ** p / kappa_dsp(1, s, p)
