"""Discrete energy forms of piecewise-linear fields.

Every part energy of a nodal vector u is written as a sum of terms

    (c_k / p) * l_k^p * rho(|d_k| / l_k),    d = B u,

with a sparse difference matrix B, positive coefficients c and lengths l.
For rho(r) = r^p this is (c_k / p) |d_k|^p. The same rows give the energy,
its gradient and its Hessian, so all three come from one quadrature.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import sparse

from . import __title__
from .app_settings import (
    NTL_FAR_FIELD_ORDER,
    NTL_GRADING_LEVELS,
    NTL_GRADING_RATIO,
    NTL_INNER_ORDER,
    NTL_QUADRATURE_ORDER,
)
from .constants import HESSIAN_FLOOR
from .core.fields import PiecewiseLinear, hat_matrix, locate
from .core.quadrature import (
    QuadratureRule,
    composite_rule,
    duffy_corner_rule,
    gauss_legendre,
    graded_points,
    map_rule,
    outer_rule,
    window_rule,
)
from .geometry import Mesh, Part, sigma
from .kernels import CoefficientField, ModelParams, cbar_dp, kappa_dsp
from .library import Potential
from .utils import LoggerAddTag

logger = LoggerAddTag(logging.getLogger(__name__), __title__)


@dataclass(frozen=True, eq=False)
class Layout:
    """Placement of the nodal values of both parts in one vector.

    With a shared interface the vector has 2n+1 entries and the interface
    value is stored once. With a split interface it has 2n+2 entries and
    each part stores its own interface value.
    """

    mesh: Mesh
    split: bool = False

    @property
    def size(self) -> int:
        return 2 * self.mesh.n_per_side + (2 if self.split else 1)

    @property
    def first_interface(self) -> int:
        return self.mesh.n_per_side

    @property
    def second_interface(self) -> int:
        return self.mesh.n_per_side + (1 if self.split else 0)

    def columns(self, part: Part) -> np.ndarray:
        n = self.mesh.n_per_side
        if Part(part) is Part.OMEGA1:
            return np.arange(n + 1)
        return np.arange(n + 1) + self.second_interface


class FieldPair:
    """Piecewise-linear pair (u1, u2) stored as one nodal vector over a layout.

    With a shared interface T1 u1 = T2 u2 holds by storage.
    """

    def __init__(self, layout: Layout, values) -> None:
        values = np.array(values, dtype=float)
        if values.shape != (layout.size,):
            raise ValueError(
                f"Expected {layout.size} nodal values, got shape {values.shape}"
            )
        values.setflags(write=False)
        self.layout = layout
        self.values = values

    def __repr__(self) -> str:
        return "{}(n_per_side={}, split={})".format(
            type(self).__name__, self.mesh.n_per_side, self.split
        )

    @classmethod
    def zeros(cls, mesh: Mesh, split: bool = False) -> "FieldPair":
        layout = Layout(mesh, split)
        return cls(layout, np.zeros(layout.size))

    @classmethod
    def from_parts(cls, mesh: Mesh, values1, values2) -> "FieldPair":
        """Pair from nodal values per part, split when the interface values differ."""
        values1 = np.asarray(values1, dtype=float)
        values2 = np.asarray(values2, dtype=float)
        split = bool(values1[-1] != values2[0])
        if split:
            values = np.concatenate((values1, values2))
        else:
            values = np.concatenate((values1, values2[1:]))
        return cls(Layout(mesh, split), values)

    @classmethod
    def interpolate(cls, mesh: Mesh, u1, u2=None, split: bool = False) -> "FieldPair":
        """Nodal interpolation of function handles on both parts."""
        u2 = u1 if u2 is None else u2
        values1 = np.asarray(u1(mesh.part_nodes(Part.OMEGA1)), dtype=float)
        values2 = np.asarray(u2(mesh.part_nodes(Part.OMEGA2)), dtype=float)
        if split:
            return cls(Layout(mesh, True), np.concatenate((values1, values2)))
        return cls.from_parts(mesh, values1, np.concatenate(([values1[-1]], values2[1:])))

    @property
    def mesh(self) -> Mesh:
        return self.layout.mesh

    @property
    def split(self) -> bool:
        return self.layout.split

    def nodal(self, part: Part) -> np.ndarray:
        return self.values[self.layout.columns(part)]

    def function(self, part: Part) -> PiecewiseLinear:
        return PiecewiseLinear(self.mesh.part_nodes(part), self.nodal(part))

    @property
    def u1(self) -> PiecewiseLinear:
        return self.function(Part.OMEGA1)

    @property
    def u2(self) -> PiecewiseLinear:
        return self.function(Part.OMEGA2)

    def with_values(self, values) -> "FieldPair":
        return type(self)(self.layout, values)


class DifferenceForm:
    """Sum over rows of (c/p) l^p rho(|(B u)| / l)."""

    def __init__(
        self,
        matrix: sparse.spmatrix,
        coefficients: np.ndarray,
        lengths: np.ndarray,
        potential: Potential,
        label: str = "",
    ) -> None:
        self.matrix = sparse.csr_matrix(matrix)
        self.lengths = np.asarray(lengths, dtype=float)
        self.potential = potential
        self.label = label
        p = potential.p
        coefficients = np.asarray(coefficients, dtype=float)
        self._energy_weights = coefficients * self.lengths ** p / p
        self._gradient_weights = coefficients * self.lengths ** (p - 1) / p
        self._hessian_weights = coefficients * self.lengths ** (p - 2) / p

    def __repr__(self) -> str:
        return "{}(label='{}', rows={})".format(
            type(self).__name__, self.label, self.matrix.shape[0]
        )

    @property
    def n_columns(self) -> int:
        return self.matrix.shape[1]

    def _ratios(self, u: np.ndarray):
        differences = self.matrix @ np.asarray(u, dtype=float)
        return differences, np.abs(differences) / self.lengths

    def energy(self, u: np.ndarray) -> float:
        _, ratios = self._ratios(u)
        return float(np.dot(self._energy_weights, self.potential.rho(ratios)))

    def gradient(self, u: np.ndarray) -> np.ndarray:
        differences, ratios = self._ratios(u)
        rows = (
            self._gradient_weights
            * self.potential.drho(ratios)
            * np.sign(differences)
        )
        return self.matrix.T @ rows

    def hessian(self, u: np.ndarray) -> np.ndarray:
        _, ratios = self._ratios(u)
        rows = self._hessian_weights * self.potential.d2rho(
            np.maximum(ratios, HESSIAN_FLOOR)
        )
        result = (self.matrix.T @ (sparse.diags(rows) @ self.matrix)).toarray()
        return 0.5 * (result + result.T)


class KernelForm:
    """Sum over all point pairs (q, q') of (K/p) l^p rho(|U_q - U_q'| / l), U = Phi u."""

    def __init__(
        self,
        evaluation: sparse.spmatrix,
        kernel: np.ndarray,
        lengths: np.ndarray,
        potential: Potential,
        label: str = "",
    ) -> None:
        self.evaluation = sparse.csr_matrix(evaluation)
        self.lengths = np.asarray(lengths, dtype=float)
        self.potential = potential
        self.label = label
        p = potential.p
        kernel = np.asarray(kernel, dtype=float)
        self._energy_weights = kernel * self.lengths ** p / p
        self._gradient_weights = kernel * self.lengths ** (p - 1) / p
        self._hessian_weights = kernel * self.lengths ** (p - 2) / p

    def __repr__(self) -> str:
        return "{}(label='{}', points={})".format(
            type(self).__name__, self.label, self.evaluation.shape[0]
        )

    @property
    def n_columns(self) -> int:
        return self.evaluation.shape[1]

    def _ratios(self, u: np.ndarray):
        values = self.evaluation @ np.asarray(u, dtype=float)
        differences = values[:, None] - values[None, :]
        return differences, np.abs(differences) / self.lengths

    def energy(self, u: np.ndarray) -> float:
        _, ratios = self._ratios(u)
        return float(np.sum(self._energy_weights * self.potential.rho(ratios)))

    def gradient(self, u: np.ndarray) -> np.ndarray:
        differences, ratios = self._ratios(u)
        pairs = (
            self._gradient_weights
            * self.potential.drho(ratios)
            * np.sign(differences)
        )
        return self.evaluation.T @ (pairs.sum(axis=1) - pairs.sum(axis=0))

    def hessian(self, u: np.ndarray) -> np.ndarray:
        _, ratios = self._ratios(u)
        pairs = self._hessian_weights * self.potential.d2rho(
            np.maximum(ratios, HESSIAN_FLOOR)
        )
        point_hessian = np.diag(pairs.sum(axis=1) + pairs.sum(axis=0)) - (
            pairs + pairs.T
        )
        evaluation = self.evaluation.toarray()
        result = evaluation.T @ point_hessian @ evaluation
        return 0.5 * (result + result.T)


class CompositeForm:
    """Sum of forms acting on the same layout."""

    def __init__(self, forms: Sequence) -> None:
        self.forms = tuple(forms)

    def __repr__(self) -> str:
        return "{}({})".format(type(self).__name__, ", ".join(map(repr, self.forms)))

    def energy(self, u: np.ndarray) -> float:
        return sum(form.energy(u) for form in self.forms)

    def gradient(self, u: np.ndarray) -> np.ndarray:
        return sum(form.gradient(u) for form in self.forms)

    def hessian(self, u: np.ndarray) -> np.ndarray:
        return sum(form.hessian(u) for form in self.forms)


def _slope_form(
    nodes: np.ndarray,
    columns: np.ndarray,
    size: int,
    masses: np.ndarray,
    potential: Potential,
    label: str,
) -> DifferenceForm:
    """Rows u_{e+1} - u_e with coefficient mass_e / h_e^p and length h_e."""
    n_elements = nodes.size - 1
    h = np.diff(nodes)
    rows = np.repeat(np.arange(n_elements), 2)
    cols = np.stack((columns[:-1], columns[1:]), axis=1).ravel()
    values = np.tile([-1.0, 1.0], n_elements)
    matrix = sparse.csr_matrix((values, (rows, cols)), shape=(n_elements, size))
    return DifferenceForm(matrix, masses / h ** potential.p, h, potential, label)


@lru_cache(maxsize=None)
def _two_sided_unit_rule(order: int, levels: int, ratio: float) -> QuadratureRule:
    points = np.concatenate(
        (
            graded_points(0.0, 0.5, "left", levels, ratio),
            graded_points(0.5, 1.0, "right", levels, ratio),
        )
    )
    return composite_rule(points, order)


def _part_outer_rule(mesh: Mesh, part: Part) -> QuadratureRule:
    lower, upper = mesh.domain.bounds(part)
    breakpoints = np.concatenate((mesh.part_nodes(part), [0.5 * (lower + upper)]))
    return outer_rule(lower, upper, breakpoints=breakpoints)


def build_part1_form(
    params: ModelParams,
    coeffs: CoefficientField,
    layout: Layout,
    potential: Potential,
) -> DifferenceForm:
    """Heterogeneous-horizon form (delta > 0) or weighted local form on Omega_1."""
    mesh = layout.mesh
    nodes = mesh.part_nodes(Part.OMEGA1)
    columns = layout.columns(Part.OMEGA1)
    p, sp = params.p, params.sp
    x, w = _part_outer_rule(mesh, Part.OMEGA1)
    distance = sigma(mesh.domain, Part.OMEGA1, x)
    alpha = coeffs.sample_alpha(x)
    if not params.mode.is_nonlocal:
        if params.s == 1:
            density = alpha
        else:
            density = alpha * distance ** (p - sp)
        masses = np.bincount(
            locate(nodes, x), weights=w * density, minlength=nodes.size - 1
        )
        return _slope_form(nodes, columns, layout.size, masses, potential, "weighted")

    delta = params.delta
    radius = delta * distance
    inner = window_rule(x, radius, nodes, NTL_INNER_ORDER)
    keep = inner.weights > 0
    outer_factor = cbar_dp(params.d, p) * alpha * w / (delta ** (1 + p) * distance ** (1 + sp))
    coefficients = (outer_factor[:, None] * inner.weights)[keep]
    lengths = np.broadcast_to(radius[:, None], inner.nodes.shape)[keep]
    x_rows = np.broadcast_to(x[:, None], inner.nodes.shape)[keep]
    y_rows = inner.nodes[keep]
    matrix = hat_matrix(nodes, x_rows, columns, layout.size) - hat_matrix(
        nodes, y_rows, columns, layout.size
    )
    logger.debug("Heterogeneous-horizon form with %d rows", coefficients.size)
    return DifferenceForm(matrix, coefficients, lengths, potential, "horizon")


def _own_cell_masses(params, coeffs, nodes) -> np.ndarray:
    """kappa * integral over e x e of beta(x) |x - y|^(p - 1 - sp) per element."""
    q = params.p - params.sp
    rule = _two_sided_unit_rule(NTL_QUADRATURE_ORDER, NTL_GRADING_LEVELS, NTL_GRADING_RATIO)
    left, h = nodes[:-1], np.diff(nodes)
    x = left[:, None] + h[:, None] * rule.nodes
    w = h[:, None] * rule.weights
    inner = ((x - left[:, None]) ** q + (left[:, None] + h[:, None] - x) ** q) / q
    beta = coeffs.sample_beta(x)
    return kappa_dsp(params.d, params.s, params.p) * np.sum(w * beta * inner, axis=1)


def _neighbour_form(params, coeffs, nodes, columns, size, potential) -> DifferenceForm:
    """Element pairs sharing a node, both orders, integrated with a corner rule."""
    exponent = params.p - 1 - params.sp
    rule = duffy_corner_rule(exponent, NTL_QUADRATURE_ORDER)
    a, b = rule.nodes[:, 0], rule.nodes[:, 1]
    corner = np.maximum(a, b)
    h = np.diff(nodes)
    shared = nodes[1:-1]
    h_left, h_right = h[:-1, None], h[1:, None]
    # x left of the shared node and y right of it, then the other way round
    cases = (
        (shared[:, None] - h_left * a, shared[:, None] + h_right * b, h_left, h_right),
        (shared[:, None] + h_right * a, shared[:, None] - h_left * b, h_right, h_left),
    )
    kappa = kappa_dsp(params.d, params.s, params.p)
    matrices, coefficients, lengths = [], [], []
    for x, y, h_x, h_y in cases:
        distance = h_x * a + h_y * b
        measure = h_x * h_y * rule.weights * (distance / corner) ** exponent
        beta = coeffs.sample_beta(x)
        coefficients.append((kappa * beta * measure / distance ** params.p).ravel())
        lengths.append(distance.ravel())
        matrices.append(
            hat_matrix(nodes, x.ravel(), columns, size)
            - hat_matrix(nodes, y.ravel(), columns, size)
        )
    return DifferenceForm(
        sparse.vstack(matrices),
        np.concatenate(coefficients),
        np.concatenate(lengths),
        potential,
        "neighbours",
    )


def _far_field_form(params, coeffs, nodes, columns, size, potential) -> KernelForm:
    """Element pairs at least one element apart, tensor Gauss."""
    n_elements = nodes.size - 1
    mapped = map_rule(gauss_legendre(NTL_FAR_FIELD_ORDER), nodes[:-1], nodes[1:])
    x, w = mapped.nodes.ravel(), mapped.weights.ravel()
    element = np.repeat(np.arange(n_elements), NTL_FAR_FIELD_ORDER)
    separated = np.abs(element[:, None] - element[None, :]) >= 2
    distance = np.where(separated, np.abs(x[:, None] - x[None, :]), 1.0)
    beta = coeffs.sample_beta(x)
    kernel = np.where(
        separated,
        kappa_dsp(params.d, params.s, params.p)
        * beta[:, None]
        * np.outer(w, w)
        / distance ** (params.d + params.sp),
        0.0,
    )
    evaluation = hat_matrix(nodes, x, columns, size)
    return KernelForm(evaluation, kernel, distance, potential, "far field")


def build_part2_form(
    params: ModelParams,
    coeffs: CoefficientField,
    layout: Layout,
    potential: Potential,
):
    """Regional fractional form (s < 1) or local form on Omega_2."""
    mesh = layout.mesh
    nodes = mesh.part_nodes(Part.OMEGA2)
    columns = layout.columns(Part.OMEGA2)
    if not params.mode.is_fractional:
        x, w = _part_outer_rule(mesh, Part.OMEGA2)
        masses = np.bincount(
            locate(nodes, x),
            weights=w * coeffs.sample_beta(x),
            minlength=nodes.size - 1,
        )
        return _slope_form(nodes, columns, layout.size, masses, potential, "local")

    own = _slope_form(
        nodes,
        columns,
        layout.size,
        _own_cell_masses(params, coeffs, nodes),
        potential,
        "own cells",
    )
    forms = [own, _neighbour_form(params, coeffs, nodes, columns, layout.size, potential)]
    if nodes.size > 3:
        forms.append(
            _far_field_form(params, coeffs, nodes, columns, layout.size, potential)
        )
    return CompositeForm(forms)


def load_vector(f1, f2, layout: Layout) -> np.ndarray:
    """Entries integral of f_i phi_k over the parts."""
    mesh = layout.mesh
    result = np.zeros(layout.size)
    for part, func in ((Part.OMEGA1, f1), (Part.OMEGA2, f2)):
        if func is None:
            continue
        x, w = _part_outer_rule(mesh, part)
        evaluation = hat_matrix(mesh.part_nodes(part), x, layout.columns(part), layout.size)
        result += evaluation.T @ (w * np.asarray(func(x), dtype=float))
    return result


def build_forms(
    params: ModelParams,
    coeffs: CoefficientField,
    layout: Layout,
    potential: Potential,
):
    """Forms of both part energies for the mode of params."""
    params.validate_for(layout.mesh.domain)
    form1 = build_part1_form(params, coeffs, layout, potential)
    form2 = build_part2_form(params, coeffs, layout, potential)
    logger.debug("Built forms %r and %r for %s", form1, form2, params.mode.value)
    return form1, form2
