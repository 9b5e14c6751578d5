"""Gauss rules on intervals, composite and graded rules, windows around points.

All rules are returned as `(nodes, weights)` numpy arrays. Rules which are
cached are returned as read-only arrays.
"""

import logging
from functools import lru_cache
from typing import Iterable, NamedTuple, Tuple

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .. import __title__
from ..app_settings import (
    NTL_GRADING_LEVELS,
    NTL_GRADING_RATIO,
    NTL_OUTER_CELLS,
    NTL_QUADRATURE_ORDER,
)
from ..utils import LoggerAddTag

logger = LoggerAddTag(logging.getLogger(__name__), __title__)


class QuadratureRule(NamedTuple):
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


def _frozen(*arrays: np.ndarray) -> Tuple[np.ndarray, ...]:
    for array in arrays:
        array.setflags(write=False)
    return arrays


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> QuadratureRule:
    """Gauss-Legendre rule on [-1, 1]."""
    nodes, weights = roots_legendre(int(order))
    return QuadratureRule(*_frozen(np.asarray(nodes), np.asarray(weights)))


@lru_cache(maxsize=None)
def gauss_jacobi(order: int, alpha: float, beta: float) -> QuadratureRule:
    """Gauss-Jacobi rule on [-1, 1] for the weight (1-x)^alpha (1+x)^beta."""
    nodes, weights = roots_jacobi(int(order), float(alpha), float(beta))
    return QuadratureRule(*_frozen(np.asarray(nodes), np.asarray(weights)))


def map_rule(rule: QuadratureRule, left, right) -> QuadratureRule:
    """Map a rule on [-1, 1] onto intervals.

    `left` and `right` may be arrays of the same shape S.
    The result has shape S + (order,).
    """
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    nodes = mid[..., None] + half[..., None] * rule.nodes
    weights = half[..., None] * rule.weights
    return QuadratureRule(nodes, weights)


def composite_rule(breakpoints: Iterable[float], order: int = None) -> QuadratureRule:
    """Gauss-Legendre of given order on every cell between sorted breakpoints."""
    order = order or NTL_QUADRATURE_ORDER
    points = np.unique(np.asarray(list(breakpoints), dtype=float))
    if points.size < 2:
        return QuadratureRule(np.zeros(0), np.zeros(0))
    mapped = map_rule(gauss_legendre(order), points[:-1], points[1:])
    return QuadratureRule(mapped.nodes.ravel(), mapped.weights.ravel())


def graded_points(left: float, right: float, toward: str, levels: int, ratio: float):
    """Breakpoints of [left, right] graded geometrically toward one end."""
    scales = ratio ** np.arange(levels, -1, -1, dtype=float)
    if toward == "left":
        return np.concatenate(([left], left + (right - left) * scales))
    if toward == "right":
        return np.concatenate((right - (right - left) * scales[::-1], [right]))
    raise ValueError(f"Invalid value for toward: {toward}")


def outer_rule(
    left: float,
    right: float,
    breakpoints: Iterable[float] = (),
    order: int = None,
    levels: int = None,
    ratio: float = None,
    n_cells: int = None,
) -> QuadratureRule:
    """Composite rule on [left, right] for integrands singular at both ends.

    The interval is split into `n_cells` uniform cells and additionally at all
    given breakpoints inside it. The first and last cells are graded
    geometrically toward the ends.
    """
    order = order or NTL_QUADRATURE_ORDER
    levels = levels or NTL_GRADING_LEVELS
    ratio = ratio or NTL_GRADING_RATIO
    n_cells = n_cells or NTL_OUTER_CELLS
    inner = [x for x in breakpoints if left < x < right]
    points = np.unique(np.concatenate((np.linspace(left, right, n_cells + 1), inner)))
    graded_left = graded_points(points[0], points[1], "left", levels, ratio)
    graded_right = graded_points(points[-2], points[-1], "right", levels, ratio)
    if points.size == 2:
        # single cell: grade both halves
        mid = 0.5 * (left + right)
        graded_left = graded_points(left, mid, "left", levels, ratio)
        graded_right = graded_points(mid, right, "right", levels, ratio)
    all_points = np.concatenate((graded_left, points, graded_right))
    return composite_rule(all_points, order)


@lru_cache(maxsize=None)
def singular_unit_rule(
    beta: float, order: int, levels: int, ratio: float
) -> QuadratureRule:
    """Rule for integrals of t^beta g(t) over [0, 1] with smooth g.

    The weights include the factor t^beta. Cells are graded geometrically
    toward 0 and the innermost cell carries a Gauss-Jacobi rule.
    """
    if beta <= -1:
        raise ValueError("beta must be larger than -1")
    nodes, weights = [], []
    plain = gauss_legendre(order)
    for level in range(levels):
        right = ratio ** level
        left = ratio ** (level + 1)
        cell = map_rule(plain, left, right)
        nodes.append(cell.nodes)
        weights.append(cell.weights * cell.nodes ** beta)
    innermost = ratio ** levels
    jacobi = gauss_jacobi(order, 0.0, beta)
    nodes.append(0.5 * innermost * (1.0 + jacobi.nodes))
    weights.append((0.5 * innermost) ** (1.0 + beta) * jacobi.weights)
    return QuadratureRule(*_frozen(np.concatenate(nodes), np.concatenate(weights)))


@lru_cache(maxsize=None)
def duffy_corner_rule(beta: float, order: int) -> QuadratureRule:
    """Rule on the unit square for integrands singular at the origin.

    Returns nodes (a, b) of shape (n, 2) and weights which include the factor
    rho^beta with rho = max(a, b). An integral of (h_a a + h_b b)^beta g(a, b)
    is approximated by sum(w * ((h_a a + h_b b) / rho)^beta * g).

    Each of the triangles a >= b and b >= a is mapped onto the unit square by
    (rho, theta) -> (rho, rho * theta). The Jacobian rho and rho^beta are
    absorbed into a Gauss-Jacobi rule in rho.
    """
    jacobi = gauss_jacobi(order, 0.0, 1.0 + beta)
    rho = 0.5 * (1.0 + jacobi.nodes)
    rho_weights = 0.5 ** (2.0 + beta) * jacobi.weights
    plain = map_rule(gauss_legendre(order), 0.0, 1.0)
    theta, theta_weights = plain.nodes, plain.weights
    rr, tt = np.meshgrid(rho, theta, indexing="ij")
    ww = np.outer(rho_weights, theta_weights)
    first = np.stack((rr, rr * tt), axis=-1).reshape(-1, 2)
    second = np.stack((rr * tt, rr), axis=-1).reshape(-1, 2)
    nodes = np.concatenate((first, second))
    weights = np.concatenate((ww.ravel(), ww.ravel()))
    return QuadratureRule(*_frozen(nodes, weights))


def window_rule(centers, radii, breakpoints, order: int) -> QuadratureRule:
    """Rules on the windows [c - r, c + r] split at c and at all breakpoints.

    Returns nodes and weights of shape (len(centers), K). Rows are padded
    with zero-weight nodes so that all rows have the same length.
    """
    centers = np.asarray(centers, dtype=float)
    radii = np.asarray(radii, dtype=float)
    lower = centers - radii
    upper = centers + radii
    columns = [lower[:, None], centers[:, None], upper[:, None]]
    points = np.asarray(breakpoints, dtype=float)
    if points.size:
        first = np.searchsorted(points, lower, side="right")
        last = np.searchsorted(points, upper, side="left")
        width = int(max(np.max(last - first, initial=0), 0))
        if width:
            index = np.minimum(first[:, None] + np.arange(width), points.size - 1)
            columns.append(np.clip(points[index], lower[:, None], upper[:, None]))
    edges = np.sort(np.concatenate(columns, axis=1), axis=1)
    mapped = map_rule(gauss_legendre(order), edges[:, :-1], edges[:, 1:])
    n_rows = centers.size
    return QuadratureRule(
        mapped.nodes.reshape(n_rows, -1), mapped.weights.reshape(n_rows, -1)
    )
