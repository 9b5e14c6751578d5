"""Continuous piecewise-linear fields and evaluation of hat functions."""

import logging
from typing import Optional, Sequence

import numpy as np
from scipy import sparse

from .. import __title__
from ..utils import LoggerAddTag

logger = LoggerAddTag(logging.getLogger(__name__), __title__)


def locate(nodes: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Index of the element [nodes[i], nodes[i+1]] containing each point.

    Points on a node belong to the element on the right, except for the last node.
    """
    index = np.searchsorted(nodes, points, side="right") - 1
    return np.clip(index, 0, nodes.size - 2)


def hat_matrix(
    nodes: Sequence[float],
    points,
    columns: Optional[Sequence[int]] = None,
    n_columns: Optional[int] = None,
) -> sparse.csr_matrix:
    """Sparse matrix Phi with Phi[i, k] = phi_k(points[i]).

    `columns` maps the local node numbers onto columns of a larger layout
    with `n_columns` columns.
    """
    nodes = np.asarray(nodes, dtype=float)
    points = np.asarray(points, dtype=float).ravel()
    outside = np.count_nonzero((points < nodes[0]) | (points > nodes[-1]))
    if outside:
        logger.debug("Extrapolating hat functions at %d points", outside)
    element = locate(nodes, points)
    left = nodes[element]
    lam = (points - left) / (nodes[element + 1] - left)
    rows = np.repeat(np.arange(points.size), 2)
    local = np.stack((element, element + 1), axis=1).ravel()
    values = np.stack((1.0 - lam, lam), axis=1).ravel()
    if columns is None:
        cols = local
        n_columns = nodes.size
    else:
        cols = np.asarray(columns)[local]
        n_columns = n_columns if n_columns is not None else int(np.max(columns)) + 1
    return sparse.csr_matrix((values, (rows, cols)), shape=(points.size, n_columns))


class PiecewiseLinear:
    """Continuous piecewise-linear function given by nodal values."""

    def __init__(self, nodes: Sequence[float], values: Sequence[float]) -> None:
        nodes = np.array(nodes, dtype=float)
        values = np.array(values, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2 or nodes.shape != values.shape:
            raise ValueError("nodes and values must be 1D arrays of equal length >= 2")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        nodes.setflags(write=False)
        values.setflags(write=False)
        self._nodes = nodes
        self._values = values

    def __repr__(self) -> str:
        return "{}(n_nodes={}, interval=({}, {}))".format(
            type(self).__name__, self._nodes.size, self._nodes[0], self._nodes[-1]
        )

    @property
    def nodes(self) -> np.ndarray:
        return self._nodes

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def breakpoints(self) -> np.ndarray:
        return self._nodes

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self._values) / np.diff(self._nodes)

    def __call__(self, x):
        return np.interp(x, self._nodes, self._values)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return self.slopes[locate(self._nodes, x)]
