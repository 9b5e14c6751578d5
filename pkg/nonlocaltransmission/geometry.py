"""Partitioned interval, distance and localization functions, nodal mesh."""

import logging
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Tuple

import numpy as np

from . import __title__
from .exceptions import DomainError, ParameterError
from .utils import LoggerAddTag

logger = LoggerAddTag(logging.getLogger(__name__), __title__)


class Part(IntEnum):
    OMEGA1 = 1
    OMEGA2 = 2


class NodeMarker(str, Enum):
    INTERIOR1 = "interior1"
    INTERIOR2 = "interior2"
    INTERFACE = "interface"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class Domain:
    """The interval (a, b) split at xi into Omega_1 = (a, xi) and Omega_2 = (xi, b)."""

    a: float = -1.0
    b: float = 1.0
    xi: float = 0.0
    kappa0: float = 1.0
    kappa1: float = 1.0
    dim: int = 1

    def __post_init__(self):
        if self.dim != 1:
            raise DomainError(f"Only dimension 1 is supported, got {self.dim}")
        if not self.a < self.xi < self.b:
            raise DomainError(
                f"Need a < xi < b, got a={self.a}, xi={self.xi}, b={self.b}"
            )
        if self.kappa0 < 1:
            raise DomainError(f"kappa0 must be >= 1, got {self.kappa0}")
        if self.kappa1 <= 0:
            raise DomainError(f"kappa1 must be > 0, got {self.kappa1}")

    def bounds(self, part: Part) -> Tuple[float, float]:
        part = Part(part)
        return (self.a, self.xi) if part is Part.OMEGA1 else (self.xi, self.b)

    def length(self, part: Part) -> float:
        lower, upper = self.bounds(part)
        return upper - lower

    def contains(self, part: Part, x, closed: bool = True) -> np.ndarray:
        lower, upper = self.bounds(part)
        x = np.asarray(x, dtype=float)
        if closed:
            return (x >= lower) & (x <= upper)
        return (x > lower) & (x < upper)


def _as_output(values: np.ndarray, x):
    return float(values) if np.ndim(x) == 0 else values


def sigma(domain: Domain, part: Part, x):
    """Distance of x to the boundary of the given part."""
    x_array = np.asarray(x, dtype=float)
    if not np.all(domain.contains(part, x_array)):
        raise DomainError(f"Points outside of the closure of part {int(part)}")
    lower, upper = domain.bounds(part)
    return _as_output(np.minimum(x_array - lower, upper - x_array), x)


def eta(domain: Domain, part: Part, x):
    """Generalized distance function. In 1D this is sigma itself."""
    return sigma(domain, part, x)


def delta_threshold(domain: Domain) -> float:
    """Largest admissible horizon: all kernel supports stay inside the parts below it."""
    return min(1.0 / domain.kappa0, 1.0 / domain.kappa1) / 3.0


@dataclass(frozen=True, eq=False)
class Mesh:
    """Uniform nodes on both parts with a single shared node at the interface."""

    domain: Domain
    n_per_side: int
    nodes: np.ndarray = field(repr=False)
    markers: Tuple[NodeMarker, ...] = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def interface_index(self) -> int:
        return self.n_per_side

    @property
    def element_lengths(self) -> np.ndarray:
        return np.diff(self.nodes)

    def part_nodes(self, part: Part) -> np.ndarray:
        n = self.n_per_side
        return self.nodes[: n + 1] if Part(part) is Part.OMEGA1 else self.nodes[n:]

    def part_h(self, part: Part) -> float:
        return self.domain.length(part) / self.n_per_side


def make_mesh(domain: Domain, n_per_side: int) -> Mesh:
    """Uniform mesh with n_per_side elements on each part."""
    n_per_side = int(n_per_side)
    if n_per_side < 2:
        raise ParameterError(f"n_per_side must be at least 2, got {n_per_side}")
    left = np.linspace(domain.a, domain.xi, n_per_side + 1)
    right = np.linspace(domain.xi, domain.b, n_per_side + 1)
    nodes = np.concatenate((left, right[1:]))
    nodes[n_per_side] = domain.xi
    nodes.setflags(write=False)
    markers = (
        [NodeMarker.DIRICHLET]
        + [NodeMarker.INTERIOR1] * (n_per_side - 1)
        + [NodeMarker.INTERFACE]
        + [NodeMarker.INTERIOR2] * (n_per_side - 1)
        + [NodeMarker.DIRICHLET]
    )
    logger.debug("Created mesh with %d nodes for %s", nodes.size, domain)
    return Mesh(domain=domain, n_per_side=n_per_side, nodes=nodes, markers=tuple(markers))
