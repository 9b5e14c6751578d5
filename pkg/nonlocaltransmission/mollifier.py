"""Radial mollifier, its boundary-localized dilation and the convolution K_delta."""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import integrate

from . import __title__
from .app_settings import NTL_MOLLIFIER_NODES
from .constants import MOLLIFIER_PLATEAU, MOLLIFIER_SUPPORT
from .core.quadrature import QuadratureRule, gauss_legendre, map_rule
from .exceptions import DomainError, ParameterError
from .geometry import Domain, Part, delta_threshold, eta
from .utils import LoggerAddTag

logger = LoggerAddTag(logging.getLogger(__name__), __title__)


@dataclass(frozen=True)
class Mollifier:
    """Bump exp(-1/(R^2 - r^2)) on |r| < R, normalized in dimension dim."""

    support_radius: float = MOLLIFIER_SUPPORT
    plateau: float = MOLLIFIER_PLATEAU
    dim: int = 1

    def __post_init__(self):
        if not 0 < self.plateau < self.support_radius < 1:
            raise ParameterError("Need 0 < plateau < support_radius < 1")
        if self.dim not in (1, 2):
            raise ParameterError(f"Mollifier supports dim 1 and 2, got {self.dim}")

    def profile(self, r):
        r = np.abs(np.asarray(r, dtype=float))
        radius_sq = self.support_radius ** 2
        inside = r < self.support_radius
        gap = np.where(inside, radius_sq - r ** 2, 1.0)
        return np.where(inside, np.exp(-1.0 / gap), 0.0)

    @cached_property
    def normalization(self) -> float:
        radius = self.support_radius
        if self.dim == 1:
            mass, _ = integrate.quad(
                lambda r: float(self.profile(r)), -radius, radius, epsabs=1e-14, epsrel=1e-13
            )
        else:
            mass, _ = integrate.quad(
                lambda r: 2.0 * np.pi * r * float(self.profile(r)),
                0.0,
                radius,
                epsabs=1e-14,
                epsrel=1e-13,
            )
        return 1.0 / mass

    def __call__(self, r):
        values = self.normalization * self.profile(r)
        return float(values) if np.ndim(values) == 0 else values

    def convolution_rule(self, order: int = None) -> QuadratureRule:
        """Nodes z_j in the support and weights psi(z_j) w_j summing to one."""
        order = order or NTL_MOLLIFIER_NODES
        rule = map_rule(gauss_legendre(order), -self.support_radius, self.support_radius)
        weights = self.profile(rule.nodes) * rule.weights
        return QuadratureRule(rule.nodes, weights / weights.sum())


DEFAULT_MOLLIFIER = Mollifier()


def psi(r):
    """The standard mollifier in one dimension."""
    return DEFAULT_MOLLIFIER(r)


def _check_delta(delta: float, domain: Domain) -> None:
    if not 0 < delta < delta_threshold(domain):
        raise ParameterError(
            f"delta must be in (0, {delta_threshold(domain):.6g}), got {delta}"
        )


def psi_delta(x, y, delta: float, domain: Domain, part: Part = Part.OMEGA1):
    """Dilation (delta eta(x))^-1 psi(|y - x| / (delta eta(x)))."""
    _check_delta(delta, domain)
    scale = delta * np.asarray(eta(domain, part, x))
    if np.any(scale <= 0):
        raise DomainError(
            "psi_delta is undefined on the boundary, use conv_Kdelta there"
        )
    values = psi(np.abs(np.asarray(y, dtype=float) - np.asarray(x)) / scale) / scale
    return float(values) if np.ndim(values) == 0 else values


class BoundaryConvolution:
    """x -> integral of psi(|z|) u(x - delta eta(x) z) dz over the unit ball.

    Reproduces affine functions and equals u on the boundary of the part.
    """

    def __init__(
        self,
        u: Callable,
        delta: float,
        domain: Domain,
        part: Part,
        mollifier: Mollifier = DEFAULT_MOLLIFIER,
    ) -> None:
        self.u = u
        self.delta = float(delta)
        self.domain = domain
        self.part = Part(part)
        self.rule = mollifier.convolution_rule()

    def __repr__(self) -> str:
        return "{}(u={!r}, delta={}, part={})".format(
            type(self).__name__, self.u, self.delta, int(self.part)
        )

    def __call__(self, x):
        x_array = np.asarray(x, dtype=float)
        scale = self.delta * np.asarray(eta(self.domain, self.part, x_array))
        points = x_array[..., None] - scale[..., None] * self.rule.nodes
        if not np.all(self.domain.contains(self.part, points)):
            raise DomainError("Quadrature nodes of K_delta left the part")
        values = np.asarray(self.u(points)) @ self.rule.weights
        return float(values) if np.ndim(values) == 0 else values


def conv_Kdelta(
    u: Callable,
    delta: float,
    domain: Domain,
    part: Part = Part.OMEGA1,
    mollifier: Mollifier = DEFAULT_MOLLIFIER,
) -> BoundaryConvolution:
    """Boundary-localized convolution of u, evaluated lazily."""
    _check_delta(delta, domain)
    return BoundaryConvolution(u, delta, domain, part, mollifier)


def psi_delta_mass_transpose(
    x: float, delta: float, domain: Domain, part: Part = Part.OMEGA1
) -> float:
    """Psi_delta(x) = integral of psi_delta(y, x) dy over the part."""
    _check_delta(delta, domain)
    center = float(eta(domain, part, x))
    if center <= 0:
        raise DomainError("Psi_delta needs an interior point")
    lower, upper = domain.bounds(part)
    # psi_delta(y, x) vanishes unless |x - y| < R delta eta(y) <= R delta (eta(x) + |x - y|)
    factor = MOLLIFIER_SUPPORT * delta
    reach = factor * center / (1.0 - factor)
    left, right = max(lower, x - reach), min(upper, x + reach)

    def integrand(y):
        scale = delta * float(eta(domain, part, y))
        if scale <= 0:
            return 0.0
        return float(psi(abs(x - y) / scale)) / scale

    value = 0.0
    for a, b in ((left, x), (x, right)):
        if b > a:
            piece, _ = integrate.quad(integrand, a, b, epsabs=1e-13, epsrel=1e-11, limit=200)
            value += piece
    return value
