"""Named numerical checks of the seminorms, operators and solvers.

Every check returns a `CheckResult` whose rows hold the compared quantities
as ``{"params", "lhs", "rhs", "pass"}``. The grids and tolerances are those
of the shipped verify configuration.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np

from . import __title__
from .app_settings import NTL_QUADRATURE_ORDER
from .core.fields import PiecewiseLinear
from .core.quadrature import composite_rule, outer_rule
from .energies import (
    LoadSpec,
    assemble_p2,
    frac_integral,
    frak_integral,
    weighted_integral,
)
from .geometry import Domain, Part, make_mesh, sigma
from .harness import DEFAULT_GRIDS, CaseId
from .kernels import CoefficientField, ModelParams, cbar_dp
from .library import (
    NamedFunction,
    make_function,
    make_potential,
    smooth_suite,
    vanishing_suite,
)
from .mollifier import conv_Kdelta
from .solver import DofMap, Objective, solve_p2, solve_penalty
from .spaces import (
    hardy_constant,
    hardy_lower_bound,
    lp_distance,
    poincare_constant,
    transmission_residual,
)
from .utils import LoggerAddTag

logger = LoggerAddTag(logging.getLogger(__name__), __title__)

# checks run on the unit interval, which is Omega_2 of the default domain
UNIT_DOMAIN = Domain()
UNIT_PART = Part.OMEGA2


@dataclass
class CheckResult:
    name: str
    rows: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row["pass"] for row in self.rows)

    def add(self, params: dict, lhs: float, rhs: float, passed: bool) -> None:
        self.rows.append(
            {"params": params, "lhs": float(lhs), "rhs": float(rhs), "pass": bool(passed)}
        )

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed, "rows": self.rows}


def _relative_error(value: float, reference: float) -> float:
    return abs(value - reference) / abs(reference)


def _unit_l2(func: Callable) -> float:
    x, w = composite_rule(np.linspace(0.0, 1.0, 65), NTL_QUADRATURE_ORDER)
    return float(np.dot(w, np.asarray(func(x)) ** 2)) ** 0.5


def check_linear_exactness(seed: int = 0) -> CheckResult:
    """[x]^2 of the heterogeneous-horizon space on (0, 1) is 1/4 for s = 1/2."""
    result = CheckResult("linear_exactness")
    u = make_function("linear")
    values = []
    for delta in (0.05, 0.1, 0.2, 0.3):
        params = ModelParams(s=0.5, p=2.0, delta=delta)
        value = frak_integral(u, params, UNIT_DOMAIN, UNIT_PART)
        values.append(value)
        result.add(
            {"s": 0.5, "p": 2.0, "delta": delta},
            value,
            0.25,
            _relative_error(value, 0.25) <= 1e-6,
        )
    spread = max(values) - min(values)
    result.add({"quantity": "delta spread"}, spread, 1e-8, spread <= 1e-8)
    return result


def check_fractional_law(seed: int = 0) -> CheckResult:
    """[x]^2 of the fractional space on (0, 1) is 1/(3 - 2s) and tends to 1."""
    result = CheckResult("fractional_law")
    u = make_function("linear")
    for s in (0.5, 0.6, 0.75, 0.9, 0.95):
        value = frac_integral(u, ModelParams(s=s, p=2.0), UNIT_DOMAIN, UNIT_PART)
        expected = 1.0 / (3.0 - 2.0 * s)
        result.add(
            {"s": s, "p": 2.0}, value, expected, _relative_error(value, expected) <= 1e-4
        )
    value = frac_integral(u, ModelParams(s=0.99, p=2.0), UNIT_DOMAIN, UNIT_PART)
    result.add(
        {"s": 0.99, "p": 2.0, "quantity": "local limit"},
        value,
        1.0,
        _relative_error(value, 1.0) <= 0.02,
    )
    return result


def check_localization(seed: int = 0) -> CheckResult:
    """Heterogeneous-horizon seminorm of sin(pi x) approaches the weighted one."""
    result = CheckResult("localization")
    u = make_function("sine:1")
    params = ModelParams(s=0.75, p=2.0, delta=1e-2)
    nonlocal_value = frak_integral(u, params, UNIT_DOMAIN, UNIT_PART)
    weighted_value = weighted_integral(u, params, UNIT_DOMAIN, UNIT_PART)
    gap = _relative_error(nonlocal_value, weighted_value)
    result.add(params.to_dict(), gap, 0.01, gap <= 0.01)
    return result


def random_fields(count: int, seed: int, n_elements: int = 8) -> List[PiecewiseLinear]:
    """Seeded random piecewise-linear fields on (0, 1)."""
    rng = np.random.default_rng(seed)
    nodes = np.linspace(0.0, 1.0, n_elements + 1)
    return [PiecewiseLinear(nodes, rng.uniform(-1.0, 1.0, nodes.size)) for _ in range(count)]


def check_horizon_comparison(seed: int = 0, count: int = 50) -> CheckResult:
    """Seminorms for two horizons bound each other with explicit constants."""
    result = CheckResult("horizon_comparison")
    fields = random_fields(count, seed)
    for s in (0.6, 0.9):
        for delta1, delta2 in ((0.05, 0.1), (0.1, 0.2), (0.05, 0.3)):
            p = 2.0
            first = ModelParams(s=s, p=p, delta=delta1)
            second = ModelParams(s=s, p=p, delta=delta2)
            lower_factor = (delta1 / delta2) ** (1.0 + 1.0 / p)
            upper_factor = (2.0 / (1.0 - delta2)) ** (1.0 + 1.0 / p) * (1.0 + delta2) ** (
                s + 1.0 / p
            )
            lower_violations = upper_violations = 0
            worst_lower = worst_upper = 0.0
            for u in fields:
                small = frak_integral(u, first, UNIT_DOMAIN, UNIT_PART) ** (1.0 / p)
                large = frak_integral(u, second, UNIT_DOMAIN, UNIT_PART) ** (1.0 / p)
                lower_violations += lower_factor * small > large
                upper_violations += large > upper_factor * small
                worst_lower = max(worst_lower, lower_factor * small / large)
                worst_upper = max(worst_upper, large / (upper_factor * small))
            params = {"s": s, "p": p, "delta1": delta1, "delta2": delta2}
            result.add(
                {**params, "bound": "lower", "violations": int(lower_violations)},
                worst_lower,
                1.0,
                lower_violations == 0,
            )
            result.add(
                {**params, "bound": "upper", "violations": int(upper_violations)},
                worst_upper,
                1.0,
                upper_violations == 0,
            )
    return result


def stability_ratio(constants: Dict[float, float]) -> float:
    values = np.array(list(constants.values()))
    return float(values.max() / values.min())


def _stability(result: CheckResult, label: str, constants: Dict[float, float]) -> None:
    """Fitted constants vary by at most a factor 3 over the grid."""
    ratio = stability_ratio(constants)
    result.add({"quantity": label, "constants": constants}, ratio, 3.0, ratio <= 3.0)


def kink_suite() -> Tuple[NamedFunction, ...]:
    """Functions with a derivative jump, for which u - K_delta u is of first order."""
    return tuple(make_function(spec) for spec in ("kink:0.5", "kink:0.35"))


def check_embedding(seed: int = 0) -> CheckResult:
    """Weighted space embeds into the nonlocal and the fractional spaces."""
    result = CheckResult("embedding")
    suite = smooth_suite()
    p = 2.0
    embedding_constant = 2.0 * cbar_dp(1, p) / (1.0 + p)
    fitted = {}
    for s in (0.6, 0.75, 0.9):
        weighted_params = ModelParams(s=s, p=p)
        weighted = [weighted_integral(u, weighted_params, UNIT_DOMAIN, UNIT_PART) for u in suite]
        for delta in (0.05, 0.1, 0.2):
            params = ModelParams(s=s, p=p, delta=delta)
            factor = embedding_constant / (1.0 - delta) ** (p - s * p + 1.0)
            worst = max(
                frak_integral(u, params, UNIT_DOMAIN, UNIT_PART) / (factor * value)
                for u, value in zip(suite, weighted)
            )
            result.add({"s": s, "p": p, "delta": delta}, worst, 1.0, worst <= 1.0)
        fitted[s] = max(
            frac_integral(u, weighted_params, UNIT_DOMAIN, UNIT_PART) / value
            for u, value in zip(suite, weighted)
        )
    _stability(result, "weighted into fractional", fitted)
    return result


def check_frak_frac_estimate(seed: int = 0) -> CheckResult:
    """[u]_frak <= C delta^(s-1) [u]_frac with C stable over delta."""
    result = CheckResult("frak_frac_estimate")
    suite = smooth_suite()
    p, s = 2.0, 0.75
    fractional = [
        frac_integral(u, ModelParams(s=s, p=p), UNIT_DOMAIN, UNIT_PART) ** (1.0 / p)
        for u in suite
    ]
    constants = {}
    for delta in (0.3, 0.15, 0.075):
        params = ModelParams(s=s, p=p, delta=delta)
        constants[delta] = max(
            frak_integral(u, params, UNIT_DOMAIN, UNIT_PART) ** (1.0 / p)
            / (delta ** (s - 1.0) * value)
            for u, value in zip(suite, fractional)
        )
    _stability(result, "frak-frac constant", constants)
    return result


def check_kdelta(seed: int = 0) -> CheckResult:
    """L^2 bounds of the boundary-localized convolution, affine and trace preservation.

    Smooth functions converge at second order in delta, so the approximation
    constant is fitted together with kinked functions.
    """
    result = CheckResult("kdelta")
    suite = smooth_suite() + kink_suite()
    p, s = 2.0, 0.75
    bounded, approximation = {}, {}
    for delta in (0.3, 0.15, 0.075):
        params = ModelParams(s=s, p=p, delta=delta)
        ratios, errors = [], []
        for u in suite:
            smoothed = conv_Kdelta(u, delta, UNIT_DOMAIN, UNIT_PART)
            ratios.append(_unit_l2(smoothed) / _unit_l2(u))
            difference = _unit_l2(lambda x: u(x) - smoothed(x))
            seminorm = frak_integral(u, params, UNIT_DOMAIN, UNIT_PART) ** 0.5
            errors.append(difference / (delta * seminorm))
        bounded[delta] = max(ratios)
        approximation[delta] = max(errors)
    _stability(result, "L2 bound", bounded)
    _stability(result, "approximation constant", approximation)

    x = np.linspace(0.0, 1.0, 101)
    for spec in ("affine:0.3,-2", "constant:1.5"):
        u = make_function(spec)
        error = float(np.max(np.abs(conv_Kdelta(u, 0.2, UNIT_DOMAIN, UNIT_PART)(x) - u(x))))
        result.add({"function": spec, "delta": 0.2}, error, 1e-10, error <= 1e-10)
    u = make_function("sine:1")
    smoothed = conv_Kdelta(u, 0.2, UNIT_DOMAIN, UNIT_PART)
    error = max(abs(smoothed(x0) - u(x0)) for x0 in UNIT_DOMAIN.bounds(UNIT_PART))
    result.add({"function": "sine:1", "quantity": "trace"}, error, 1e-6, error <= 1e-6)
    return result


def check_solver(seed: int = 0) -> CheckResult:
    """Analytic reference, dense oracle and gradient against finite differences."""
    result = CheckResult("solver")
    domain = Domain()
    coeffs = CoefficientField()
    unit_load = make_function("constant:1")
    loads = LoadSpec(unit_load, unit_load)

    mesh = make_mesh(domain, 256)
    report = solve_p2(ModelParams(s=1.0, p=2.0), coeffs, loads, mesh)
    exact = make_function("bubble")(mesh.nodes)
    nodal = np.concatenate((report.pair.nodal(Part.OMEGA1), report.pair.nodal(Part.OMEGA2)[1:]))
    error = float(np.max(np.abs(nodal - exact)))
    result.add({"s": 1.0, "delta": 0.0, "n_per_side": 256}, error, 1e-3, error <= 1e-3)

    mesh = make_mesh(domain, 4)
    params = ModelParams(s=0.75, p=2.0, delta=0.1)
    report = solve_p2(params, coeffs, loads, mesh)
    system = assemble_p2(params, coeffs, mesh, loads)
    oracle = np.linalg.solve(system.matrix, system.rhs)
    error = float(np.max(np.abs(report.pair.values[system.free_dofs] - oracle)))
    result.add({**params.to_dict(), "n_per_side": 4}, error, 1e-10, error <= 1e-10)

    params = ModelParams(s=0.75, p=3.0, delta=0.1)
    objective = Objective(params, coeffs, make_potential(3.0), loads, DofMap.hard(mesh))
    rng = np.random.default_rng(seed)
    w = rng.uniform(-1.0, 1.0, objective.n_unknowns)
    gradient = objective.gradient(w)
    step = 1e-6
    differences = np.array(
        [
            (objective.energy(w + step * e) - objective.energy(w - step * e)) / (2 * step)
            for e in np.eye(w.size)
        ]
    )
    error = float(np.linalg.norm(gradient - differences) / np.linalg.norm(gradient))
    result.add({**params.to_dict(), "quantity": "gradient"}, error, 1e-5, error <= 1e-5)
    return result


def check_transmission(seed: int = 0) -> CheckResult:
    """Exact transmission and Dirichlet values, and penalty convergence."""
    result = CheckResult("transmission")
    coeffs = CoefficientField()
    unit_load = make_function("constant:1")
    loads = LoadSpec(unit_load, unit_load)
    mesh = make_mesh(Domain(), 16)
    for s, delta in ((0.75, 0.1), (0.75, 0.0), (1.0, 0.1), (1.0, 0.0)):
        report = solve_p2(ModelParams(s=s, p=2.0, delta=delta), coeffs, loads, mesh)
        values = report.pair.values
        worst = max(transmission_residual(report.pair), abs(values[0]), abs(values[-1]))
        result.add({"s": s, "delta": delta}, worst, 0.0, worst == 0.0)

    params = ModelParams(s=0.75, p=2.0, delta=0.1)
    hard = solve_p2(params, coeffs, loads, mesh)
    residuals = []
    for epsilon in (1.0, 0.1, 0.01, 1e-4):
        report = solve_penalty(params, coeffs, loads, mesh, g0=0.0, epsilon=epsilon)
        residuals.append(transmission_residual(report.pair))
    decreasing = all(later < earlier for earlier, later in zip(residuals, residuals[1:]))
    result.add(
        {**params.to_dict(), "quantity": "penalty residuals", "residuals": residuals},
        residuals[-1],
        residuals[0],
        decreasing,
    )
    distance = float(
        max(
            np.max(np.abs(report.pair.nodal(part) - hard.pair.nodal(part)))
            for part in (Part.OMEGA1, Part.OMEGA2)
        )
    )
    result.add(
        {**params.to_dict(), "epsilon": 1e-4, "quantity": "distance to hard"},
        distance,
        1e-3,
        distance <= 1e-3,
    )
    return result


def check_poincare(seed: int = 0, n_per_side: int = 32) -> CheckResult:
    """Discrete Poincare constants over all sweep grids vary by at most a factor 10."""
    result = CheckResult("poincare")
    mesh = make_mesh(Domain(), n_per_side)
    coeffs = CoefficientField()
    points = sorted(
        {point for case in CaseId for point in DEFAULT_GRIDS[case]}
        | {case.limit_point(DEFAULT_GRIDS[case]) for case in CaseId}
    )
    constants = {
        f"s={s:g},delta={delta:g}": poincare_constant(
            ModelParams(s=s, p=2.0, delta=delta), coeffs, mesh
        )
        for s, delta in points
    }
    values = np.array(list(constants.values()))
    ratio = float(values.max() / values.min())
    result.add({"constants": constants, "n_per_side": n_per_side}, ratio, 10.0, ratio <= 10.0)
    return result


def check_hardy(seed: int = 0) -> CheckResult:
    """Half-line Hardy constant above its lower bound and vanishing as sp -> 1."""
    result = CheckResult("hardy")
    p = 2.0
    for s in (0.6, 0.75, 0.9):
        value = hardy_constant(s, p)
        bound = hardy_lower_bound(s, p)
        result.add({"s": s, "p": p}, value, bound, value >= bound)
    sequence = (0.6, 0.55, 0.51)
    values = [hardy_constant(s, p) for s in sequence]
    for (s_high, high), (s_low, low) in zip(
        zip(sequence, values), zip(sequence[1:], values[1:])
    ):
        result.add(
            {"s": s_low, "p": p, "quantity": f"decrease from s={s_high:g}"},
            low,
            high,
            0 < low < high,
        )
    return result


def check_hardy_inequality(seed: int = 0) -> CheckResult:
    """[f]^p >= ((sp-1)/p)^p * integral |f|^p / dist^sp for f vanishing at both ends."""
    result = CheckResult("hardy_inequality")
    p = 2.0
    lower, upper = UNIT_DOMAIN.bounds(UNIT_PART)
    x, w = outer_rule(lower, upper, breakpoints=(0.5,))
    distance = sigma(UNIT_DOMAIN, UNIT_PART, x)
    for s in (0.6, 0.75, 0.9):
        params = ModelParams(s=s, p=p)
        factor = ((s * p - 1.0) / p) ** p
        for u in vanishing_suite():
            lhs = frac_integral(u, params, UNIT_DOMAIN, UNIT_PART)
            rhs = factor * float(np.dot(w, np.abs(u(x)) ** p / distance ** (s * p)))
            result.add({"s": s, "p": p, "function": u.label}, lhs, rhs, lhs >= rhs)
    return result


CHECKS: Dict[str, Callable[..., CheckResult]] = {
    "linear_exactness": check_linear_exactness,
    "fractional_law": check_fractional_law,
    "localization": check_localization,
    "horizon_comparison": check_horizon_comparison,
    "embedding": check_embedding,
    "frak_frac_estimate": check_frak_frac_estimate,
    "kdelta": check_kdelta,
    "solver": check_solver,
    "transmission": check_transmission,
    "poincare": check_poincare,
    "hardy": check_hardy,
    "hardy_inequality": check_hardy_inequality,
}


def run_check(name: str, seed: int = 0) -> CheckResult:
    try:
        check = CHECKS[name]
    except KeyError:
        raise KeyError(f"Unknown check: {name}") from None
    logger.info("Running check %s", name)
    result = check(seed=seed)
    if not result.passed:
        logger.warning("Check %s failed", name)
    return result
