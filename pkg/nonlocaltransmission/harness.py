"""Parameter sweeps toward the limit problems of the (s, delta) square.

Each case drives the parameters toward a corner and compares the minimizers
and energies along the grid with those of the limit problem.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import __title__
from .app_settings import NTL_QUADRATURE_ORDER, NTL_THREADS
from .constants import MONOTONE_TOLERANCE, WEAK_MOMENTS_COUNT
from .core.quadrature import composite_rule
from .energies import FunctionPair, LoadSpec, energy_eval
from .exceptions import ParameterError
from .forms import FieldPair
from .geometry import Domain, Mesh, Part
from .kernels import CoefficientField, ModelParams
from .library import Potential, make_function, make_potential
from .solver import SolveReport, solve_general_p, solve_p2
from .spaces import lp_distance
from .utils import LoggerAddTag, make_logger_prefix

logger = LoggerAddTag(logging.getLogger(__name__), __title__)

GridPoint = Tuple[float, float]


class CaseId(str, Enum):
    """Regimes of the sweep: which parameter moves and where it ends."""

    A = "a"
    B = "b"
    C = "c"
    D = "d"
    E = "e"

    @property
    def description(self) -> str:
        return {
            CaseId.A: "delta -> 0 at fixed s",
            CaseId.B: "s -> 1 at fixed delta > 0",
            CaseId.C: "s -> 1 at delta = 0",
            CaseId.D: "delta -> 0 at s = 1",
            CaseId.E: "s -> 1 and delta -> 0 together",
        }[self]

    def driving_parameter(self, point: GridPoint) -> float:
        """Parameter that goes to zero along the grid."""
        s, delta = point
        return 1.0 - s if self in (CaseId.B, CaseId.C) else delta

    def limit_point(self, grid: Sequence[GridPoint]) -> GridPoint:
        s, delta = grid[0]
        if self is CaseId.A:
            return s, 0.0
        if self is CaseId.B:
            return 1.0, delta
        return 1.0, 0.0

    def validate_grid(self, grid: Sequence[GridPoint]) -> None:
        if not grid:
            raise ParameterError("A sweep needs at least one grid point")
        fixed_index = {CaseId.A: 0, CaseId.B: 1, CaseId.C: 1, CaseId.D: 0}.get(self)
        if fixed_index is not None:
            values = {point[fixed_index] for point in grid}
            if len(values) > 1:
                raise ParameterError(
                    f"Case {self.value} keeps {('s', 'delta')[fixed_index]} fixed, "
                    f"got {sorted(values)}"
                )
            expected = {CaseId.C: 0.0, CaseId.D: 1.0}.get(self)
            if expected is not None and values != {expected}:
                raise ParameterError(
                    f"Case {self.value} needs {('s', 'delta')[fixed_index]} = {expected}"
                )
        driving = [self.driving_parameter(point) for point in grid]
        if any(later >= earlier for earlier, later in zip(driving, driving[1:])):
            raise ParameterError(
                f"Grid of case {self.value} must decrease strictly in its driving parameter"
            )


DEFAULT_GRIDS = {
    CaseId.A: ((0.75, 0.2), (0.75, 0.1), (0.75, 0.05), (0.75, 0.025)),
    CaseId.B: ((0.6, 0.1), (0.75, 0.1), (0.9, 0.1), (0.95, 0.1)),
    CaseId.C: ((0.6, 0.0), (0.75, 0.0), (0.9, 0.0), (0.95, 0.0)),
    CaseId.D: ((1.0, 0.2), (1.0, 0.1), (1.0, 0.05), (1.0, 0.025)),
    CaseId.E: ((0.8, 0.2), (0.9, 0.1), (0.95, 0.05), (0.975, 0.025)),
}


@dataclass(frozen=True)
class SweepRow:
    s: float
    delta: float
    parameter: float
    distance: float
    energy: float
    limit_energy: Optional[float]
    weak_gap: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "delta": self.delta,
            "parameter": self.parameter,
            "distance": self.distance,
            "energy": self.energy,
            "limit_energy": self.limit_energy,
            "weak_gap": self.weak_gap,
        }


@dataclass
class SweepReport:
    case_id: CaseId
    rows: List[SweepRow]
    fitted_slope: Optional[float]
    monotone: bool
    soft_monotone: bool
    limit_point: GridPoint
    solutions: List[FieldPair] = field(default_factory=list, repr=False)
    limit_solution: Optional[FieldPair] = field(default=None, repr=False)

    @property
    def distances(self) -> np.ndarray:
        return np.array([row.distance for row in self.rows])

    def to_dict(self) -> dict:
        return {
            "case": self.case_id.value,
            "description": self.case_id.description,
            "limit": {"s": self.limit_point[0], "delta": self.limit_point[1]},
            "rows": [row.to_dict() for row in self.rows],
            "fitted_slope": self.fitted_slope,
            "monotone": self.monotone,
            "soft_monotone": self.soft_monotone,
        }


def fit_rate(rows) -> Optional[float]:
    """Least-squares slope of log distance against log parameter.

    Accepts sweep rows or (parameter, distance) pairs. Needs at least three
    rows with positive values.
    """
    pairs = [
        (row.parameter, row.distance) if isinstance(row, SweepRow) else tuple(row)
        for row in rows
    ]
    if len(pairs) < 3:
        return None
    parameters, distances = np.asarray(pairs, dtype=float).T
    if np.any(parameters <= 0) or np.any(distances <= 0):
        return None
    slope, _ = np.polyfit(np.log(parameters), np.log(distances), 1)
    return float(slope)


def check_monotone(distances: Sequence[float], tolerance: float = MONOTONE_TOLERANCE):
    """Strict decrease and decrease up to single relative inversions below tolerance."""
    strict, soft = True, True
    for earlier, later in zip(distances, distances[1:]):
        if later < earlier:
            continue
        strict = False
        if earlier > 0 and (later - earlier) / earlier <= tolerance:
            logger.warning(
                "Distance increased from %.6g to %.6g within tolerance", earlier, later
            )
        else:
            soft = False
    return strict, soft


def weak_test_functions() -> Tuple[Callable, ...]:
    specs = ("constant:1", "linear", "quadratic", "sine:1", "cosine:1")
    return tuple(make_function(spec) for spec in specs[:WEAK_MOMENTS_COUNT])


def weak_gap(first: FieldPair, second: FieldPair) -> float:
    """Largest difference of moments against fixed smooth test functions."""
    gaps = []
    for func in weak_test_functions():
        moment = 0.0
        for part in (Part.OMEGA1, Part.OMEGA2):
            x, w = composite_rule(first.mesh.part_nodes(part), NTL_QUADRATURE_ORDER)
            difference = first.function(part)(x) - second.function(part)(x)
            moment += float(np.dot(w, difference * func(x)))
        gaps.append(abs(moment))
    return max(gaps)


def _solve(
    point: GridPoint,
    p: float,
    coeffs: CoefficientField,
    loads: LoadSpec,
    mesh: Mesh,
    potential: Potential,
) -> SolveReport:
    s, delta = point
    params = ModelParams(s=s, p=p, delta=delta)
    if p == 2 and potential.is_power:
        return solve_p2(params, coeffs, loads, mesh)
    return solve_general_p(params, coeffs, potential, loads, mesh)


def sweep_case(
    case_id: CaseId,
    grid: Sequence[GridPoint] = None,
    coeffs: CoefficientField = None,
    loads: LoadSpec = None,
    mesh: Mesh = None,
    p: float = 2.0,
    potential: Potential = None,
    reference: Optional[Callable] = None,
    threads: int = None,
) -> SweepReport:
    """Solve along the grid and compare with the limit minimizer.

    When `reference` is given, distances are measured to it instead of the
    computed limit minimizer. Case b also reports weak-topology proxies.
    """
    case_id = CaseId(case_id)
    grid = [tuple(map(float, point)) for point in (grid or DEFAULT_GRIDS[case_id])]
    case_id.validate_grid(grid)
    if mesh is None:
        raise ParameterError("A sweep needs a mesh")
    coeffs = coeffs or CoefficientField()
    loads = loads or LoadSpec()
    potential = potential or make_potential(p)
    limit = case_id.limit_point(grid)
    add_prefix = make_logger_prefix(f"case {case_id.value}")
    logger.info(add_prefix(f"Sweeping {len(grid)} points toward {limit}"))

    points = [limit] + grid
    workers = threads if threads is not None else NTL_THREADS
    with ThreadPoolExecutor(max_workers=workers or None) as executor:
        reports = list(
            executor.map(
                lambda point: _solve(point, p, coeffs, loads, mesh, potential), points
            )
        )
    limit_report, grid_reports = reports[0], reports[1:]
    target = limit_report.pair if reference is None else reference
    limit_energy = None if reference is not None else limit_report.breakdown.total

    rows = []
    for point, report in zip(grid, grid_reports):
        distance = lp_distance(report.pair, target, p)
        gap = weak_gap(report.pair, limit_report.pair) if case_id is CaseId.B else None
        rows.append(
            SweepRow(
                s=point[0],
                delta=point[1],
                parameter=case_id.driving_parameter(point),
                distance=distance,
                energy=report.breakdown.total,
                limit_energy=limit_energy,
                weak_gap=gap,
            )
        )
        logger.info(
            add_prefix(f"s={point[0]:g}, delta={point[1]:g}: distance {distance:.6e}")
        )
    monotone, soft_monotone = check_monotone(
        [row.weak_gap if case_id is CaseId.B else row.distance for row in rows]
    )
    return SweepReport(
        case_id=case_id,
        rows=rows,
        fitted_slope=fit_rate(rows),
        monotone=monotone,
        soft_monotone=soft_monotone,
        limit_point=limit,
        solutions=[report.pair for report in grid_reports],
        limit_solution=limit_report.pair,
    )


@dataclass(frozen=True)
class LimitCheckRow:
    s: float
    delta: float
    energy: float
    limit_energy: float
    gap: float

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "delta": self.delta,
            "energy": self.energy,
            "limit_energy": self.limit_energy,
            "gap": self.gap,
        }


def _relative_gap(value: float, reference: float) -> float:
    if reference == 0:
        return abs(value)
    return abs(value - reference) / abs(reference)


def energy_limit_check(
    u: Callable,
    case_id: CaseId,
    grid: Sequence[GridPoint] = None,
    domain: Domain = None,
    p: float = 2.0,
    coeffs: CoefficientField = None,
) -> List[LimitCheckRow]:
    """Energies of one smooth function along the grid and in the limit mode.

    The last row is the finest grid point.
    """
    case_id = CaseId(case_id)
    grid = [tuple(map(float, point)) for point in (grid or DEFAULT_GRIDS[case_id])]
    case_id.validate_grid(grid)
    domain = domain or Domain()
    pair = FunctionPair(u, u)
    s_limit, delta_limit = case_id.limit_point(grid)
    limit_energy = energy_eval(
        pair, ModelParams(s=s_limit, p=p, delta=delta_limit), coeffs, domain=domain
    ).total
    rows = []
    for s, delta in grid:
        energy = energy_eval(pair, ModelParams(s=s, p=p, delta=delta), coeffs, domain=domain).total
        rows.append(
            LimitCheckRow(
                s=s,
                delta=delta,
                energy=energy,
                limit_energy=limit_energy,
                gap=_relative_gap(energy, limit_energy),
            )
        )
    return rows
