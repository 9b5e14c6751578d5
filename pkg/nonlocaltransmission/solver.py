"""Discrete minimization of the transmission energy in all four modes.

The transmission condition is either built into the unknowns (one shared
interface value, or two values tied by a prescribed jump) or imposed softly
by a penalty. Dirichlet values enter through a lift.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg, sparse

from . import __title__
from .app_settings import (
    NTL_ARMIJO_CONSTANT,
    NTL_ARMIJO_SHRINK,
    NTL_CG_RTOL,
    NTL_DENSE_SOLVER_MAX_DOF,
    NTL_DESCENT_GTOL,
    NTL_DESCENT_MAX_ITER,
)
from .constants import HESSIAN_FLOOR
from .energies import EnergyBreakdown, LoadSpec, energy_eval
from .exceptions import (
    ConvergenceError,
    LineSearchError,
    ModeError,
    ParameterError,
    SolverError,
)
from .forms import FieldPair, Layout, build_forms, load_vector
from .geometry import Mesh
from .kernels import CoefficientField, ModelParams
from .library import Potential, make_potential
from .spaces import BoundaryData
from .utils import LoggerAddTag

logger = LoggerAddTag(logging.getLogger(__name__), __title__)

METHOD_CHOLESKY = "cholesky"
METHOD_CG = "cg"
METHOD_NEWTON = "newton"

_MIN_STEP = 1e-20


class DofMap:
    """Nodal vector u = P w + lift of the unknowns w."""

    def __init__(self, layout: Layout, prolongation: sparse.spmatrix, lift: np.ndarray):
        self.layout = layout
        self.prolongation = sparse.csr_matrix(prolongation)
        self.lift = np.asarray(lift, dtype=float)

    def __repr__(self) -> str:
        return "{}(size={}, unknowns={})".format(
            type(self).__name__, self.layout.size, self.n_unknowns
        )

    @property
    def n_unknowns(self) -> int:
        return self.prolongation.shape[1]

    def nodal(self, w: np.ndarray) -> np.ndarray:
        return self.prolongation @ w + self.lift

    @staticmethod
    def _build(layout: Layout, owners: dict, lift: np.ndarray) -> "DofMap":
        rows = np.array(sorted(owners), dtype=int)
        cols = np.array([owners[row] for row in rows], dtype=int)
        n_unknowns = int(cols.max()) + 1 if cols.size else 0
        prolongation = sparse.csr_matrix(
            (np.ones(rows.size), (rows, cols)), shape=(layout.size, n_unknowns)
        )
        return DofMap(layout, prolongation, lift)

    @classmethod
    def hard(cls, mesh: Mesh, bc: BoundaryData = None) -> "DofMap":
        """Transmission by construction: T1 u1 - T2 u2 = g0 for every w."""
        bc = bc or BoundaryData()
        layout = Layout(mesh, split=bc.g0 != 0)
        lift = np.zeros(layout.size)
        lift[0], lift[-1] = bc.g1, bc.g2
        owners, unknown = {}, 0
        for index in range(1, layout.size - 1):
            if index == layout.second_interface and layout.split:
                owners[index] = owners[layout.first_interface]
                lift[index] = -bc.g0
                continue
            owners[index] = unknown
            unknown += 1
        return cls._build(layout, owners, lift)

    @classmethod
    def independent(cls, mesh: Mesh, bc: BoundaryData = None) -> "DofMap":
        """Both interface values are free, for the penalty formulation."""
        bc = bc or BoundaryData()
        layout = Layout(mesh, split=True)
        lift = np.zeros(layout.size)
        lift[0], lift[-1] = bc.g1, bc.g2
        owners = {index: index - 1 for index in range(1, layout.size - 1)}
        return cls._build(layout, owners, lift)


@dataclass(frozen=True)
class InterfacePenalty:
    """epsilon^-2 |u[first] - u[second] - g0|^p."""

    epsilon: float
    p: float
    g0: float = 0.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be > 0, got {self.epsilon}")

    def _jump(self, u: np.ndarray, layout: Layout) -> float:
        return u[layout.first_interface] - u[layout.second_interface] - self.g0

    def energy(self, u, layout) -> float:
        return abs(self._jump(u, layout)) ** self.p / self.epsilon ** 2

    def gradient(self, u, layout) -> np.ndarray:
        jump = self._jump(u, layout)
        result = np.zeros(layout.size)
        value = self.p * abs(jump) ** (self.p - 1) * np.sign(jump) / self.epsilon ** 2
        result[layout.first_interface] = value
        result[layout.second_interface] = -value
        return result

    def hessian(self, u, layout) -> np.ndarray:
        jump = max(abs(self._jump(u, layout)), HESSIAN_FLOOR)
        value = self.p * (self.p - 1) * jump ** (self.p - 2) / self.epsilon ** 2
        result = np.zeros((layout.size, layout.size))
        first, second = layout.first_interface, layout.second_interface
        result[first, first] = result[second, second] = value
        result[first, second] = result[second, first] = -value
        return result


class Objective:
    """Discrete energy as a function of the unknowns."""

    def __init__(
        self,
        params: ModelParams,
        coeffs: CoefficientField,
        potential: Potential,
        loads: LoadSpec,
        dofmap: DofMap,
        penalty: Optional[InterfacePenalty] = None,
    ) -> None:
        if potential.p != params.p:
            raise ModeError(
                f"Potential exponent {potential.p} does not match p={params.p}"
            )
        self.params = params
        self.coeffs = coeffs
        self.potential = potential
        self.loads = loads
        self.dofmap = dofmap
        self.penalty = penalty
        layout = dofmap.layout
        self.forms = build_forms(params, coeffs, layout, potential)
        self.load = load_vector(loads.f1, loads.f2, layout)

    def __repr__(self) -> str:
        return "{}(mode={}, unknowns={})".format(
            type(self).__name__, self.params.mode.value, self.n_unknowns
        )

    @property
    def n_unknowns(self) -> int:
        return self.dofmap.n_unknowns

    @property
    def layout(self) -> Layout:
        return self.dofmap.layout

    def energy(self, w: np.ndarray) -> float:
        u = self.dofmap.nodal(w)
        result = sum(form.energy(u) for form in self.forms) - float(np.dot(self.load, u))
        if self.penalty:
            result += self.penalty.energy(u, self.layout)
        return result

    def gradient(self, w: np.ndarray) -> np.ndarray:
        u = self.dofmap.nodal(w)
        nodal = sum(form.gradient(u) for form in self.forms) - self.load
        if self.penalty:
            nodal = nodal + self.penalty.gradient(u, self.layout)
        return self.dofmap.prolongation.T @ nodal

    def hessian(self, w: np.ndarray) -> np.ndarray:
        u = self.dofmap.nodal(w)
        nodal = sum(form.hessian(u) for form in self.forms)
        if self.penalty:
            nodal = nodal + self.penalty.hessian(u, self.layout)
        prolongation = self.dofmap.prolongation
        result = prolongation.T @ (prolongation.T @ nodal.T).T
        return 0.5 * (result + result.T)

    def field(self, w: np.ndarray) -> FieldPair:
        return FieldPair(self.layout, self.dofmap.nodal(w))


@dataclass
class SolveReport:
    pair: FieldPair
    breakdown: EnergyBreakdown
    iterations: int
    residual: float
    wall_time: float
    method: str
    unknowns: np.ndarray = field(repr=False, default=None)
    objective: Optional[Objective] = field(repr=False, default=None)

    def to_dict(self) -> dict:
        """Report without wall time, which is only logged."""
        return {
            "breakdown": self.breakdown.to_dict(),
            "iterations": self.iterations,
            "residual": self.residual,
            "method": self.method,
            "n_unknowns": int(self.pair.layout.size if self.unknowns is None else self.unknowns.size),
        }


def _pcg(matrix: np.ndarray, rhs: np.ndarray, rtol: float):
    """Conjugate gradients with Jacobi preconditioner. Returns solution and iterations."""
    n = rhs.size
    solution = np.zeros(n)
    norm_rhs = np.linalg.norm(rhs)
    if norm_rhs == 0:
        return solution, 0
    inverse_diagonal = 1.0 / np.diag(matrix)
    residual = rhs.copy()
    z = inverse_diagonal * residual
    direction = z.copy()
    rz = residual @ z
    for iteration in range(1, 10 * n + 1):
        product = matrix @ direction
        step = rz / (direction @ product)
        solution += step * direction
        residual -= step * product
        if np.linalg.norm(residual) <= rtol * norm_rhs:
            return solution, iteration
        z = inverse_diagonal * residual
        rz_new = residual @ z
        direction = z + (rz_new / rz) * direction
        rz = rz_new
    raise ConvergenceError(
        f"CG did not converge in {10 * n} iterations",
        {"n_dof": n, "relative_residual": float(np.linalg.norm(residual) / norm_rhs)},
    )


def _relative_residual(matrix, solution, rhs) -> float:
    norm_rhs = np.linalg.norm(rhs)
    if norm_rhs == 0:
        return float(np.linalg.norm(matrix @ solution))
    return float(np.linalg.norm(matrix @ solution - rhs) / norm_rhs)


def _solve_quadratic(objective: Objective, method_prefix: str = "") -> SolveReport:
    started = time.perf_counter()
    zero = np.zeros(objective.n_unknowns)
    matrix = objective.hessian(zero)
    rhs = -objective.gradient(zero)
    n = rhs.size
    if n <= NTL_DENSE_SOLVER_MAX_DOF:
        try:
            factor = linalg.cho_factor(matrix)
        except linalg.LinAlgError:
            raise SolverError(
                "Energy matrix is not positive definite",
                {
                    "n_dof": n,
                    "min_eigenvalue": float(np.linalg.eigvalsh(matrix)[0]),
                    "mode": objective.params.mode.value,
                },
            ) from None
        solution = linalg.cho_solve(factor, rhs)
        method, iterations = METHOD_CHOLESKY, 1
    else:
        solution, iterations = _pcg(matrix, rhs, NTL_CG_RTOL)
        method = METHOD_CG
    residual = _relative_residual(matrix, solution, rhs)
    return _report(objective, solution, iterations, residual, started, method_prefix + method)


def _report(objective, solution, iterations, residual, started, method) -> SolveReport:
    pair = objective.field(solution)
    breakdown = energy_eval(
        pair, objective.params, objective.coeffs, objective.potential, objective.loads
    )
    wall_time = time.perf_counter() - started
    logger.info(
        "Solved %s with %s: %d unknowns, %d iterations, residual %.3e in %.2f s",
        objective.params.mode.value,
        method,
        objective.n_unknowns,
        iterations,
        residual,
        wall_time,
    )
    return SolveReport(
        pair=pair,
        breakdown=breakdown,
        iterations=iterations,
        residual=residual,
        wall_time=wall_time,
        method=method,
        unknowns=solution,
        objective=objective,
    )


def _descend(objective: Objective, initial: Optional[np.ndarray], method_prefix: str = ""):
    """Damped Newton with Armijo backtracking, steepest descent as fallback."""
    started = time.perf_counter()
    w = np.zeros(objective.n_unknowns) if initial is None else np.array(initial, dtype=float)
    value = objective.energy(w)
    gradient = objective.gradient(w)
    iterations = 0
    while np.max(np.abs(gradient), initial=0.0) > NTL_DESCENT_GTOL:
        if iterations >= NTL_DESCENT_MAX_ITER:
            raise ConvergenceError(
                f"Descent did not converge in {NTL_DESCENT_MAX_ITER} iterations",
                {"gradient_max_norm": float(np.max(np.abs(gradient))), "energy": value},
            )
        iterations += 1
        hessian = objective.hessian(w)
        shift = 1e-12 * max(float(np.max(np.abs(np.diag(hessian)))), 1.0)
        try:
            direction = -linalg.cho_solve(
                linalg.cho_factor(hessian + shift * np.eye(w.size)), gradient
            )
        except linalg.LinAlgError:
            direction = -gradient
        slope = float(gradient @ direction)
        if not slope < 0:
            direction, slope = -gradient, -float(gradient @ gradient)
        step = 1.0
        slack = 1e-15 * max(1.0, abs(value))
        while True:
            candidate = w + step * direction
            candidate_value = objective.energy(candidate)
            if candidate_value <= value + NTL_ARMIJO_CONSTANT * step * slope + slack:
                break
            step *= NTL_ARMIJO_SHRINK
            if step < _MIN_STEP:
                raise LineSearchError(
                    "Step size underflow in line search",
                    {
                        "iteration": iterations,
                        "energy": value,
                        "gradient_max_norm": float(np.max(np.abs(gradient))),
                    },
                )
        w, value = candidate, candidate_value
        gradient = objective.gradient(w)
    residual = float(np.max(np.abs(gradient), initial=0.0))
    return _report(objective, w, iterations, residual, started, method_prefix + METHOD_NEWTON)


def _checked(params: ModelParams, mesh: Mesh) -> ModelParams:
    return params.validate_for(mesh.domain)


def solve_p2(
    params: ModelParams,
    coeffs: CoefficientField,
    loads: LoadSpec,
    mesh: Mesh,
    bc: BoundaryData = None,
) -> SolveReport:
    """Unique minimizer of the quadratic energy, Cholesky or CG."""
    if params.p != 2:
        raise ModeError(f"The linear solver needs p = 2, got p={params.p}")
    objective = Objective(
        _checked(params, mesh),
        coeffs or CoefficientField(),
        make_potential(2.0),
        loads or LoadSpec(),
        DofMap.hard(mesh, bc),
    )
    return _solve_quadratic(objective)


def solve_general_p(
    params: ModelParams,
    coeffs: CoefficientField,
    potential: Potential,
    loads: LoadSpec,
    mesh: Mesh,
    bc: BoundaryData = None,
    initial: Optional[np.ndarray] = None,
) -> SolveReport:
    """Minimizer for p > 1 and convex potentials by damped Newton descent."""
    objective = Objective(
        _checked(params, mesh),
        coeffs or CoefficientField(),
        potential or make_potential(params.p),
        loads or LoadSpec(),
        DofMap.hard(mesh, bc),
    )
    return _descend(objective, initial)


def solve_penalty(
    params: ModelParams,
    coeffs: CoefficientField,
    loads: LoadSpec,
    mesh: Mesh,
    g0: float = 0.0,
    epsilon: float = 1e-2,
    potential: Potential = None,
    bc: BoundaryData = None,
) -> SolveReport:
    """Minimizer of energy + epsilon^-2 |T1 u1 - T2 u2 - g0|^p with free interface values."""
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be > 0, got {epsilon}")
    potential = potential or make_potential(params.p)
    objective = Objective(
        _checked(params, mesh),
        coeffs or CoefficientField(),
        potential,
        loads or LoadSpec(),
        DofMap.independent(mesh, bc),
        InterfacePenalty(epsilon=float(epsilon), p=params.p, g0=float(g0)),
    )
    if params.p == 2 and potential.is_power:
        return _solve_quadratic(objective, "penalty-")
    return _descend(objective, None, "penalty-")


def check_optimality(
    report: SolveReport, n_samples: int = 100, size: float = 1e-3, seed: int = 0
) -> dict:
    """Energy increases in random directions around the returned minimizer."""
    objective = report.objective
    rng = np.random.default_rng(seed)
    base = objective.energy(report.unknowns)
    increases = []
    for _ in range(n_samples):
        direction = rng.standard_normal(objective.n_unknowns)
        direction /= np.linalg.norm(direction)
        increases.append(objective.energy(report.unknowns + size * direction) - base)
    increases = np.asarray(increases)
    return {
        "samples": n_samples,
        "violations": int(np.sum(increases <= 0)),
        "min_increase": float(increases.min()),
    }
