"""Execution of subcommands: computation, output files and run records."""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np
from django.db import DatabaseError

from . import __title__
from .app_settings import NTL_RECORD_RUNS
from .config import RunConfig, parse_config
from .constants import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    SUBCOMMAND_CONVOLVE,
    SUBCOMMAND_ENERGY,
    SUBCOMMAND_SOLVE,
    SUBCOMMAND_SWEEP,
    SUBCOMMAND_VERIFY,
    SUBCOMMANDS,
)
from .energies import (
    FunctionPair,
    energy_eval,
    seminorm_frac,
    seminorm_frak,
    seminorm_weighted,
)
from .exceptions import ConfigError, NtlError, SolverError
from .geometry import Part, make_mesh
from .harness import sweep_case
from .helpers import atomic_write_text, csv_text, dumps_json, text_digest
from .mollifier import conv_Kdelta
from .solver import check_optimality, solve_general_p, solve_p2, solve_penalty
from .spaces import transmission_residual
from .utils import LoggerAddTag
from .verify import run_check

logger = LoggerAddTag(logging.getLogger(__name__), __title__)


@dataclass
class RunResult:
    subcommand: str
    exit_status: int
    outputs: List[Path] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    violations: List[str] = field(default_factory=list)
    sweep_rows: list = field(default_factory=list, repr=False)


class _Outputs:
    """Collects the files written by one run."""

    def __init__(self, directory: Path) -> None:
        self.directory = Path(directory)
        self.paths: List[Path] = []

    def write(self, name: str, text: str) -> Path:
        path = atomic_write_text(self.directory / name, text)
        self.paths.append(path)
        return path

    def json(self, name: str, obj) -> Path:
        return self.write(name, dumps_json(obj))

    def csv(self, name: str, header, rows) -> Path:
        return self.write(name, csv_text(header, rows))


def _solve(config: RunConfig, outputs: _Outputs, result: RunResult) -> int:
    params = config.params
    mesh = make_mesh(config.domain, config.n_per_side)
    if config.penalty_eps is not None:
        report = solve_penalty(
            params,
            config.coeffs,
            config.loads,
            mesh,
            g0=config.bc.g0,
            epsilon=config.penalty_eps,
            potential=config.potential,
            bc=config.bc,
        )
    elif params.p == 2 and config.potential.is_power:
        report = solve_p2(params, config.coeffs, config.loads, mesh, config.bc)
    else:
        report = solve_general_p(
            params, config.coeffs, config.potential, config.loads, mesh, config.bc
        )
    optimality = check_optimality(report, seed=config.seed)
    rows = []
    for part in (Part.OMEGA1, Part.OMEGA2):
        for x, u in zip(mesh.part_nodes(part), report.pair.nodal(part)):
            rows.append((int(part), x, u))
    outputs.csv("solution.csv", ("part", "x", "u"), rows)
    summary = {
        "params": params.to_dict(),
        "n_per_side": config.n_per_side,
        "potential": {"name": config.potential.name, "theta": config.potential.theta},
        "penalty_eps": config.penalty_eps,
        "boundary_data": config.bc._asdict(),
        "report": report.to_dict(),
        "transmission_residual": transmission_residual(report.pair, config.bc.g0),
        "optimality": optimality,
    }
    outputs.json("report.json", summary)
    result.summary = summary
    return EXIT_OK if optimality["violations"] == 0 else EXIT_CHECK_FAILED


def _sweep(config: RunConfig, outputs: _Outputs, result: RunResult) -> int:
    mesh = make_mesh(config.domain, config.n_per_side)
    report = sweep_case(
        config.case,
        config.grid,
        config.coeffs,
        config.loads,
        mesh,
        p=config.params.p,
        potential=config.potential,
        reference=config.reference,
    )
    name = f"sweep_{report.case_id.value}"
    header = ("s", "delta", "parameter", "distance", "energy", "limit_energy", "weak_gap")
    outputs.csv(
        f"{name}.csv",
        header,
        [tuple(row.to_dict()[key] for key in header) for row in report.rows],
    )
    outputs.json(f"{name}.json", report.to_dict())
    if config.emit_plot_data:
        plot_header = ["part", "x", "limit"] + [
            f"u_{index}" for index in range(1, len(report.solutions) + 1)
        ]
        plot_rows = []
        for part in (Part.OMEGA1, Part.OMEGA2):
            columns = [report.limit_solution.nodal(part)] + [
                pair.nodal(part) for pair in report.solutions
            ]
            for index, x in enumerate(mesh.part_nodes(part)):
                plot_rows.append([int(part), x] + [column[index] for column in columns])
        outputs.csv(f"{name}_plot.csv", plot_header, plot_rows)
    result.summary = report.to_dict()
    result.sweep_rows = [(report.case_id.value, row) for row in report.rows]
    return EXIT_OK if report.soft_monotone else EXIT_CHECK_FAILED


def _verify(config: RunConfig, outputs: _Outputs, result: RunResult) -> int:
    passed = {}
    for name in config.checks:
        check = run_check(name, seed=config.seed)
        outputs.json(f"verify_{name}.json", check.to_dict())
        passed[name] = check.passed
    summary = {"checks": passed, "pass": all(passed.values()), "seed": config.seed}
    outputs.json("verify_summary.json", summary)
    result.summary = summary
    return EXIT_OK if summary["pass"] else EXIT_CHECK_FAILED


def _energy(config: RunConfig, outputs: _Outputs, result: RunResult) -> int:
    params, domain = config.params, config.domain
    u = config.energy_function
    quantity, part = config.energy_quantity, config.energy_part
    if quantity == "frak":
        value = {"value": seminorm_frak(u, params, domain, part)}
    elif quantity == "frac":
        value = {"value": seminorm_frac(u, params, domain, part)}
    elif quantity == "weighted":
        value = {"value": seminorm_weighted(u, params, domain, part)}
    else:
        breakdown = energy_eval(
            FunctionPair(u, u), params, config.coeffs, config.potential, config.loads, domain
        )
        value = {"value": breakdown.total, "breakdown": breakdown.to_dict()}
    summary = {
        **value,
        "function": u.label,
        "quantity": quantity,
        "part": int(part),
        "mode": params.mode.value,
        "params": params.to_dict(),
    }
    outputs.json("energy.json", summary)
    result.summary = summary
    return EXIT_OK


def _convolve(config: RunConfig, outputs: _Outputs, result: RunResult) -> int:
    u = config.convolve_function
    lower, upper = config.domain.bounds(config.convolve_part)
    x = np.linspace(lower, upper, config.convolve_points)
    values = u(x)
    smoothed = conv_Kdelta(u, config.convolve_delta, config.domain, config.convolve_part)(x)
    errors = np.abs(smoothed - values)
    outputs.csv(
        "convolve.csv", ("x", "u", "k_delta_u", "error"), zip(x, values, smoothed, errors)
    )
    summary = {
        "function": u.label,
        "delta": config.convolve_delta,
        "part": int(config.convolve_part),
        "points": int(x.size),
        "max_error": float(np.max(errors)),
        "max_error_x": float(x[np.argmax(errors)]),
    }
    outputs.json("convolve.json", summary)
    result.summary = summary
    return EXIT_OK


HANDLERS = {
    SUBCOMMAND_SOLVE: _solve,
    SUBCOMMAND_SWEEP: _sweep,
    SUBCOMMAND_VERIFY: _verify,
    SUBCOMMAND_ENERGY: _energy,
    SUBCOMMAND_CONVOLVE: _convolve,
}


def _record(config: RunConfig, result: RunResult, directory: Path) -> None:
    from .models import RunRecord

    try:
        RunRecord.objects.record(
            subcommand=result.subcommand,
            digest=text_digest(config.canonical_text()),
            seed=config.seed,
            exit_status=result.exit_status,
            summary=dumps_json(result.summary),
            output_directory=str(directory),
            sweep_rows=result.sweep_rows,
        )
    except DatabaseError:
        logger.warning("Failed to record run of %s", result.subcommand, exc_info=True)


def run(
    subcommand: str,
    config_text: str = "",
    out_dir: Optional[str] = None,
    overrides: Optional[dict] = None,
    progress: Optional[Callable[[str], None]] = None,
) -> RunResult:
    """Run a subcommand from a JSON config and write its outputs.

    Exit status is 0 on success, 1 when a check or solve fails
    and 2 for invalid configurations.
    """
    if subcommand not in SUBCOMMANDS:
        return RunResult(
            subcommand, EXIT_CONFIG_ERROR, violations=[f"Unknown subcommand: {subcommand}"]
        )
    progress = progress or (lambda text: None)
    try:
        config = parse_config(config_text, subcommand, overrides)
    except ConfigError as ex:
        return RunResult(subcommand, EXIT_CONFIG_ERROR, violations=ex.violations)

    directory = Path(out_dir or config.output_directory)
    outputs = _Outputs(directory)
    result = RunResult(subcommand, EXIT_OK)
    progress(f"Running {subcommand} into {directory}")
    started = time.perf_counter()
    try:
        result.exit_status = HANDLERS[subcommand](config, outputs, result)
    except SolverError as ex:
        logger.error("Solve failed: %s %s", ex, ex.diagnostics)
        result.exit_status = EXIT_CHECK_FAILED
        result.summary = {"error": str(ex), "diagnostics": ex.diagnostics}
        outputs.json("error.json", result.summary)
    except NtlError as ex:
        result.exit_status = EXIT_CONFIG_ERROR
        result.violations = [str(ex)]
    result.outputs = outputs.paths
    logger.info(
        "Finished %s with exit status %d in %.2f s",
        subcommand,
        result.exit_status,
        time.perf_counter() - started,
    )
    for path in outputs.paths:
        progress(f"Wrote {path}")
    if NTL_RECORD_RUNS and result.exit_status != EXIT_CONFIG_ERROR:
        _record(config, result, directory)
    return result
