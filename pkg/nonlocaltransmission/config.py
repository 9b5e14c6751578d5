"""Run configurations: strict JSON schema, defaults and semantic validation."""

import copy
import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from jsonschema import Draft7Validator

from . import __title__
from .constants import SUBCOMMAND_SWEEP, TRACE_SUBCOMMANDS
from .energies import LoadSpec
from .exceptions import ConfigError, NtlError
from .geometry import Domain, Part, delta_threshold
from .harness import DEFAULT_GRIDS, CaseId
from .helpers import dumps_json
from .kernels import CoefficientField, Mode, ModelParams
from .library import NamedFunction, Potential, make_function, make_potential
from .spaces import BoundaryData
from .utils import LoggerAddTag
from .verify import CHECKS

logger = LoggerAddTag(logging.getLogger(__name__), __title__)

QUANTITIES = ("frak", "frac", "weighted", "energy")

_FUNCTION_SCHEMA = {
    "oneOf": [
        {"type": "string", "minLength": 1},
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["name"],
            "properties": {
                "name": {"type": "string"},
                "args": {"type": "array", "items": {"type": "number"}},
                "x": {"type": "array", "items": {"type": "number"}, "minItems": 2},
                "y": {"type": "array", "items": {"type": "number"}, "minItems": 2},
            },
        },
    ]
}


def _section(properties: dict) -> dict:
    return {"type": "object", "additionalProperties": False, "properties": properties}


CONFIG_SCHEMA = _section(
    {
        "domain": _section(
            {
                "a": {"type": "number"},
                "b": {"type": "number"},
                "xi": {"type": "number"},
                "kappa0": {"type": "number", "minimum": 1},
                "kappa1": {"type": "number", "exclusiveMinimum": 0},
            }
        ),
        "params": _section(
            {
                "s": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "p": {"type": "number", "exclusiveMinimum": 1},
                "delta": {"type": "number", "minimum": 0},
                "mode": {"enum": [mode.value for mode in Mode] + [None]},
            }
        ),
        "mesh": _section({"n_per_side": {"type": "integer", "minimum": 2}}),
        "coefficients": _section(
            {
                "alpha": _FUNCTION_SCHEMA,
                "beta": _FUNCTION_SCHEMA,
                "alpha0": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            }
        ),
        "loads": _section(
            {
                "f1": {"oneOf": [_FUNCTION_SCHEMA, {"type": "null"}]},
                "f2": {"oneOf": [_FUNCTION_SCHEMA, {"type": "null"}]},
            }
        ),
        "potential": _section(
            {
                "name": {"enum": ["power", "saturating"]},
                "theta": {"type": "number", "minimum": 0, "maximum": 0.5},
            }
        ),
        "solver": _section(
            {
                "penalty_eps": {
                    "oneOf": [{"type": "number", "exclusiveMinimum": 0}, {"type": "null"}]
                },
                "g0": {"type": "number"},
                "g1": {"type": "number"},
                "g2": {"type": "number"},
            }
        ),
        "sweep": _section(
            {
                "case": {"enum": [case.value for case in CaseId]},
                "grid": {
                    "oneOf": [
                        {
                            "type": "array",
                            "minItems": 1,
                            "items": {
                                "type": "array",
                                "items": {"type": "number"},
                                "minItems": 2,
                                "maxItems": 2,
                            },
                        },
                        {"type": "null"},
                    ]
                },
                "reference": {"oneOf": [_FUNCTION_SCHEMA, {"type": "null"}]},
                "emit_plot_data": {"type": "boolean"},
            }
        ),
        "verify": _section(
            {"checks": {"type": "array", "items": {"enum": sorted(CHECKS)}}}
        ),
        "energy": _section(
            {
                "function": _FUNCTION_SCHEMA,
                "quantity": {"enum": list(QUANTITIES)},
                "part": {"enum": [1, 2]},
            }
        ),
        "convolve": _section(
            {
                "function": _FUNCTION_SCHEMA,
                "delta": {"type": "number", "exclusiveMinimum": 0},
                "part": {"enum": [1, 2]},
                "points": {"type": "integer", "minimum": 2},
            }
        ),
        "output": _section({"directory": {"type": "string", "minLength": 1}}),
        "seed": {"type": "integer", "minimum": 0},
    }
)

DEFAULT_CONFIG = {
    "domain": {"a": -1.0, "b": 1.0, "xi": 0.0, "kappa0": 1.0, "kappa1": 1.0},
    "params": {"s": 0.75, "p": 2.0, "delta": 0.1, "mode": None},
    "mesh": {"n_per_side": 32},
    "coefficients": {"alpha": "constant:1", "beta": "constant:1", "alpha0": 1.0},
    "loads": {"f1": "constant:1", "f2": "constant:1"},
    "potential": {"name": "power", "theta": 0.0},
    "solver": {"penalty_eps": None, "g0": 0.0, "g1": 0.0, "g2": 0.0},
    "sweep": {"case": "e", "grid": None, "reference": None, "emit_plot_data": False},
    "verify": {"checks": []},
    "energy": {"function": "sine:1", "quantity": "energy", "part": 1},
    "convolve": {"function": "sine:1", "delta": 0.1, "part": 1, "points": 101},
    "output": {"directory": "ntl_output"},
    "seed": 0,
}


def merge(base: dict, update: Optional[dict]) -> dict:
    """Deep merge of update into a copy of base."""
    result = copy.deepcopy(base)
    for key, value in (update or {}).items():
        if isinstance(value, dict) and isinstance(result.get(key), dict):
            result[key] = merge(result[key], value)
        else:
            result[key] = copy.deepcopy(value)
    return result


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration with its objects built."""

    raw: dict
    domain: Domain
    params: ModelParams
    n_per_side: int
    coeffs: CoefficientField
    loads: LoadSpec
    potential: Potential
    penalty_eps: Optional[float]
    bc: BoundaryData
    case: CaseId
    grid: Tuple[Tuple[float, float], ...]
    reference: Optional[NamedFunction]
    emit_plot_data: bool
    checks: Tuple[str, ...]
    energy_function: NamedFunction
    energy_quantity: str
    energy_part: Part
    convolve_function: NamedFunction
    convolve_delta: float
    convolve_part: Part
    convolve_points: int
    output_directory: str
    seed: int

    def canonical_text(self) -> str:
        return dumps_json(self.raw)


def _path(error) -> str:
    return ".".join(str(x) for x in error.absolute_path) or "<root>"


def schema_violations(document) -> List[str]:
    validator = Draft7Validator(CONFIG_SCHEMA)
    return [
        f"{_path(error)}: {error.message}"
        for error in sorted(validator.iter_errors(document), key=lambda e: list(map(str, e.absolute_path)))
    ]


def _threshold_text(domain: Domain) -> str:
    return str(Fraction(delta_threshold(domain)).limit_denominator(1000))


def _function(raw, key: str, violations: List[str]) -> Optional[NamedFunction]:
    if raw is None:
        return None
    try:
        return make_function(raw)
    except NtlError as ex:
        violations.append(f"{key}: {ex}")
        return None


def _point_violations(
    s: float, p: float, delta: float, domain: Domain, needs_trace: bool, key: str
) -> List[str]:
    violations = []
    if needs_trace and s * p <= 1:
        violations.append(f"{key}: sp>1 required (got sp={s * p:g})")
    if domain is not None and delta >= delta_threshold(domain):
        violations.append(
            f"{key}: delta < {_threshold_text(domain)} required (got delta={delta:g})"
        )
    return violations


def parse_config(
    text: str, subcommand: str = None, overrides: dict = None
) -> RunConfig:
    """Parse and validate a JSON run configuration.

    Raises ConfigError listing all violations.
    """
    try:
        document = json.loads(text) if text and text.strip() else {}
    except json.JSONDecodeError as ex:
        raise ConfigError([f"<root>: invalid JSON: {ex}"]) from None
    if not isinstance(document, dict):
        raise ConfigError(["<root>: a config must be a JSON object"])
    document = merge(document, overrides)
    violations = schema_violations(document)
    if violations:
        raise ConfigError(violations)

    raw = merge(DEFAULT_CONFIG, document)
    needs_trace = subcommand in TRACE_SUBCOMMANDS
    domain = params = coeffs = potential = None
    try:
        domain = Domain(**raw["domain"])
    except NtlError as ex:
        violations.append(f"domain: {ex}")

    values = raw["params"]
    try:
        params = ModelParams(
            s=values["s"], p=values["p"], delta=values["delta"], mode=values["mode"]
        )
    except NtlError as ex:
        violations.append(f"params: {ex}")
    if subcommand != SUBCOMMAND_SWEEP:
        violations += _point_violations(
            values["s"], values["p"], values["delta"], domain, needs_trace, "params"
        )

    functions = {}
    for section, key in (
        ("coefficients", "alpha"),
        ("coefficients", "beta"),
        ("loads", "f1"),
        ("loads", "f2"),
        ("sweep", "reference"),
        ("energy", "function"),
        ("convolve", "function"),
    ):
        functions[key, section] = _function(raw[section][key], f"{section}.{key}", violations)
    try:
        coeffs = CoefficientField(
            alpha=functions["alpha", "coefficients"] or CoefficientField().alpha,
            beta=functions["beta", "coefficients"] or CoefficientField().beta,
            alpha0=raw["coefficients"]["alpha0"],
        )
    except NtlError as ex:
        violations.append(f"coefficients: {ex}")
    try:
        potential = make_potential(values["p"], **raw["potential"])
    except NtlError as ex:
        violations.append(f"potential: {ex}")

    case = CaseId(raw["sweep"]["case"])
    grid = tuple(tuple(point) for point in (raw["sweep"]["grid"] or DEFAULT_GRIDS[case]))
    if subcommand == SUBCOMMAND_SWEEP:
        try:
            case.validate_grid(grid)
        except NtlError as ex:
            violations.append(f"sweep.grid: {ex}")
        for s, delta in grid:
            violations += _point_violations(
                s, values["p"], delta, domain, True, f"sweep.grid[{s:g}, {delta:g}]"
            )
            if not 0 < s <= 1 or delta < 0:
                violations.append(f"sweep.grid: invalid point ({s:g}, {delta:g})")

    convolve = raw["convolve"]
    if domain is not None and convolve["delta"] >= delta_threshold(domain):
        if subcommand == "convolve":
            violations.append(
                f"convolve.delta: delta < {_threshold_text(domain)} required "
                f"(got delta={convolve['delta']:g})"
            )

    if violations:
        raise ConfigError(violations)
    solver = raw["solver"]
    config = RunConfig(
        raw=raw,
        domain=domain,
        params=params,
        n_per_side=raw["mesh"]["n_per_side"],
        coeffs=coeffs,
        loads=LoadSpec(functions["f1", "loads"], functions["f2", "loads"]),
        potential=potential,
        penalty_eps=solver["penalty_eps"],
        bc=BoundaryData(solver["g0"], solver["g1"], solver["g2"]),
        case=case,
        grid=grid,
        reference=functions["reference", "sweep"],
        emit_plot_data=raw["sweep"]["emit_plot_data"],
        checks=tuple(raw["verify"]["checks"]) or tuple(CHECKS),
        energy_function=functions["function", "energy"],
        energy_quantity=raw["energy"]["quantity"],
        energy_part=Part(raw["energy"]["part"]),
        convolve_function=functions["function", "convolve"],
        convolve_delta=convolve["delta"],
        convolve_part=Part(convolve["part"]),
        convolve_points=convolve["points"],
        output_directory=raw["output"]["directory"],
        seed=raw["seed"],
    )
    logger.debug("Parsed config for %s: %s", subcommand, params)
    return config
