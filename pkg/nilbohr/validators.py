"""
Validation of experiment configs: exact rationals, bounded integers and the
per-command instance fields. Every failure raises ParameterError naming the
offending field.
"""

import json
import re
from fractions import Fraction
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from loguru import logger
from nilbohr.approximants import convergent
from nilbohr.errors import DomainError, ParameterError
from nilbohr.logging_decorator import log_decorator as log
from nilbohr.nilmanifold import DEFAULT_RADIUS, UnitriangularElement, heisenberg
from nilbohr.search import DEFAULT_BUDGET, DEFAULT_EPSILON, DEFAULT_POOL_SIZE, DEFAULT_WINDOWS
from nilbohr.sequences import sequence_spec
from nilbohr.serialization import blocks_from_json, polynomial_from_json, to_jsonable
from nilbohr.setalg import FiniteIndexSet, canonical_blocks, enumerate_syndetic
from nilbohr.toruspoly import RealPolynomialApprox, TorusPoint, stable_polynomial

COMMANDS = (
    "thm-a",
    "thm-b",
    "staged",
    "sg-enum",
    "counterexample",
    "divisible",
    "poly-check",
    "hk-check",
)

RESOURCE_BOUNDS = {
    "N": 24,
    "k": 8,
    "l": 8,
    "d": 4,
    "m": 10**6,
    "window": 24,
    "size": 6,
    "radius": 4,
    "budget": 10**6,
    "workers": 64,
    "bound": 10**6,
    "length": 12,
    "count": 16,
    "blocks": 8,
    "pool_size": 10**5,
    "windows": 256,
    "seed": 2**32,
}

DEFAULT_OUT = "results"
DEFAULT_BLOCK_COUNT = 8
RATIONAL_PATTERN = r"^([+-]?\d+)(?:/(\d+))?$"
CONVERGENT_PATTERN = r"^cf:(.+):(\d+)$"

_REQUIRED = object()


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated instance: parsed parameters plus run options."""

    command: str
    params: dict = field(default_factory=dict)
    out: Path = Path(DEFAULT_OUT)
    workers: int = 1
    emit_latex: bool = False

    __hash__ = None

    def echo(self):
        """JSON-safe config echo; run options that cannot change results are left out."""
        return {"command": self.command, "params": to_jsonable(self.params)}


def parse_rational(text, field_name=None):
    """
    Exact rational from "p/q", an integer, or a convergent "cf:<expr>:<index>".

    :param text: raw config value
    :param field_name: config field reported on failure
    :return: Fraction
    """
    if isinstance(text, bool):
        raise ParameterError(f"expected a rational, got {text!r}", field=field_name)
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParameterError(f"expected a 'p/q' string, got {text!r}", field=field_name)
    text = text.strip()
    match = re.fullmatch(CONVERGENT_PATTERN, text)
    if match:
        try:
            return convergent(match.group(1), int(match.group(2)))
        except ParameterError as error:
            raise ParameterError(error.args[0], field=field_name) from error
    match = re.fullmatch(RATIONAL_PATTERN, text)
    if not match:
        raise ParameterError(f"{text!r} is not of the form p/q", field=field_name)
    numerator, denominator = int(match.group(1)), int(match.group(2) or 1)
    if denominator == 0:
        raise ParameterError(f"zero denominator in {text!r}", field=field_name)
    return Fraction(numerator, denominator)


def int_field(raw, name, default=_REQUIRED, low=0):
    """Integer config field within [low, RESOURCE_BOUNDS[name]]."""
    if name not in raw:
        if default is _REQUIRED:
            raise ParameterError("required field is missing", field=name)
        return default
    value = raw[name]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParameterError(f"expected an integer, got {value!r}", field=name)
    high = RESOURCE_BOUNDS.get(name)
    if value < low or (high is not None and value > high):
        raise ParameterError(f"{value} outside [{low}, {high}]", field=name)
    return value


def rational_field(raw, name, default=_REQUIRED, low=None):
    if name not in raw:
        if default is _REQUIRED:
            raise ParameterError("required field is missing", field=name)
        return default
    value = parse_rational(raw[name], name)
    if low is not None and value < low:
        raise ParameterError(f"{value} is below {low}", field=name)
    return value


def _sequence(raw, length, seed):
    return sequence_spec(raw.get("n", "id"), length, seed)


def _polynomial_approx(raw):
    coefficients = raw.get("p")
    if not isinstance(coefficients, list) or not coefficients:
        raise ParameterError("expected a non-empty list of coefficients c_1..c_d", field="p")
    try:
        return RealPolynomialApprox(tuple(parse_rational(value, "p") for value in coefficients))
    except DomainError as error:
        raise ParameterError(str(error), field="p") from error


def _group_element(raw):
    try:
        if "heisenberg" in raw:
            a, b, c = (parse_rational(value, "heisenberg") for value in raw["heisenberg"])
            return heisenberg(a, b, c)
        rows = raw.get("g")
        if not isinstance(rows, list) or not rows:
            raise ParameterError("expected matrix rows or a 'heisenberg' triple", field="g")
        if len(rows) > RESOURCE_BOUNDS["size"]:
            raise ParameterError(f"matrix size above {RESOURCE_BOUNDS['size']}", field="g")
        return UnitriangularElement.from_rows([[parse_rational(v, "g") for v in row] for row in rows])
    except (DomainError, TypeError, ValueError) as error:
        if isinstance(error, ParameterError):
            raise
        raise ParameterError(str(error), field="g") from error


def _thm_a(raw, seed):
    N = int_field(raw, "N", low=1)
    return {
        "p": _polynomial_approx(raw),
        "n": _sequence(raw, N, seed),
        "k": int_field(raw, "k"),
        "epsilon": rational_field(raw, "epsilon", DEFAULT_EPSILON, low=0),
        "N": N,
    }


def _thm_b(raw, seed):
    g = _group_element(raw)
    N = int_field(raw, "N", low=1)
    return {
        "g": g,
        "n": _sequence(raw, N, seed),
        "k": int_field(raw, "k", comb(g.size, 2)),
        "epsilon": rational_field(raw, "epsilon", DEFAULT_EPSILON, low=0),
        "N": N,
        "radius": int_field(raw, "radius", DEFAULT_RADIUS, low=1),
    }


def _staged(raw, seed):
    params = _thm_b(raw, seed)
    params["pool_size"] = int_field(raw, "pool_size", DEFAULT_POOL_SIZE, low=1)
    return params


def _sg_enum(raw, seed):
    N = int_field(raw, "N", low=1)
    return {
        "n": _sequence(raw, N, seed),
        "k": int_field(raw, "k"),
        "bound": int_field(raw, "bound", low=1),
        "N": N,
    }


def _blocks(raw, k):
    try:
        if "blocks" in raw:
            return blocks_from_json(raw["blocks"])
        if "starts" in raw:
            return canonical_blocks(raw["starts"], k)
        count = int_field(raw, "count", DEFAULT_BLOCK_COUNT, low=1)
        return canonical_blocks([j + k * (j - 1) for j in range(1, count + k + 1)], k)
    except (DomainError, TypeError) as error:
        raise ParameterError(str(error), field="blocks") from error


def _counterexample(raw, _seed):
    k = int_field(raw, "k", low=1)
    d = int_field(raw, "d", low=1)
    if d > k:
        raise ParameterError(f"need d <= k, got d={d}, k={k}", field="d")
    return {"k": k, "d": d, "l": int_field(raw, "l"), "blocks": _blocks(raw, k)}


def _divisible(raw, seed):
    N = int_field(raw, "N", low=1)
    return {
        "n": _sequence(raw, N, seed),
        "k": int_field(raw, "k", low=1),
        "m": int_field(raw, "m", low=1),
        "length": int_field(raw, "length", low=1),
        "N": N,
    }


def _torus_value(value, field_name):
    if isinstance(value, list):
        return TorusPoint(tuple(parse_rational(a, field_name) for a in value))
    return TorusPoint((parse_rational(value, field_name),))


def _poly_check(raw, _seed):
    k = int_field(raw, "k", low=1)
    window = int_field(raw, "window", 3 * k, low=1)
    if window % k:
        raise ParameterError(f"window {window} is not a multiple of {k}", field="window")
    try:
        if "polynomial" in raw:
            f = polynomial_from_json(raw["polynomial"])
        elif "stable" in raw:
            stable = raw["stable"]
            reps = {
                FiniteIndexSet.of(entry["gamma"]): _torus_value(entry["a"], "stable")
                for entry in stable["coeffs"]
            }
            f = stable_polynomial(reps, k, int(stable["d"]), window, int(stable.get("m", 1)))
        else:
            raise ParameterError("give 'polynomial' or 'stable'", field="polynomial")
    except (DomainError, KeyError, TypeError) as error:
        raise ParameterError(str(error), field="polynomial") from error
    params = {
        "k": k,
        "window": window,
        "f": f,
        "tol": rational_field(raw, "tol", 0, low=0),
        "blocks": int_field(raw, "blocks", max(2, k), low=1),
    }
    if "l" in raw:
        l = int_field(raw, "l")
        if "tracked" in raw:
            try:
                tracked = [FiniteIndexSet.of(beta) for beta in raw["tracked"]]
            except (DomainError, TypeError) as error:
                raise ParameterError(str(error), field="tracked") from error
        else:
            tracked = list(enumerate_syndetic(params["blocks"], l))
        params.update(
            {
                "l": l,
                "tracked": tracked,
                "epsilon": rational_field(raw, "epsilon", DEFAULT_EPSILON, low=0),
                "budget": int_field(raw, "budget", DEFAULT_BUDGET, low=1),
                "windows": int_field(raw, "windows", DEFAULT_WINDOWS, low=1),
            }
        )
    return params


def _hk_check(raw, _seed):
    d = int_field(raw, "d")
    params = {"d": d}
    if "values" in raw:
        values = raw["values"]
        if not isinstance(values, list) or not values:
            raise ParameterError("expected a list of vertex values", field="values")
        size = len(values)
        complete = size & (size - 1) == 0
        if not complete and (size + 1) & size:
            raise ParameterError(
                f"{size} values fill neither a cube nor a cube minus its corner", field="values"
            )
        params["values"] = [_torus_value(value, "values") for value in values]
        params["complete"] = complete
    if "cube" in raw:
        try:
            params["cube"] = [
                UnitriangularElement.from_rows([[parse_rational(v, "cube") for v in row] for row in matrix])
                for matrix in raw["cube"]
            ]
        except (DomainError, TypeError) as error:
            raise ParameterError(str(error), field="cube") from error
        size = len(params["cube"])
        if size & (size - 1):
            raise ParameterError(f"{size} matrices do not fill a cube", field="cube")
    if "values" not in params and "cube" not in params:
        raise ParameterError("give 'values' and/or 'cube'", field="values")
    return params


COMMAND_PARSERS = {
    "thm-a": _thm_a,
    "thm-b": _thm_b,
    "staged": _staged,
    "sg-enum": _sg_enum,
    "counterexample": _counterexample,
    "divisible": _divisible,
    "poly-check": _poly_check,
    "hk-check": _hk_check,
}


@log
def load_config(path):
    """Reads a JSON config file into a dict."""
    try:
        with open(path, "r", encoding="utf-8") as config_file:
            raw = json.load(config_file)
    except (OSError, json.JSONDecodeError) as error:
        raise ParameterError(f"cannot read {path}: {error}", field="config") from error
    if not isinstance(raw, dict):
        raise ParameterError("config must be a JSON object", field="config")
    return raw


@log
def build_config(command, raw, out=None, workers=None, seed=None, emit_latex=False):
    """
    Validates a raw config for ``command``.

    Command-line options win over config values for out, workers and seed.

    :return: ExperimentConfig
    """
    if command not in COMMAND_PARSERS:
        raise ParameterError(f"unknown command {command!r}", field="command")
    raw = dict(raw)
    if seed is not None:
        raw["seed"] = seed
    seed = int_field(raw, "seed", None)
    params = COMMAND_PARSERS[command](raw, seed)
    if seed is not None:
        params["seed"] = seed
    workers = workers if workers is not None else int_field(raw, "workers", 1, low=1)
    if not 1 <= workers <= RESOURCE_BOUNDS["workers"]:
        raise ParameterError(f"{workers} outside [1, {RESOURCE_BOUNDS['workers']}]", field="workers")
    out = Path(out if out is not None else raw.get("out", DEFAULT_OUT))
    logger.info("CONFIG SUCCESS: {} with {}", command, sorted(params))
    return ExperimentConfig(command, params, out, workers, bool(emit_latex or raw.get("emit_latex")))
