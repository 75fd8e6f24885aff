"""
Controller: runs one validated ExperimentConfig through its engine and
writes the result JSON, the CSV summary row, the optional LaTeX table and
the ledger entry.

Exit statuses: 0 for a completed run (witness or exhaustive absence
included), 2 for parameter or domain errors, 1 for anything else.
"""

import hashlib
import json
import time
from datetime import datetime, timezone
from dataclasses import fields
from importlib.metadata import PackageNotFoundError, version
from loguru import logger
from peewee import PeeweeException
import nilbohr
from nilbohr.errors import DomainError, ParameterError
from nilbohr.hkcube import (
    TorusCube,
    all_vertices,
    alternating_sum,
    complete_corner_abelian,
    hk_factorize_unitriangular,
    is_hk_cube_abelian,
    point_cube,
)
from nilbohr.ledger import delete_run, get_run, list_runs, record_run
from nilbohr.logging_decorator import log_decorator as log
from nilbohr.reporting import append_summary, result_paths, write_json, write_latex
from nilbohr.search import (
    brute_force_thmA,
    brute_force_thmB,
    dilation_sums,
    find_divisible_blocks,
    perturbation_search,
    sg_enumerate,
    staged_nil_search,
    verify_counterexample,
)
from nilbohr.serialization import dumps, rational_to_str, to_jsonable
from nilbohr.toruspoly import check_restriction_invariance, degree, is_stable_form
from nilbohr.verify import verify_document

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_PARAMETER = 2

VERSIONED_PACKAGES = ("sympy", "peewee", "loguru")


def run_id_of(config):
    """SHA-256 of the canonical config echo."""
    return hashlib.sha256(dumps(config.echo()).encode("utf-8")).hexdigest()


def versions():
    found = {"nilbohr": nilbohr.__version__}
    for package in VERSIONED_PACKAGES:
        try:
            found[package] = version(package)
        except PackageNotFoundError:
            found[package] = "unknown"
    return found


def outcome_record(outcome):
    """SearchOutcome as a plain dict; moves keep their position and placements."""
    record = {item.name: getattr(outcome, item.name) for item in fields(outcome)}
    record["found"] = outcome.found
    record["moves"] = [
        {"position": move.position, "placements": [list(pair) for pair in move.placements()]}
        for move in outcome.moves
    ]
    return record


def _run_thm_a(params, workers):
    outcome = brute_force_thmA(
        params["p"], params["n"], params["k"], params["epsilon"], params["N"], workers=workers
    )
    return {"outcome": outcome_record(outcome)}


def _run_thm_b(params, workers):
    outcome = brute_force_thmB(
        params["g"],
        params["n"],
        params["k"],
        params["epsilon"],
        params["N"],
        params["radius"],
        workers=workers,
    )
    return {"outcome": outcome_record(outcome)}


def _run_staged(params, _workers):
    outcome = staged_nil_search(
        params["g"],
        params["n"],
        params["k"],
        params["epsilon"],
        params["N"],
        params["radius"],
        params["pool_size"],
    )
    return {"outcome": outcome_record(outcome)}


def _run_sg_enum(params, _workers):
    sums = sg_enumerate(params["n"], params["k"], params["bound"])
    return {"sums": sums, "count": len(sums)}


def _run_counterexample(params, _workers):
    report = verify_counterexample(params["k"], params["d"], params["l"], params["blocks"])
    result = {item.name: getattr(report, item.name) for item in fields(report)}
    result["covering_holds"] = report.covering_holds
    return result


def _run_divisible(params, _workers):
    report = find_divisible_blocks(params["n"], params["k"], params["m"], params["length"])
    result = {item.name: getattr(report, item.name) for item in fields(report)}
    result["found"] = report.found
    if report.found:
        result["sums"] = dilation_sums(params["n"], report.blocks, params["k"])
    return result


def _run_poly_check(params, _workers):
    f, k, window = params["f"], params["k"], params["window"]
    stable = is_stable_form(f, k, window)
    result = {
        "degree": degree(f),
        "stable": stable.stable,
        "stable_violations": [list(item) for item in stable.violations],
    }
    if stable.stable:
        invariance = check_restriction_invariance(f, k, window, params["tol"], params["blocks"])
        result["invariance"] = {
            "invariant": invariance.invariant,
            "sequences_checked": invariance.sequences_checked,
            "sets_checked": invariance.sets_checked,
            "failures": [list(item) for item in invariance.failures],
        }
        if "l" in params:
            outcome = perturbation_search(
                f, k, params["l"], params["tracked"], params["epsilon"], params["budget"], params["windows"]
            )
            result["outcome"] = outcome_record(outcome)
    return result


def _run_hk_check(params, _workers):
    result = {}
    if "values" in params:
        values = params["values"]
        if params["complete"]:
            cube = TorusCube.from_list(values, params["d"])
            result["member"] = is_hk_cube_abelian(cube)
            result["alternating_sum"] = alternating_sum(cube)
        else:
            r = len(values).bit_length()
            cube = point_cube(dict(zip(all_vertices(r), values)), params["d"])
            result["corner"] = complete_corner_abelian(cube)
    if "cube" in params:
        matrices = params["cube"]
        r = len(matrices).bit_length() - 1
        factorization = hk_factorize_unitriangular(dict(zip(all_vertices(r), matrices)))
        result["factorization"] = {
            "member": factorization.member,
            "violations": [list(omega) for omega in factorization.violations],
            "factors": [
                {"omega": list(omega), "g": factor} for omega, factor in factorization.factors.items()
            ],
        }
    return result


COMMAND_RUNNERS = {
    "thm-a": _run_thm_a,
    "thm-b": _run_thm_b,
    "staged": _run_staged,
    "sg-enum": _run_sg_enum,
    "counterexample": _run_counterexample,
    "divisible": _run_divisible,
    "poly-check": _run_poly_check,
    "hk-check": _run_hk_check,
}


def _summary_row(run_id, command, status, result):
    outcome = result.get("outcome", {})
    value = outcome.get("value", result.get("minimum"))
    return {
        "run_id": run_id,
        "command": command,
        "status": status,
        "found": outcome.get("found", result.get("found", "")),
        "value": rational_to_str(value) if value is not None else None,
        "sets_examined": outcome.get("sets_examined", result.get("sets_checked", "")),
    }


@log
def run(config):
    """
    Runs one experiment and writes its result files.

    :param config: ExperimentConfig
    :return: exit status
    """
    run_id = run_id_of(config)
    logger.info("RUN START: {} ({})", config.command, run_id[:12])
    started = time.perf_counter()
    try:
        result = COMMAND_RUNNERS[config.command](config.params, config.workers)
    except (ParameterError, DomainError) as error:
        logger.error("RUN FAILURE: {}", error)
        return EXIT_PARAMETER
    except Exception as error:  # pylint: disable=broad-exception-caught
        logger.exception("RUN FAILURE: internal error {!r}", error)
        return EXIT_INTERNAL
    wall_time = time.perf_counter() - started

    document = {
        "command": config.command,
        "config": config.echo(),
        "versions": versions(),
        "run_id": run_id,
        "status": EXIT_OK,
        "result": to_jsonable(result),
    }
    row = _summary_row(run_id, config.command, EXIT_OK, result)
    json_path, tex_path = result_paths(config.out, config.command, run_id)
    try:
        write_json(json_path, document)
        append_summary(config.out, row, wall_time)
        if config.emit_latex:
            write_latex(tex_path, document)
    except OSError as error:
        logger.error("WRITE FAILURE: {}", error)
        return EXIT_INTERNAL

    row.update(
        {
            "wall_time": wall_time,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "result_file": str(json_path),
        }
    )
    try:
        record_run(row)
    except PeeweeException as error:
        logger.warning("Ledger not updated: {}", error)
    logger.info("RUN SUCCESS: {} in {:.3f}s -> {}", config.command, wall_time, json_path)
    return EXIT_OK


@log
def verify_file(path):
    """
    Re-verifies a result file through the independent checker.

    :return: (exit status, VerificationReport or None)
    """
    try:
        with open(path, "r", encoding="utf-8") as result_file:
            document = json.load(result_file)
    except (OSError, json.JSONDecodeError) as error:
        logger.error("VERIFY FAILURE: cannot read {}: {}", path, error)
        return EXIT_PARAMETER, None
    report = verify_document(document)
    return (EXIT_OK if report.ok else EXIT_INTERNAL), report


@log
def history(limit=20, run_id=None):
    """
    Most recent ledger rows, or an empty list when the ledger is unavailable.

    :param run_id: when given, only the row recorded under this id
    """
    try:
        if run_id is not None:
            row = get_run(run_id)
            return [row] if row is not None else []
        return list_runs(limit)
    except PeeweeException as error:
        logger.warning("Ledger unavailable: {}", error)
        return []


@log
def forget(run_id):
    """Deletes a ledger row; False when it is missing or the ledger is unavailable."""
    try:
        return delete_run(run_id)
    except PeeweeException as error:
        logger.warning("Ledger unavailable: {}", error)
        return False
