"""
Re-verification of emitted result files.

Nothing here calls the engines' evaluation code: polynomial values, matrix
powers, lattice reduction, lattice distances, syndeticity and the
counterexample values are recomputed from the raw numbers in the file.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import floor
from loguru import logger
from nilbohr.logging_decorator import log_decorator as log


@dataclass
class VerificationReport:
    ok: bool = True
    checks: list = field(default_factory=list)

    def fail(self, message):
        self.ok = False
        self.checks.append(f"FAIL {message}")
        logger.error("VERIFY FAILURE: {}", message)

    def passed(self, message):
        self.checks.append(f"ok   {message}")


def _q(text):
    numerator, _, denominator = str(text).partition("/")
    return Fraction(int(numerator), int(denominator or 1))


def _nearest_distance(x):
    low = floor(x)
    return min(x - low, low + 1 - x)


def _gaps_within(indices, k):
    return all(later - earlier <= k for earlier, later in zip(indices, indices[1:]))


def _check_index_set(report, indices, k, N):
    if list(indices) != sorted(set(indices)) or not indices:
        report.fail(f"witness {indices} is not a non-empty increasing list")
    elif indices[0] < 1 or indices[-1] > N:
        report.fail(f"witness {indices} leaves [1..{N}]")
    elif not _gaps_within(indices, k):
        report.fail(f"witness {indices} has a gap above {k}")
    else:
        report.passed(f"witness {indices} is {k}-syndetic inside [1..{N}]")


def _matrix_product(left, right):
    size = len(left)
    return [
        [sum((left[i][p] * right[p][j] for p in range(size)), Fraction(0)) for j in range(size)]
        for i in range(size)
    ]


def _matrix_power(matrix, exponent):
    """Square-and-multiply over the bits of exponent."""
    size = len(matrix)
    result = [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]
    square = matrix
    for bit in bin(exponent)[:1:-1]:
        if bit == "1":
            result = _matrix_product(result, square)
        square = _matrix_product(square, square)
    return result


def _reduce(matrix):
    """Right-multiplies by integer elementary matrices until offsets lie in [0, 1)."""
    size = len(matrix)
    for offset in range(1, size):
        for i in range(size - offset):
            j = i + offset
            whole = floor(matrix[i][j])
            if whole:
                elementary = [[Fraction(int(p == q)) for q in range(size)] for p in range(size)]
                elementary[i][j] = Fraction(-whole)
                matrix = _matrix_product(matrix, elementary)
    return matrix


def _lattice_distance(matrix, radius):
    """
    min over integer unitriangular gamma with entries in [-R, R] of the
    largest off-diagonal entry of reduced * gamma, by branch and bound.

    Entry (i, j) of the product is gamma_ij + reduced_ij plus terms in
    gamma entries of smaller offset, so gamma is filled offset by offset.
    """
    size = len(matrix)
    positions = [(i, i + offset) for offset in range(1, size) for i in range(size - offset)]
    reduced = _reduce(matrix)
    gamma = [[Fraction(int(p == q)) for q in range(size)] for p in range(size)]
    best = [None]

    def descend(depth, worst):
        if depth == len(positions):
            best[0] = worst
            return
        i, j = positions[depth]
        fixed = reduced[i][j] + sum((reduced[i][p] * gamma[p][j] for p in range(i + 1, j)), Fraction(0))
        for choice in sorted(range(-radius, radius + 1), key=lambda t: abs(fixed + t)):
            entry = max(worst, abs(fixed + choice))
            if best[0] is not None and entry >= best[0]:
                break
            gamma[i][j] = Fraction(choice)
            descend(depth + 1, entry)
        gamma[i][j] = Fraction(0)

    descend(0, Fraction(0))
    return best[0]


def _subsets_with_gaps(length, k):
    for mask in range(1, 1 << length):
        indices = [index + 1 for index in range(length) if mask >> index & 1]
        if _gaps_within(indices, k):
            yield indices


def _witness_header(report, document):
    outcome = document["result"]["outcome"]
    witness = outcome.get("witness")
    if witness is None:
        report.passed("no witness recorded; nothing to re-evaluate")
    return outcome, witness


def _verify_thm_a(report, document):
    params = document["config"]["params"]
    outcome, witness = _witness_header(report, document)
    if witness is None:
        return
    _check_index_set(report, witness, params["k"], params["N"])
    total = sum(params["n"][index - 1] for index in witness)
    coefficients = [_q(value) for value in params["p"]]
    value = sum((c * total ** (power + 1) for power, c in enumerate(coefficients)), Fraction(0))
    distance = _nearest_distance(value)
    epsilon = _q(params["epsilon"])
    if distance > epsilon:
        report.fail(f"||p({total})|| = {distance} exceeds {epsilon}")
    elif distance != _q(outcome["value"]):
        report.fail(f"recorded value {outcome['value']} differs from {distance}")
    else:
        report.passed(f"||p({total})|| = {distance} <= {epsilon}")


def _verify_thm_b(report, document):
    params = document["config"]["params"]
    outcome, witness = _witness_header(report, document)
    if witness is None:
        return
    _check_index_set(report, witness, params["k"], params["N"])
    total = sum(params["n"][index - 1] for index in witness)
    matrix = [[_q(value) for value in row] for row in params["g"]]
    distance = _lattice_distance(_matrix_power(matrix, total), params["radius"])
    epsilon = _q(params["epsilon"])
    if distance > epsilon:
        report.fail(f"dist(g^{total}) = {distance} exceeds {epsilon}")
    elif distance != _q(outcome["value"]):
        report.fail(f"recorded value {outcome['value']} differs from {distance}")
    else:
        report.passed(f"dist(g^{total}) = {distance} <= {epsilon}")


def _half_count(alpha, k, d):
    count = sum(
        1
        for size in range(1, d + 1)
        for gamma in combinations(alpha, size)
        if gamma[-1] - gamma[0] <= k
    )
    return Fraction(count % 2, 2)


def _verify_counterexample(report, document):
    params = document["config"]["params"]
    result = document["result"]
    k, d, l = params["k"], params["d"], params["l"]
    blocks = params["blocks"]
    values = [_half_count(block, k, d) for block in blocks]
    recorded = [_q(point[0]) for point in result["block_values"]]
    if values != recorded:
        report.fail(f"block values {recorded} differ from recount {values}")
    else:
        report.passed(f"{len(values)} block values recounted")
    expected = all(value == Fraction(1, 2) for value in values[max(l, 1) - 1 :])
    if expected != result["half_from_l"]:
        report.fail(f"half_from_l recorded as {result['half_from_l']}, recount gives {expected}")
    else:
        report.passed(f"half_from_l = {expected}")


def _verify_divisible(report, document):
    params = document["config"]["params"]
    result = document["result"]
    blocks = result.get("blocks")
    if blocks is None:
        report.passed("no block sequence recorded; nothing to re-evaluate")
        return
    k, m, n = params["k"], params["m"], params["n"]
    for indices in _subsets_with_gaps(len(blocks), k):
        total = sum(n[element - 1] for index in indices for element in blocks[index - 1])
        if total % m:
            report.fail(f"sum over blocks {indices} is {total}, not divisible by {m}")
            return
    report.passed(f"every S_{k} union of {len(blocks)} blocks sums to a multiple of {m}")


def _periodic_coefficients(polynomial, k):
    """Coefficients with minimum in [1..k], keyed by the tuple gamma; the rest follow by shifts of k."""
    table = {}
    for entry in polynomial["coeffs"]:
        gamma = tuple(entry["gamma"])
        if not gamma or gamma[0] <= k:
            table[gamma] = [_q(value) for value in entry["a"]]
    return table


def _periodic_value(table, alpha, k, d, dimension):
    """Sum of a_gamma over gamma inside alpha with |gamma| <= d and diam <= k."""
    totals = list(table.get((), [Fraction(0)] * dimension))
    elements = sorted(alpha)
    for position, first in enumerate(elements):
        near = []
        for later in elements[position + 1 :]:
            if later - first > k:
                break
            near.append(later)
        shift = (first - 1) // k * k
        for size in range(min(d - 1, len(near)) + 1):
            for rest in combinations(near, size):
                coefficient = table.get(tuple(x - shift for x in (first,) + rest))
                if coefficient:
                    totals = [total + value for total, value in zip(totals, coefficient)]
    return max(_nearest_distance(total) for total in totals)


def _blocks_well_formed(blocks, k, l):
    if any((block[-1] - block[0]) % k for block in blocks):
        return False
    if any(blocks[i + l + 1][0] <= blocks[i][-1] + k for i in range(len(blocks) - l - 1)):
        return False
    for indices in _subsets_with_gaps(len(blocks), l):
        union = sorted(x for index in indices for x in blocks[index - 1])
        if not _gaps_within(union, k):
            return False
    return True


def _verify_poly_check(report, document):
    params = document["config"]["params"]
    outcome = document["result"].get("outcome")
    witness = outcome.get("witness") if outcome else None
    if witness is None:
        report.passed("no witness recorded; nothing to re-evaluate")
        return
    k, l = params["k"], params["l"]
    polynomial = params["f"]
    table = _periodic_coefficients(polynomial, k)
    blocks = [sorted(block) for block in witness]
    if _blocks_well_formed(blocks, k, l):
        report.passed(f"{len(blocks)} blocks are well formed for k={k}, l={l}")
    else:
        report.fail(f"witness blocks are not well formed for k={k}, l={l}")
    worst = Fraction(0)
    for beta in params["tracked"]:
        union = [x for index in beta for x in blocks[index - 1]]
        worst = max(worst, _periodic_value(table, union, k, polynomial["d"], polynomial["m"]))
    epsilon = _q(params["epsilon"])
    if worst > epsilon:
        report.fail(f"max tracked ||f(alpha_beta)|| = {worst} exceeds {epsilon}")
    elif worst != _q(outcome["value"]):
        report.fail(f"recorded value {outcome['value']} differs from {worst}")
    else:
        report.passed(f"max over {len(params['tracked'])} tracked sets = {worst} <= {epsilon}")


VERIFIERS = {
    "thm-a": _verify_thm_a,
    "thm-b": _verify_thm_b,
    "staged": _verify_thm_b,
    "counterexample": _verify_counterexample,
    "divisible": _verify_divisible,
    "poly-check": _verify_poly_check,
}


@log
def verify_document(document):
    """
    :param document: parsed result JSON
    :return: VerificationReport
    """
    report = VerificationReport()
    command = document.get("command")
    verifier = VERIFIERS.get(command)
    if verifier is None:
        report.passed(f"{command} results carry no witness")
        return report
    try:
        verifier(report, document)
    except (KeyError, IndexError, TypeError, ValueError) as error:
        report.fail(f"malformed result file: {error!r}")
    if report.ok:
        logger.info("VERIFY SUCCESS: {} result re-verified", command)
    return report
