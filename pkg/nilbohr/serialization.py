"""
Exact JSON forms: rationals as "p/q" strings, index sets as sorted integer
arrays, block sequences as arrays of arrays, matrices as row-major "p/q"
arrays and polynomials as {"m", "d", "coeffs": [{"gamma", "a"}]}.
"""

import json
from fractions import Fraction
from functools import singledispatch
from nilbohr.errors import DomainError
from nilbohr.nilmanifold import UnitriangularElement
from nilbohr.setalg import BlockSequence, FiniteIndexSet
from nilbohr.toruspoly import RealPolynomialApprox, TorusPoint, TorusPolynomial


def rational_to_str(value):
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def rational_from_str(text):
    """Strict reader for the strings written by ``rational_to_str``."""
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    try:
        numerator, _, denominator = str(text).partition("/")
        return Fraction(int(numerator), int(denominator or 1))
    except (ValueError, ZeroDivisionError) as error:
        raise DomainError(f"not a rational: {text!r}") from error


@singledispatch
def to_jsonable(value):
    """JSON-safe form of library values; containers are converted recursively."""
    return value


@to_jsonable.register
def _(value: Fraction):
    return rational_to_str(value)


@to_jsonable.register
def _(value: FiniteIndexSet):
    return value.to_list()


@to_jsonable.register
def _(value: BlockSequence):
    return value.to_lists()


@to_jsonable.register
def _(value: TorusPoint):
    return [rational_to_str(a) for a in value.coords]


@to_jsonable.register
def _(value: UnitriangularElement):
    return [[rational_to_str(a) for a in row] for row in value.entries]


@to_jsonable.register
def _(value: RealPolynomialApprox):
    return [rational_to_str(a) for a in value.coeffs]


@to_jsonable.register
def _(value: TorusPolynomial):
    return {
        "m": value.dimension,
        "d": value.degree,
        "coeffs": [
            {"gamma": gamma.to_list(), "a": to_jsonable(point)}
            for gamma, point in value.coefficients.items()
        ],
    }


@to_jsonable.register(dict)
def _(value):
    return {str(key): to_jsonable(item) for key, item in value.items()}


@to_jsonable.register(list)
@to_jsonable.register(tuple)
def _(value):
    return [to_jsonable(item) for item in value]


def polynomial_from_json(document):
    """Inverse of the TorusPolynomial form."""
    try:
        m, d = int(document["m"]), int(document["d"])
        items = {
            FiniteIndexSet.of(entry["gamma"]): tuple(rational_from_str(a) for a in entry["a"])
            for entry in document["coeffs"]
        }
    except (KeyError, TypeError) as error:
        raise DomainError(f"malformed polynomial document: {error}") from error
    return TorusPolynomial(m, d, items)


def blocks_from_json(lists):
    return BlockSequence.of(*lists)


def dumps(document):
    """Canonical text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(to_jsonable(document), sort_keys=True, indent=2) + "\n"
