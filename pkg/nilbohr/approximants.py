"""
Rational stand-ins for irrational coefficients: continued-fraction
convergents of algebraic numbers and other closed-form reals.
"""

from fractions import Fraction
from itertools import islice
from loguru import logger
from sympy import Rational, SympifyError, sympify
from sympy.ntheory.continued_fraction import (
    continued_fraction_convergents,
    continued_fraction_iterator,
)
from nilbohr.errors import ParameterError

MAX_CONVERGENTS = 64


def _real(expression):
    try:
        value = sympify(expression)
    except (SympifyError, TypeError) as error:
        raise ParameterError(f"cannot read {expression!r} as a real number: {error}") from error
    if not value.is_real or value.free_symbols:
        raise ParameterError(f"{expression!r} is not a real constant")
    return value


def convergents(expression, count):
    """
    The first ``count`` convergents p_0/q_0, p_1/q_1, ... of a real constant.
    Rational inputs stop early when their expansion terminates.

    :param expression: sympy-readable constant, e.g. "sqrt(2)" or "(1+sqrt(5))/2"
    :param count: number of convergents, at most MAX_CONVERGENTS
    :return: list of Fraction
    """
    if not 1 <= count <= MAX_CONVERGENTS:
        raise ParameterError(f"count must lie in [1, {MAX_CONVERGENTS}]", field="count")
    value = _real(expression)
    terms = continued_fraction_iterator(value)
    result = []
    for convergent_value in islice(continued_fraction_convergents(terms), count):
        rational = Rational(convergent_value)
        result.append(Fraction(int(rational.p), int(rational.q)))
    logger.debug("Convergents of {}: {}", expression, result)
    return result


def convergent(expression, index):
    """The convergent of 0-based ``index``; "sqrt(2)", 8 gives 1393/985."""
    values = convergents(expression, index + 1)
    if len(values) <= index:
        raise ParameterError(f"{expression!r} has only {len(values)} convergents", field="index")
    return values[index]
