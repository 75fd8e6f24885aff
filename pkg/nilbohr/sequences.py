"""
Expansion of sequence expressions into explicit truncations n_1..n_L.

Forms: "id", "const:c", "pow:b", "list:[...]", "random:seed,max"
("random:max" takes the seed from the config), or a plain JSON list.
"""

import random
from ast import literal_eval
from loguru import logger
from nilbohr.errors import ParameterError

SEQUENCE_FORMS = ("id", "const", "pow", "list", "random")


def _positive(value, label):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ParameterError(f"{label} must be a positive integer, got {value!r}", field="n")
    return value


def _explicit(values, length):
    values = [_positive(value, "sequence term") for value in values]
    if len(values) < length:
        raise ParameterError(f"list has {len(values)} terms, {length} needed", field="n")
    return values[:length]


def sequence_spec(expr, length, seed=None):
    """
    :param expr: expression string or list of integers
    :param length: truncation length L
    :param seed: seed used by "random:max"
    :return: list of L positive integers
    """
    if length < 1:
        raise ParameterError("sequence length must be positive", field="N")
    if isinstance(expr, (list, tuple)):
        return _explicit(expr, length)
    if not isinstance(expr, str):
        raise ParameterError(f"unreadable sequence {expr!r}", field="n")
    form, _, argument = expr.strip().partition(":")
    if form not in SEQUENCE_FORMS:
        raise ParameterError(f"unknown sequence form {form!r}; use one of {SEQUENCE_FORMS}", field="n")
    try:
        if form == "id":
            return list(range(1, length + 1))
        if form == "const":
            return [_positive(int(argument), "constant")] * length
        if form == "pow":
            base = _positive(int(argument), "base")
            return [base**index for index in range(1, length + 1)]
        if form == "list":
            return _explicit(literal_eval(argument), length)
        parts = [part.strip() for part in argument.split(",")]
        if len(parts) == 2:
            seed, top = int(parts[0]), int(parts[1])
        elif len(parts) == 1 and seed is not None:
            top = int(parts[0])
        else:
            raise ParameterError("random needs 'random:seed,max'", field="n")
        generator = random.Random(seed)
        values = [generator.randint(1, _positive(top, "maximum")) for _ in range(length)]
        logger.debug("Random sequence (seed {}): {}", seed, values)
        return values
    except (ValueError, SyntaxError) as error:
        if isinstance(error, ParameterError):
            raise
        raise ParameterError(f"malformed sequence {expr!r}: {error}", field="n") from error
