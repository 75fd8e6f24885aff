"""
Flow-tracking decorator shared by the public entry points
"""

from functools import wraps
from loguru import logger


def _short(value, limit=120):
    text = repr(value)
    if len(text) > limit:
        return text[: limit - 3] + "..."
    return text


def log_decorator(func):
    """
    Logs the name and (abbreviated) arguments of every call at DEBUG level.

    :param func: function to wrap
    :return: wrapped function
    """

    @wraps(func)
    def wrapper(*args, **kwargs):
        logger.debug(
            "FLOW TRACKING: Executing {} || args = {} || kwargs = {}",
            func.__name__,
            [_short(arg) for arg in args],
            {key: _short(value) for key, value in kwargs.items()},
        )
        return func(*args, **kwargs)

    return wrapper
