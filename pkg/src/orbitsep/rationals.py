"""Exact rational values and their string serialization.

Every correctness-relevant quantity in the package is an ``int`` or a
``fractions.Fraction``; the two mix exactly under arithmetic and comparison.
The single non-finite value is ``INF``, used as the distance between a point
set and the empty set (and as the ratio of an empty certificate).  ``INF`` is
``math.inf``, which compares exactly against any rational; it is never used in
arithmetic.
"""

import math
from fractions import Fraction

from .errors import InvalidInputError

INF = math.inf


def is_inf(x):
    return x == INF


def parse_rational(value):
    """Parse ``"p/q"``, ``"n"``, ``"inf"``, or a plain int into an exact value."""
    if value == "inf":
        return INF
    if isinstance(value, bool):
        raise InvalidInputError("expected a rational, got a bool")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"bad rational literal {value!r}") from exc
    raise InvalidInputError(f"expected a rational, got {type(value).__name__}")


def format_rational(x):
    """Serialize an exact value as ``"p/q"``, ``"n"``, or ``"inf"``."""
    if is_inf(x):
        return "inf"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    raise InvalidInputError(f"not an exact rational: {x!r}")


def ratio_of(dist, eps):
    """Exact ``dist / eps``; INF distances give an INF ratio."""
    if is_inf(dist):
        return INF
    return Fraction(dist) / Fraction(eps)
