"""Exact rational parsing and formatting shared by all document formats.

Numbers travel as strings ("3/4", "2", "0.25") so that every value in a
document is exact. Floats are rejected on input: a JSON document that says
0.1 does not say which rational it means.
"""

from __future__ import annotations

from fractions import Fraction


def parse_rational(value) -> Fraction:
    """Parse a rational from an int or a "p/q"/integer/decimal string."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise ValueError(
            f"refusing float {value!r}: write rationals as strings like \"1/10\""
        )
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r}")


def format_rational(value) -> str:
    """Lowest-terms string form: "p/q", or the plain integer when q == 1."""
    return str(Fraction(value))
