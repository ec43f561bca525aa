"""Exact rational helpers: num/den parsing and the dotted [0,1] operations.

Everything in this package computes with `fractions.Fraction`; floats are
never introduced on value paths.
"""

from __future__ import annotations

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_rational(text: str) -> Fraction:
    """Parse `num/den` or a bare integer into a Fraction.

    Decimal notation is rejected on purpose: exactness is part of every
    interface of this package.
    """
    text = text.strip()
    if "." in text:
        raise ValueError(f"decimal notation not accepted, use num/den: {text!r}")
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational {text!r}: {exc}") from None


def format_rational(q: Fraction) -> str:
    """Render as `num/den`, or a bare integer when the denominator is 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def in_unit(q: Fraction) -> bool:
    return ZERO <= q <= ONE


def dot_add(a: Fraction, b: Fraction) -> Fraction:
    """x +. y = min(x+y, 1)."""
    return min(a + b, ONE)


def dot_sub(a: Fraction, b: Fraction) -> Fraction:
    """x -. y = max(x-y, 0)."""
    return max(a - b, ZERO)


def dot_neg(a: Fraction) -> Fraction:
    return ONE - a


def dot_scale(q: Fraction, a: Fraction) -> Fraction:
    """Dotted product by a positive rational: min(q*a, 1)."""
    return min(q * a, ONE)
