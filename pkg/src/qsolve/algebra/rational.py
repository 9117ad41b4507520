"""Arbitrary precision rationals.

``Rational`` is :class:`gmpy2.mpq`: always in lowest terms with a positive
denominator, and several times faster than :class:`fractions.Fraction` on the
coefficient sizes produced by the elimination code.
"""

from fractions import Fraction

from gmpy2 import mpq

Rational = mpq

ZERO = mpq(0)
ONE = mpq(1)
HALF = mpq(1, 2)


def to_rational(value) -> mpq:
    """Convert ints, Fractions, mpq and ``"p/q"`` strings to a Rational.

    Floats are rejected: they would silently import binary rounding.
    """
    if isinstance(value, float):
        raise TypeError("refusing to convert a float to an exact rational")
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return mpq(int(num), int(den))
        return mpq(int(text))
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


def format_rational(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


