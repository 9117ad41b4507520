"""Irreducible factorization of rational univariate polynomials.

Delegated to sympy's Zassenhaus implementation; used to split a chart
algebra into number fields before exact validation, so each field is
handled at its own (smaller) degree.
"""

from __future__ import annotations

import sympy
from gmpy2 import mpq

from . import dense

_T = sympy.Symbol("t")


def irreducible_factors(p: list) -> list[list]:
    """Monic irreducible factors of ``p`` (lowest degree first), each listed once."""
    p = dense.monic(dense.trim([mpq(c) for c in p]))
    if len(p) <= 2:
        return [p] if len(p) == 2 else []
    poly = sympy.Poly([sympy.Rational(int(c.numerator), int(c.denominator)) for c in reversed(p)], _T)
    _, factors = poly.factor_list()
    out = []
    for f, _mult in factors:
        coeffs = [mpq(int(sympy.Rational(c).p), int(sympy.Rational(c).q)) for c in reversed(f.all_coeffs())]
        out.append(dense.monic(coeffs))
    out.sort(key=lambda f: (len(f), [(c.numerator, c.denominator) for c in f]))
    return out
