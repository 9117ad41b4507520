"""Tests for rationals, univariate and multivariate polynomials, and Q[t]/(f)."""

from fractions import Fraction

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PROPERTY_EXAMPLES, monic_upolys, mpolys, rationals, upolys
from qsolve.algebra import dense
from qsolve.algebra.factor import irreducible_factors
from qsolve.algebra.mpoly import MPoly, SymbolId, mpoly_from_terms
from qsolve.algebra.rational import HALF, format_rational, to_rational
from qsolve.algebra.rings import QQ, EtaleAlgebra, MPolyRing, on_components
from qsolve.algebra.upoly import (
    UPoly,
    divmod_monic,
    gcd_univariate,
    minus,
    plus,
    psi_inverse,
    shift,
    u_poly,
    wronskian,
)
from qsolve.errors import NonMonicDivisor

u = u_poly()


# -- rationals ---------------------------------------------------------------

def test_rationals_are_reduced():
    q = to_rational("6/-4")
    assert (q.numerator, q.denominator) == (-3, 2)
    assert format_rational(q) == "-3/2"
    assert format_rational(mpq(5)) == "5"
    assert to_rational(Fraction(2, 8)) == mpq(1, 4)


def test_float_is_rejected():
    with pytest.raises(TypeError):
        to_rational(0.5)


@given(rationals(10**6, 10**6))
def test_rational_string_roundtrip(q):
    assert to_rational(format_rational(q)) == q


# -- UPoly basics ------------------------------------------------------------

def test_upoly_trims_leading_zeros():
    f = UPoly([1, 2, 0, 0])
    assert f.degree == 1
    assert UPoly([0, 0]).is_zero()
    assert UPoly([]).degree == -1


def test_from_roots():
    assert UPoly.from_roots([1, -1]) == u * u - 1


# -- shift -------------------------------------------------------------------

def test_shift_examples():
    assert shift(u**2, HALF) == u**2 + u + mpq(1, 4)
    f = UPoly([3, mpq(-2, 7), 5])
    assert shift(f, 0) == f
    assert plus(u) == u + HALF
    assert minus(u) == u - HALF


@settings(max_examples=PROPERTY_EXAMPLES)
@given(upolys(), rationals())
def test_shift_inverse(f, d):
    assert shift(shift(f, d), -d) == f


@settings(max_examples=PROPERTY_EXAMPLES)
@given(upolys(4), upolys(4), rationals())
def test_shift_is_ring_homomorphism(f, g, d):
    assert shift(f * g, d) == shift(f, d) * shift(g, d)
    assert shift(f + g, d) == shift(f, d) + shift(g, d)


@given(upolys(), rationals(), rationals())
def test_shift_matches_evaluation(f, d, x):
    assert shift(f, d)(x) == f(x + d)


# -- ring laws ---------------------------------------------------------------

@settings(max_examples=PROPERTY_EXAMPLES)
@given(upolys(4), upolys(4), upolys(4))
def test_upoly_ring_laws(f, g, h):
    assert (f + g) * h == f * h + g * h
    assert (f * g) * h == f * (g * h)
    assert f * g == g * f
    assert f - f == UPoly([])


@settings(max_examples=PROPERTY_EXAMPLES)
@given(mpolys(), mpolys(), mpolys())
def test_mpoly_ring_laws(f, g, h):
    assert (f + g) * h == f * h + g * h
    assert (f * g) * h == f * (g * h)
    assert f + g == g + f
    assert (f - f).is_zero()


@given(mpolys(), st.lists(rationals(), min_size=3, max_size=3), st.lists(rationals(), min_size=3, max_size=3))
def test_mpoly_evaluation_is_multiplicative(f, x, y):
    g = f + MPoly.gen(3, 1)
    assert (f * g).evaluate(x) == f.evaluate(x) * g.evaluate(x)
    assert (f + g).evaluate(y) == f.evaluate(y) + g.evaluate(y)


def test_mpoly_terms_never_store_zero():
    x = MPoly.gen(2, 0)
    y = MPoly.gen(2, 1)
    p = (x + y) * (x - y) - x * x
    assert p == -(y * y)
    assert all(c != 0 for c in p.terms.values())
    assert mpoly_from_terms(2, [((1, 0), 1), ((1, 0), -1)]).is_zero()


def test_mpoly_to_string():
    x = MPoly.gen(2, 0)
    y = MPoly.gen(2, 1)
    p = x * x - y * mpq(3, 2) + 1
    assert p.to_string(["a", "b"]) == "a^2 - 3/2*b + 1"


def test_symbol_order_and_parse():
    a = SymbolId((1, 0), 3)
    b = SymbolId((1, 1), 0)
    assert a < b
    assert SymbolId((1, 0), 2) < a
    assert SymbolId.parse(a.name) == a
    assert a.name == "c[1,0][3]"


# -- division ----------------------------------------------------------------

def test_divmod_examples():
    q, r = divmod_monic(u**2 - 1, u - 1)
    assert q == u + 1 and r.is_zero()
    f = UPoly([1, 2, 3])
    q, r = divmod_monic(f, UPoly([1]))
    assert q == f and r.is_zero()


def test_divmod_over_unknown_coefficients():
    ring = MPolyRing(1)
    c = MPoly.gen(1, 0)
    uu = UPoly.monomial(1, ring)
    g = uu + UPoly.constant(c, ring)
    f = g * (uu - 3) + 5
    q, r = divmod_monic(f, g)
    assert q == uu - 3
    assert r == UPoly.constant(5, ring)


def test_divmod_rejects_non_monic():
    with pytest.raises(NonMonicDivisor):
        divmod_monic(u**2, 2 * u)
    with pytest.raises(ZeroDivisionError):
        divmod_monic(u, UPoly([]))


@settings(max_examples=PROPERTY_EXAMPLES)
@given(upolys(6), monic_upolys(4))
def test_divmod_reconstruction(f, g):
    q, r = divmod_monic(f, g)
    assert g * q + r == f
    assert r.degree < g.degree


# -- wronskian ---------------------------------------------------------------

def test_wronskian_examples():
    assert wronskian(u, UPoly([1])) == UPoly([1])
    f = UPoly([2, -1, 4])
    assert wronskian(f, f).is_zero()
    assert wronskian(u**2, u) == u**2 - mpq(1, 4)


@settings(max_examples=PROPERTY_EXAMPLES)
@given(upolys(3), upolys(3), upolys(3), rationals())
def test_wronskian_antisymmetric_bilinear(f, g, h, a):
    assert wronskian(f, g) == -wronskian(g, f)
    assert wronskian(f * a + h, g) == wronskian(f, g) * a + wronskian(h, g)


@given(st.integers(0, 6), st.integers(0, 6))
def test_wronskian_degree_of_monomials(m, n):
    # leading coefficient of W(u^m, u^n) is (m - n)
    w = wronskian(u**m, u**n)
    if m == n:
        assert w.is_zero()
    else:
        assert w.degree == m + n - 1
        assert w.leading_coefficient() == m - n


# -- psi ---------------------------------------------------------------------

def test_psi_examples():
    assert psi_inverse(UPoly([1])) == u
    assert psi_inverse(UPoly([])).is_zero()


@settings(max_examples=PROPERTY_EXAMPLES)
@given(upolys(6))
def test_psi_is_right_inverse_of_difference(g):
    f = psi_inverse(g)
    assert plus(f) - minus(f) == g
    assert f.coefficient(0) == 0


# -- gcd ---------------------------------------------------------------------

def test_gcd_examples():
    assert gcd_univariate(u**2 - 1, u - 1) == u - 1
    f = UPoly([4, 0, 2])
    assert gcd_univariate(f, UPoly([])) == f.monic()


@given(st.lists(st.integers(-30, 30), min_size=1, max_size=4, unique=True), st.data())
def test_gcd_of_coprime_products(roots, data):
    others = data.draw(
        st.lists(st.integers(-30, 30).filter(lambda x: x not in roots), min_size=1, max_size=4)
    )
    assert gcd_univariate(UPoly.from_roots(roots), UPoly.from_roots(others)) == UPoly([1])
    common = UPoly.from_roots(roots[:1])
    assert gcd_univariate(UPoly.from_roots(roots), UPoly.from_roots(others) * common) == common


# -- dense helpers and the etale algebra ------------------------------------

ints = st.lists(rationals(10**12, 10**6), min_size=0, max_size=14)


@settings(max_examples=PROPERTY_EXAMPLES)
@given(ints, ints)
def test_kronecker_product_matches_schoolbook(a, b):
    a, b = dense.trim(a), dense.trim(b)
    expected = (UPoly(a) * UPoly(b)).coeffs
    assert dense.mul(a, b) == list(expected)
    if a and b:
        ia, da = dense.to_integer(a)
        ib, db = dense.to_integer(b)
        assert [mpq(x, da * db) for x in dense.int_mul(ia, ib)] == list(expected)


def _sympy_rem(a, b):
    t = sympy.Symbol("t")
    pa = sympy.Poly([sympy.Rational(int(c.numerator), int(c.denominator)) for c in reversed(a)] or [0], t)
    pb = sympy.Poly([sympy.Rational(int(c.numerator), int(c.denominator)) for c in reversed(b)], t)
    return [mpq(int(sympy.Rational(c).p), int(sympy.Rational(c).q)) for c in reversed(pa.rem(pb).all_coeffs())]


@given(
    st.lists(rationals(50, 7), min_size=8, max_size=12),
    st.lists(rationals(50, 7), min_size=6, max_size=10),
    st.lists(rationals(50, 7), min_size=6, max_size=10),
)
def test_etale_multiplication_matches_sympy(modulus, a, b):
    modulus = list(modulus) + [mpq(1)]
    ring = EtaleAlgebra(modulus)
    x, y = ring.from_poly(a), ring.from_poly(b)
    expected = dense.trim(_sympy_rem(dense.mul(x.c, y.c), ring.modulus))
    assert (x * y).c == expected


def test_etale_inverse_and_split():
    ring = EtaleAlgebra([-2, 0, 1])  # Q(sqrt 2)
    t = ring.generator()
    assert t * t == ring.convert(2)
    inv = ring.inverse(t + 1)
    assert (t + 1) * inv == ring.one

    # t^2 - 1 is not a field: t - 1 is a zero divisor and forces a split
    results = on_components([-1, 0, 1], lambda R: R.is_zero(R.generator() - 1))
    assert sorted((tuple(f), r) for f, r in results) == [((-1, 1), True), ((1, 1), False)]


def test_irreducible_factors():
    t = sympy.Symbol("t")
    p = sympy.Poly((t**2 - 2) * (t - 3) * (t**2 + t + 1), t)
    coeffs = [mpq(int(c)) for c in reversed(p.all_coeffs())]
    factors = irreducible_factors(coeffs)
    assert factors == [[-3, 1], [-2, 0, 1], [1, 1, 1]]
    prod = [mpq(1)]
    for f in factors:
        prod = dense.mul(prod, f)
    assert prod == coeffs


def test_dense_gcdex_and_squarefree():
    a = dense.mul([mpq(-1), mpq(1)], [mpq(2), mpq(1)])
    b = dense.mul([mpq(-1), mpq(1)], [mpq(5), mpq(1)])
    s, t, g = dense.gcdex(a, b)
    assert g == [-1, 1]
    assert dense.add(dense.mul(s, a), dense.mul(t, b)) == g
    sq = dense.mul(a, a)
    assert dense.squarefree_part(sq) == dense.monic(a)


def test_rings_convert():
    assert QQ.convert(3) == mpq(3)
    R = MPolyRing(2)
    assert R.div(MPoly.gen(2, 0) * 4, 2) == MPoly.gen(2, 0) * 2
