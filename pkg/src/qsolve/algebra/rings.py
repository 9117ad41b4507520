"""Coefficient rings for :class:`~qsolve.algebra.upoly.UPoly`.

Each ring exposes ``zero``, ``one``, ``convert`` (from a Rational),
``is_zero`` and, for fields, ``div``.  Elements themselves use the ordinary
Python operators, mirroring the domain objects of classical CAS kernels.

* :data:`QQ` -- exact rationals.
* :class:`MPolyRing` -- polynomials in the unknown ansatz coefficients.
* :class:`EtaleAlgebra` -- ``Q[t]/(f)`` for a squarefree ``f``.  It is a
  product of number fields; when a zero divisor is met the computation is
  aborted with :class:`~qsolve.errors.ComponentSplit` and restarted on the two
  factors by :func:`on_components` (dynamic evaluation).
* :class:`ComplexField` -- multiprecision complex numbers with a two-sided
  zero test, used only when exact data is unavailable.
"""

from __future__ import annotations

from typing import Callable

import mpmath
import gmpy2
from gmpy2 import mpq, mpz

from ..errors import ComponentSplit, UndecidableAtPrecision
from . import dense
from .mpoly import MPoly


class RationalField:
    name = "QQ"
    exact = True
    zero = mpq(0)
    one = mpq(1)

    def convert(self, q):
        return mpq(q)

    def is_zero(self, x) -> bool:
        return x == 0

    def div(self, x, y):
        return mpq(x) / mpq(y)

    def __repr__(self) -> str:
        return "QQ"


QQ = RationalField()


class MPolyRing:
    """Polynomials in ``nvars`` unknowns; ``div`` only by nonzero constants."""

    exact = True

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.zero = MPoly(nvars)
        self.one = MPoly.constant(nvars, 1)

    @property
    def name(self) -> str:
        return f"QQ[{self.nvars} vars]"

    def convert(self, q) -> MPoly:
        if isinstance(q, MPoly):
            return q
        return MPoly.constant(self.nvars, q)

    def is_zero(self, x) -> bool:
        return x.is_zero() if isinstance(x, MPoly) else x == 0

    def div(self, x, y):
        if isinstance(y, MPoly):
            y = y.constant_value()
        return self.convert(x).scale(1 / mpq(y))

    def __eq__(self, other) -> bool:
        return isinstance(other, MPolyRing) and other.nvars == self.nvars

    def __hash__(self) -> int:
        return hash(("MPolyRing", self.nvars))

    def __repr__(self) -> str:
        return f"MPolyRing({self.nvars})"


class AlgElem:
    """Residue class of a rational polynomial modulo the ring modulus."""

    __slots__ = ("ring", "c")

    def __init__(self, ring: "EtaleAlgebra", coeffs: list):
        self.ring = ring
        self.c = coeffs

    def _other(self, other) -> list:
        if isinstance(other, AlgElem):
            return other.c
        if isinstance(other, MPoly):
            other = other.constant_value()
        other = mpq(other)
        return [other] if other else []

    def __add__(self, other):
        return AlgElem(self.ring, dense.add(self.c, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return AlgElem(self.ring, dense.sub(self.c, self._other(other)))

    def __rsub__(self, other):
        return AlgElem(self.ring, dense.sub(self._other(other), self.c))

    def __neg__(self):
        return AlgElem(self.ring, [-x for x in self.c])

    def __mul__(self, other):
        if isinstance(other, AlgElem):
            return AlgElem(self.ring, self.ring._mulmod(self.c, other.c))
        o = self._other(other)
        if not o:
            return AlgElem(self.ring, [])
        return AlgElem(self.ring, dense.scale(self.c, o[0]))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.ring.div(self, other)

    def __pow__(self, n: int):
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        return (self - other).c == []

    __hash__ = None

    def __repr__(self) -> str:
        return f"AlgElem({dense.to_string(self.c)})"


class EtaleAlgebra:
    """``Q[t]/(modulus)`` with ``modulus`` monic and squarefree over Q."""

    exact = True

    def __init__(self, modulus: list):
        self.modulus = dense.monic(list(modulus))
        if len(self.modulus) < 2:
            raise ValueError("modulus must have positive degree")
        self.zero = AlgElem(self, [])
        self.one = AlgElem(self, [mpq(1)])
        self._table = None

    def _reduction_table(self):
        """``t^k mod modulus`` for ``n <= k <= 2n-2`` over one common denominator."""
        if self._table is None:
            n = self.degree
            rows = []
            cur = [mpq(0)] * n + [mpq(1)]
            for _ in range(n - 1):
                cur = dense.rem(cur, self.modulus)
                rows.append(cur)
                cur = [mpq(0)] + cur
            den = mpz(1)
            for r in rows:
                den = gmpy2.lcm(den, dense.to_integer(r)[1])
            ints = [[mpz(c * den) for c in r] + [mpz(0)] * (n - len(r)) for r in rows]
            self._table = (ints, den)
        return self._table

    def _mulmod(self, a: list, b: list) -> list:
        if not a or not b:
            return []
        n = self.degree
        if min(len(a), len(b)) < dense.KRONECKER_MIN_LENGTH:
            return dense.rem(dense.mul(a, b), self.modulus)
        ia, da = dense.to_integer(a)
        ib, db = dense.to_integer(b)
        prod = dense.int_mul(ia, ib)
        ints, den = self._reduction_table()
        out = [x * den for x in prod[:n]] + [mpz(0)] * max(0, n - len(prod))
        for k in range(n, len(prod)):
            c = prod[k]
            if c:
                for j, r in enumerate(ints[k - n]):
                    if r:
                        out[j] += c * r
        total = da * db * den
        return dense.trim([mpq(x, total) for x in out])

    @property
    def degree(self) -> int:
        return len(self.modulus) - 1

    @property
    def name(self) -> str:
        return f"QQ[t]/({dense.to_string(self.modulus)})"

    def convert(self, q) -> AlgElem:
        if isinstance(q, AlgElem):
            return q
        q = mpq(q)
        return AlgElem(self, [q] if q else [])

    def from_poly(self, coeffs: list) -> AlgElem:
        return AlgElem(self, dense.rem(dense.trim([mpq(x) for x in coeffs]), self.modulus))

    def generator(self) -> AlgElem:
        return self.from_poly([0, 1])

    def is_zero(self, x) -> bool:
        if not isinstance(x, AlgElem):
            return mpq(x) == 0
        if not x.c:
            return True
        if len(x.c) == 1:
            return False
        g = dense.gcd(x.c, self.modulus)
        if len(g) == 1:
            return False
        raise ComponentSplit(g)

    def inverse(self, x) -> AlgElem:
        if not isinstance(x, AlgElem):
            return self.convert(1 / mpq(x))
        if not x.c:
            raise ZeroDivisionError("division by zero in etale algebra")
        s, _, g = dense.gcdex(x.c, self.modulus)
        if len(g) > 1:
            raise ComponentSplit(g)
        return AlgElem(self, dense.rem(s, self.modulus))

    def div(self, x, y):
        return self.convert(x) * self.inverse(y)

    def __repr__(self) -> str:
        return f"EtaleAlgebra({self.name})"


def on_components(modulus: list, fn: Callable[[EtaleAlgebra], object]) -> list[tuple[list, object]]:
    """Run ``fn`` over ``Q[t]/(modulus)``, splitting on zero divisors.

    Returns ``(factor, result)`` pairs whose factors multiply to the monic
    modulus; within each factor every zero test ``fn`` made is uniform.
    """
    out = []
    stack = [dense.monic(list(modulus))]
    while stack:
        f = stack.pop()
        try:
            out.append((f, fn(EtaleAlgebra(f))))
        except ComponentSplit as split:
            g = dense.monic(split.factor)
            h, r = dense.divmod_(f, g)
            if r or len(g) < 2 or len(h) < 2:
                raise RuntimeError("inconsistent component split") from None
            stack.append(dense.monic(h))
            stack.append(g)
    return out


class ComplexField:
    """Working-precision complex numbers.

    ``is_zero`` answers True below ``tol`` and False above ``sqrt(tol)``;
    anything in between raises :class:`UndecidableAtPrecision`.
    """

    exact = False

    def __init__(self, prec_bits: int = 128, tol=None):
        self.prec_bits = prec_bits
        with mpmath.workprec(prec_bits):
            self.tol = mpmath.mpf(2) ** (-(prec_bits // 2)) if tol is None else mpmath.mpf(tol)
            self.zero = mpmath.mpc(0)
            self.one = mpmath.mpc(1)

    name = "CC"

    def convert(self, q):
        if isinstance(q, mpmath.mpc):
            return q
        with mpmath.workprec(self.prec_bits):
            if isinstance(q, mpmath.mpf):
                return mpmath.mpc(q)
            q = mpq(q)
            return mpmath.mpc(mpmath.mpf(int(q.numerator)) / int(q.denominator))

    def is_zero(self, x) -> bool:
        a = abs(self.convert(x) if not isinstance(x, mpmath.mpc) else x)
        if a <= self.tol:
            return True
        if a >= mpmath.sqrt(self.tol):
            return False
        raise UndecidableAtPrecision(f"|x| = {mpmath.nstr(a, 5)} is inside the undecided band")

    def div(self, x, y):
        return self.convert(x) / self.convert(y)

    def __repr__(self) -> str:
        return f"ComplexField({self.prec_bits})"
