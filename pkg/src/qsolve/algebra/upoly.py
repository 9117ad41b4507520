"""Dense polynomials in the spectral parameter ``u``.

Coefficients live in one of the rings of :mod:`qsolve.algebra.rings`.  The
functions at the bottom of the module (``shift``, ``divmod_monic``,
``wronskian``, ``psi_inverse``, ``gcd_univariate``) are the primitives the
QQ-relations are built from.  The spectral shift is fixed to one unit, so
``f^{+-}(u) = f(u +- 1/2)`` and everything stays over the rationals.
"""

from __future__ import annotations

from math import comb
from typing import Sequence

from gmpy2 import mpq

from ..errors import NonMonicDivisor
from .rational import HALF
from .rings import QQ


def _structural_zero(ring, x) -> bool:
    # cheap test used for trimming; exact rings only store true zeros as such
    if ring is QQ:
        return x == 0
    c = getattr(x, "c", None)
    if c is not None:
        return not c
    terms = getattr(x, "terms", None)
    if terms is not None:
        return not terms
    return x == 0


class UPoly:
    """Immutable dense polynomial ``sum(coeffs[k] * u**k)``."""

    __slots__ = ("coeffs", "ring")

    def __init__(self, coeffs: Sequence, ring=QQ):
        cs = [ring.convert(c) for c in coeffs]
        while cs and _structural_zero(ring, cs[-1]):
            cs.pop()
        self.coeffs = tuple(cs)
        self.ring = ring

    # construction -------------------------------------------------------
    @classmethod
    def monomial(cls, k: int, ring=QQ) -> "UPoly":
        return cls([ring.zero] * k + [ring.one], ring)

    @classmethod
    def constant(cls, c, ring=QQ) -> "UPoly":
        return cls([ring.convert(c)], ring)

    @classmethod
    def from_roots(cls, roots: Sequence, ring=QQ) -> "UPoly":
        out = cls([ring.one], ring)
        for r in roots:
            out = out * cls([-ring.convert(r), ring.one], ring)
        return out

    def _lift(self, other) -> "UPoly":
        if isinstance(other, UPoly):
            return other
        return UPoly.constant(other, self.ring)

    # basic data ---------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading_coefficient(self):
        return self.coeffs[-1] if self.coeffs else self.ring.zero

    def coefficient(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else self.ring.zero

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.ring.is_zero(self.coeffs[-1] - self.ring.one)

    def __len__(self) -> int:
        return len(self.coeffs)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "UPoly":
        other = self._lift(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return UPoly(out, self.ring)

    __radd__ = __add__

    def __neg__(self) -> "UPoly":
        return UPoly([-c for c in self.coeffs], self.ring)

    def __sub__(self, other) -> "UPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "UPoly":
        return self._lift(other) - self

    def __mul__(self, other) -> "UPoly":
        if not isinstance(other, UPoly):
            c = self.ring.convert(other)
            return UPoly([x * c for x in self.coeffs], self.ring)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UPoly([], self.ring)
        out = [None] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                t = x * y
                k = i + j
                out[k] = t if out[k] is None else out[k] + t
        return UPoly(out, self.ring)

    __rmul__ = __mul__

    def scale(self, c) -> "UPoly":
        return UPoly([x * c for x in self.coeffs], self.ring)

    def __pow__(self, n: int) -> "UPoly":
        result = UPoly([self.ring.one], self.ring)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, UPoly):
            other = self._lift(other)
        diff = self - other
        return all(self.ring.is_zero(c) for c in diff.coeffs)

    __hash__ = None

    # calculus -----------------------------------------------------------
    def __call__(self, x):
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        return self.ring.zero if acc is None else acc

    def derivative(self) -> "UPoly":
        return UPoly([self.coeffs[k] * k for k in range(1, len(self.coeffs))], self.ring)

    def monic(self) -> "UPoly":
        if not self.coeffs:
            return self
        inv_lc = self.ring.div(self.ring.one, self.coeffs[-1])
        return UPoly([c * inv_lc for c in self.coeffs[:-1]] + [self.ring.one], self.ring)

    def map_coefficients(self, fn, ring) -> "UPoly":
        return UPoly([fn(c) for c in self.coeffs], ring)

    def shift(self, delta) -> "UPoly":
        return shift(self, delta)

    def __repr__(self) -> str:
        return f"UPoly({list(self.coeffs)!r}, {self.ring!r})"


def u_poly(ring=QQ) -> UPoly:
    return UPoly.monomial(1, ring)


def shift(f: UPoly, delta) -> UPoly:
    """Return ``f(u + delta)`` by exact binomial expansion."""
    delta = mpq(delta)
    if delta == 0 or f.degree < 1:
        return f
    n = len(f.coeffs)
    ring = f.ring
    dpow = [mpq(1)]
    for _ in range(n):
        dpow.append(dpow[-1] * delta)
    out = []
    for j in range(n):
        acc = None
        for k in range(j, n):
            c = f.coeffs[k]
            w = comb(k, j) * dpow[k - j]
            t = c if w == 1 else c * (ring.convert(w) if not ring.exact else w)
            acc = t if acc is None else acc + t
        out.append(acc)
    return UPoly(out, ring)


def plus(f: UPoly) -> UPoly:
    return shift(f, HALF)


def minus(f: UPoly) -> UPoly:
    return shift(f, -HALF)


def divmod_monic(f: UPoly, g: UPoly) -> tuple[UPoly, UPoly]:
    """Divide by a divisor whose leading coefficient is the ring unit.

    Works over any coefficient ring since no coefficient is ever inverted.
    """
    if not g.coeffs:
        raise ZeroDivisionError("division by the zero polynomial")
    ring = f.ring
    lc = g.coeffs[-1]
    if not ring.is_zero(lc - ring.one):
        raise NonMonicDivisor("divisor leading coefficient is not the unit")
    dg = g.degree
    r = list(f.coeffs)
    if len(r) - 1 < dg:
        return UPoly([], ring), f
    q = [ring.zero] * (len(r) - dg)
    gc = g.coeffs
    for k in range(len(r) - 1, dg - 1, -1):
        c = r[k]
        if _structural_zero(ring, c):
            continue
        q[k - dg] = c
        base = k - dg
        for j in range(dg):
            r[base + j] = r[base + j] - c * gc[j]
    return UPoly(q, ring), UPoly(r[:dg], ring)


def wronskian(f: UPoly, g: UPoly) -> UPoly:
    """``f(u+1/2) g(u-1/2) - f(u-1/2) g(u+1/2)``."""
    return plus(f) * minus(g) - minus(f) * plus(g)


def psi_inverse(g: UPoly) -> UPoly:
    """Polynomial ``f`` with ``f(u+1/2) - f(u-1/2) = g`` and ``f(0) = 0``.

    Back-substitution from the top coefficient: the difference operator
    maps ``u**k`` to ``k u**(k-1)`` plus lower odd-step terms.
    """
    ring = g.ring
    if not g.coeffs:
        return UPoly([], ring)
    n = g.degree + 1
    f = [ring.zero] * (n + 1)
    # diff[k][j]: coefficient of u**j in (u+1/2)**k - (u-1/2)**k
    residual = list(g.coeffs)
    for k in range(n, 0, -1):
        c = residual[k - 1]
        fk = c * ring.convert(mpq(1, k)) if not ring.exact else c * mpq(1, k)
        f[k] = fk
        for j in range(k - 1):
            step = k - j
            if step % 2:
                w = comb(k, j) * 2 * HALF**step
                residual[j] = residual[j] - fk * (w if ring.exact else ring.convert(w))
    return UPoly(f, ring)


def gcd_univariate(f: UPoly, g: UPoly) -> UPoly:
    """Monic gcd over a field ring (QQ, an etale algebra, or CC)."""
    ring = f.ring
    a, b = _true_trim(f), _true_trim(g)
    while b.coeffs:
        b = b.monic()
        _, r = divmod_monic(a, b)
        a, b = b, _true_trim(r)
    return a.monic() if a.coeffs else a


def _true_trim(f: UPoly) -> UPoly:
    cs = list(f.coeffs)
    while cs and f.ring.is_zero(cs[-1]):
        cs.pop()
    return UPoly(cs, f.ring)
