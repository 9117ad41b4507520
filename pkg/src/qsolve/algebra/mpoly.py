"""Sparse multivariate polynomials over the rationals.

The unknown ansatz coefficients live here.  A polynomial is a dict mapping
exponent tuples (one entry per symbol of the owning ring) to nonzero
:class:`~qsolve.algebra.rational.Rational` coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from gmpy2 import mpq

from .rational import format_rational


@dataclass(frozen=True, order=True)
class SymbolId:
    """The unknown coefficient of ``u**power`` in the Q-function at ``vertex``.

    Field order gives the vertex-major, power-minor total order.
    """

    vertex: tuple[int, int]
    power: int

    @property
    def name(self) -> str:
        a, s = self.vertex
        return f"c[{a},{s}][{self.power}]"

    @classmethod
    def parse(cls, text: str) -> "SymbolId":
        body = text.strip()
        if not body.startswith("c[") or "][" not in body:
            raise ValueError(f"not a symbol name: {text!r}")
        vert, power = body[2:-1].split("][")
        a, s = (int(x) for x in vert.split(","))
        return cls((a, s), int(power))


@lru_cache(maxsize=None)
def grevlex_key(exp: tuple[int, ...]) -> tuple:
    return (sum(exp), tuple(-e for e in reversed(exp)))


@lru_cache(maxsize=None)
def lex_key(exp: tuple[int, ...]) -> tuple:
    return exp


ORDERS = {"grevlex": grevlex_key, "lex": lex_key}


def _coerce(x):
    if isinstance(x, MPoly):
        return x
    return mpq(x)


class MPoly:
    """Polynomial in ``nvars`` symbols with rational coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None, *, _clean: bool = False):
        self.nvars = nvars
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = terms
        else:
            self.terms = {tuple(e): mpq(c) for e, c in terms.items() if c != 0}

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, nvars: int, c) -> "MPoly":
        c = mpq(c)
        return cls(nvars, {(0,) * nvars: c} if c else {}, _clean=True)

    @classmethod
    def gen(cls, nvars: int, i: int) -> "MPoly":
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): mpq(1)}, _clean=True)

    def _lift(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other.nvars != self.nvars:
                raise ValueError("mixing polynomials from different rings")
            return other
        return MPoly.constant(self.nvars, other)

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.nvars in self.terms)

    def constant_value(self):
        """Rational value of a constant polynomial."""
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * self.nvars, mpq(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def variables(self) -> set[int]:
        used = set()
        for e in self.terms:
            used.update(i for i, k in enumerate(e) if k)
        return used

    # arithmetic ---------------------------------------------------------
    def __neg__(self) -> "MPoly":
        return MPoly(self.nvars, {e: -c for e, c in self.terms.items()}, _clean=True)

    def __add__(self, other) -> "MPoly":
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return MPoly(self.nvars, out, _clean=True)

    __radd__ = __add__

    def __sub__(self, other) -> "MPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "MPoly":
        return self._lift(other) - self

    def scale(self, c) -> "MPoly":
        c = mpq(c)
        if not c:
            return MPoly(self.nvars)
        return MPoly(self.nvars, {e: v * c for e, v in self.terms.items()}, _clean=True)

    def __mul__(self, other) -> "MPoly":
        if not isinstance(other, MPoly):
            return self.scale(other)
        if other.nvars != self.nvars:
            raise ValueError("mixing polynomials from different rings")
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out: dict = {}
        get = out.get
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                v = get(e)
                out[e] = ca * cb if v is None else v + ca * cb
        return MPoly(self.nvars, {e: c for e, c in out.items() if c}, _clean=True)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            other = other.constant_value()
        return self.scale(1 / mpq(other))

    def __pow__(self, n: int) -> "MPoly":
        if n < 0:
            raise ValueError("negative power")
        result = MPoly.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self.terms == MPoly.constant(self.nvars, other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    # orders -------------------------------------------------------------
    def leading_term(self, order: str = "grevlex"):
        key = ORDERS[order]
        exp = max(self.terms, key=key)
        return exp, self.terms[exp]

    def canonical(self, order: str = "grevlex") -> "MPoly":
        """Scale so the leading coefficient is 1 (zero stays zero)."""
        if not self.terms:
            return self
        _, lc = self.leading_term(order)
        return self.scale(1 / lc)

    # evaluation ---------------------------------------------------------
    def evaluate(self, values: Sequence, one=None):
        """Evaluate at ``values``; works for any ring whose elements accept
        multiplication by a Rational on the right."""
        powers: list[dict] = [dict() for _ in range(self.nvars)]

        def pw(i, k):
            cache = powers[i]
            if k not in cache:
                if k == 1:
                    cache[k] = values[i]
                else:
                    h = k // 2
                    cache[k] = pw(i, h) * pw(i, k - h)
            return cache[k]

        total = None
        for e, c in self.terms.items():
            term = None
            for i, k in enumerate(e):
                if k:
                    term = pw(i, k) if term is None else term * pw(i, k)
            if term is None:
                term = c if one is None else one * c
            else:
                term = term * c
            total = term if total is None else total + term
        if total is None:
            return mpq(0) if one is None else one * 0
        return total

    def to_string(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        if names is None:
            names = [f"x{i}" for i in range(self.nvars)]
        parts = []
        for e in sorted(self.terms, key=grevlex_key, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            if not mono:
                parts.append(format_rational(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{format_rational(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"MPoly({self.to_string()})"


def mpoly_from_terms(nvars: int, items: Iterable[tuple[Sequence[int], object]]) -> MPoly:
    out: dict = {}
    for e, c in items:
        e = tuple(e)
        out[e] = out.get(e, mpq(0)) + mpq(c)
    return MPoly(nvars, out)
