"""Buchberger's algorithm over the rationals.

Polynomials are :class:`~qsolve.algebra.mpoly.MPoly`; internally a basis
element is kept as ``(lm, lc, terms)``.  Pairs are handled with the
Gebauer-Moeller update (which covers both of Buchberger's criteria) and
selected with the normal strategy (smallest lcm first).
"""

from __future__ import annotations

import heapq
import threading
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from ..algebra.mpoly import ORDERS, MPoly
from ..errors import Cancelled


class CancelToken:
    """Cooperative cancellation flag checked inside the inner loops."""

    def __init__(self):
        self._event = threading.Event()

    def cancel(self) -> None:
        self._event.set()

    @property
    def cancelled(self) -> bool:
        return self._event.is_set()

    def check(self) -> None:
        if self._event.is_set():
            raise Cancelled("computation cancelled")


def _divides(a: tuple, b: tuple) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a: tuple, b: tuple) -> tuple:
    return tuple(x if x > y else y for x, y in zip(a, b))


def _sub(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def _coprime(a: tuple, b: tuple) -> bool:
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


class _Reducer:
    """Normal forms modulo a fixed list of monic basis elements."""

    def __init__(self, order: str, token: CancelToken | None = None):
        self.key = ORDERS[order]
        self.token = token

    def leading(self, terms: dict):
        key = self.key
        m = max(terms, key=key)
        return m, terms[m]

    def reduce(self, terms: dict, basis: Sequence, full: bool = True) -> dict:
        """Reduce ``terms`` by ``basis`` (list of (lm, terms) with lc 1)."""
        key = self.key
        p = dict(terms)
        heap = [(_neg(key(m)), m) for m in p]
        heapq.heapify(heap)
        rem: dict = {}
        steps = 0
        while heap:
            _, m = heapq.heappop(heap)
            c = p.pop(m, None)
            if c is None:
                continue
            for lm, gterms in basis:
                if _divides(lm, m):
                    shift = _sub(m, lm)
                    for e, v in gterms.items():
                        if e == lm:
                            continue
                        e2 = tuple(x + y for x, y in zip(e, shift))
                        old = p.get(e2)
                        if old is None:
                            p[e2] = -c * v
                            heapq.heappush(heap, (_neg(key(e2)), e2))
                        else:
                            new = old - c * v
                            if new:
                                p[e2] = new
                            else:
                                del p[e2]
                    break
            else:
                rem[m] = c
                if not full:
                    rem.update(p)
                    return rem
            steps += 1
            if self.token is not None and steps % 256 == 0:
                self.token.check()
        return rem


def _neg(key):
    # heap is a min-heap; invert the order key
    return _Inverted(key)


class _Inverted:
    __slots__ = ("k",)

    def __init__(self, k):
        self.k = k

    def __lt__(self, other):
        return self.k > other.k

    def __eq__(self, other):
        return self.k == other.k


@dataclass
class GroebnerBasis:
    order: str
    nvars: int
    polys: list[MPoly]

    @property
    def leading_monomials(self) -> list[tuple]:
        key = ORDERS[self.order]
        return [max(p.terms, key=key) for p in self.polys]

    def is_unit_ideal(self) -> bool:
        return len(self.polys) == 1 and self.polys[0].is_constant() and not self.polys[0].is_zero()

    def reduce(self, p: MPoly) -> MPoly:
        red = _Reducer(self.order)
        basis = [(lm, g.terms) for lm, g in zip(self.leading_monomials, self.polys)]
        return MPoly(self.nvars, red.reduce(p.terms, basis), _clean=True)

    def contains(self, p: MPoly) -> bool:
        return self.reduce(p).is_zero()


def _monic_terms(terms: dict, lc) -> dict:
    if lc == 1:
        return terms
    inv = 1 / lc
    return {e: c * inv for e, c in terms.items()}


def groebner(polys: Sequence[MPoly], order: str = "grevlex", nvars: int | None = None,
             token: CancelToken | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``polys``."""
    polys = [p for p in polys if not p.is_zero()]
    if nvars is None:
        nvars = polys[0].nvars if polys else 0
    if token is not None:
        token.check()
    red = _Reducer(order, token)
    key = red.key
    if not polys:
        return GroebnerBasis(order, nvars, [])

    # basis storage: index -> (lm, terms monic)
    store: list[tuple[tuple, dict]] = []
    active: list[int] = []
    pairs: list[tuple[int, int, tuple]] = []

    def add(terms: dict):
        lm, lc = red.leading(terms)
        terms = _monic_terms(terms, lc)
        h = len(store)
        store.append((lm, terms))
        _update(h)

    def _update(h: int):
        nonlocal active, pairs
        lmh = store[h][0]
        cands = [(h, g, _lcm(lmh, store[g][0])) for g in active]
        kept: list = []
        while cands:
            p = cands.pop(0)
            if _coprime(lmh, store[p[1]][0]) or not any(
                _divides(q[2], p[2]) for q in cands + kept
            ):
                kept.append(p)
        new_pairs = [p for p in kept if not _coprime(lmh, store[p[1]][0])]
        old = []
        for (g1, g2, l12) in pairs:
            if (
                _divides(lmh, l12)
                and _lcm(store[g1][0], lmh) != l12
                and _lcm(lmh, store[g2][0]) != l12
            ):
                continue
            old.append((g1, g2, l12))
        pairs = old + new_pairs
        active = [g for g in active if not _divides(lmh, store[g][0])] + [h]

    # seed with inter-reduced input, smallest leading monomial first
    seeds = []
    for p in polys:
        seeds.append(dict(p.terms))
    seeds.sort(key=lambda t: key(max(t, key=key)))
    for terms in seeds:
        basis = [store[g] for g in active]
        r = red.reduce(terms, basis)
        if r:
            add(r)
            if _is_constant(store[-1][0]):
                return GroebnerBasis(order, nvars, [MPoly.constant(nvars, 1)])

    while pairs:
        if token is not None:
            token.check()
        best = min(range(len(pairs)), key=lambda i: (key(pairs[i][2]), pairs[i][0], pairs[i][1]))
        g1, g2, l = pairs.pop(best)
        s = _spoly(store[g1], store[g2], l)
        if not s:
            continue
        basis = [store[g] for g in active]
        r = red.reduce(s, basis)
        if r:
            add(r)
            if _is_constant(store[-1][0]):
                return GroebnerBasis(order, nvars, [MPoly.constant(nvars, 1)])

    # reduced basis: minimal leading monomials, then tail-reduce
    final = [store[g] for g in active]
    final.sort(key=lambda t: key(t[0]))
    minimal = []
    for i, (lm, terms) in enumerate(final):
        if any(_divides(olm, lm) for j, (olm, _) in enumerate(final) if j != i and (olm != lm or j < i)):
            continue
        minimal.append((lm, terms))
    reduced = []
    for i, (lm, terms) in enumerate(minimal):
        others = [t for j, t in enumerate(minimal) if j != i]
        tail = {e: c for e, c in terms.items() if e != lm}
        tail = red.reduce(tail, others)
        tail[lm] = mpq(1)
        reduced.append(MPoly(nvars, tail, _clean=True))
    reduced.sort(key=lambda p: key(max(p.terms, key=key)), reverse=True)
    return GroebnerBasis(order, nvars, reduced)


def _is_constant(m: tuple) -> bool:
    return not any(m)


def _spoly(f: tuple, g: tuple, l: tuple) -> dict:
    (lf, tf), (lg, tg) = f, g
    sf, sg = _sub(l, lf), _sub(l, lg)
    out: dict = {}
    for e, c in tf.items():
        if e == lf:
            continue
        e2 = tuple(x + y for x, y in zip(e, sf))
        out[e2] = out.get(e2, 0) + c
    for e, c in tg.items():
        if e == lg:
            continue
        e2 = tuple(x + y for x, y in zip(e, sg))
        out[e2] = out.get(e2, 0) - c
    return {e: c for e, c in out.items() if c}


def quotient_dimension(gb: GroebnerBasis) -> int | float:
    """Number of standard monomials, or ``inf`` for a positive-dimensional ideal."""
    basis = standard_monomials(gb)
    return float("inf") if basis is None else len(basis)


def standard_monomials(gb: GroebnerBasis) -> list[tuple] | None:
    """Monomials outside the leading-term ideal, or ``None`` when infinitely many."""
    n = gb.nvars
    if gb.is_unit_ideal():
        return []
    lms = gb.leading_monomials
    bounds = []
    for i in range(n):
        pure = [m[i] for m in lms if m[i] and all(m[j] == 0 for j in range(n) if j != i)]
        if not pure:
            return None
        bounds.append(min(pure))
    out = []

    def rec(prefix: list, i: int):
        if i == n:
            mono = tuple(prefix)
            if not any(_divides(lm, mono) for lm in lms):
                out.append(mono)
            return
        for k in range(bounds[i]):
            cand = prefix + [k] + [0] * (n - i - 1)
            if any(_divides(lm, tuple(cand)) for lm in lms):
                break
            rec(prefix + [k], i + 1)

    rec([], 0)
    key = ORDERS[gb.order]
    out.sort(key=key)
    return out
