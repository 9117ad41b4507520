"""Linear algebra in the finite-dimensional quotient ``Q[x]/I``.

Elements are coordinate vectors on the standard monomials of a Groebner
basis.  Multiplication by a variable is tabulated once; minimal polynomials
of linear forms come from the Krylov sequence ``1, t, t^2, ...`` with
incremental Gaussian elimination, which also expresses any other element as
a polynomial in ``t`` when ``t`` generates the algebra (shape position).
"""

from __future__ import annotations

from gmpy2 import mpq

from ..algebra.mpoly import MPoly
from .groebner import GroebnerBasis, _Reducer, standard_monomials
from ..errors import NotZeroDimensional


class QuotientAlgebra:
    """``Q[x_1..x_n]/I`` for a zero-dimensional ideal given by a reduced basis."""

    def __init__(self, gb: GroebnerBasis, token=None):
        basis = standard_monomials(gb)
        if basis is None:
            raise NotZeroDimensional("ideal has positive dimension")
        self.gb = gb
        self.nvars = gb.nvars
        self.basis = basis
        self.index = {m: i for i, m in enumerate(basis)}
        self._reducer = _Reducer(gb.order, token)
        self._gb_terms = [(lm, g.terms) for lm, g in zip(gb.leading_monomials, gb.polys)]
        self._tables: dict[int, list[dict]] = {}

    @property
    def dimension(self) -> int:
        return len(self.basis)

    # coordinates ----------------------------------------------------------
    def normal_form(self, terms: dict) -> dict:
        """Sparse coordinate vector ``{basis index: coefficient}``."""
        rem = self._reducer.reduce(terms, self._gb_terms)
        return {self.index[m]: c for m, c in rem.items()}

    def vector(self, p: MPoly) -> list:
        out = [mpq(0)] * self.dimension
        for i, c in self.normal_form(p.terms).items():
            out[i] = c
        return out

    def unit(self) -> list:
        out = [mpq(0)] * self.dimension
        if out:
            out[self.index[(0,) * self.nvars]] = mpq(1)
        return out

    def _table(self, var: int) -> list[dict]:
        tab = self._tables.get(var)
        if tab is None:
            tab = []
            for m in self.basis:
                shifted = tuple(e + (1 if k == var else 0) for k, e in enumerate(m))
                j = self.index.get(shifted)
                tab.append({j: mpq(1)} if j is not None else self.normal_form({shifted: mpq(1)}))
            self._tables[var] = tab
        return tab

    def mul_var(self, var: int, vec: list) -> list:
        out = [mpq(0)] * self.dimension
        tab = self._table(var)
        for j, c in enumerate(vec):
            if c:
                for i, v in tab[j].items():
                    out[i] += c * v
        return out

    def mul_form(self, form, vec: list) -> list:
        out = [mpq(0)] * self.dimension
        for var, w in enumerate(form):
            if w:
                part = self.mul_var(var, vec)
                for i, c in enumerate(part):
                    if c:
                        out[i] += w * c
        return out

    def matrix(self, form) -> list[list]:
        """Dense matrix (rows) of multiplication by ``sum(form[i] x_i)``."""
        cols = []
        for j in range(self.dimension):
            e = [mpq(0)] * self.dimension
            e[j] = mpq(1)
            cols.append(self.mul_form(form, e))
        return [[cols[j][i] for j in range(self.dimension)] for i in range(self.dimension)]

    # Krylov ---------------------------------------------------------------
    def krylov(self, form) -> "KrylovBasis":
        return KrylovBasis(self, form)

    def minimal_polynomial(self, form) -> list:
        return self.krylov(form).minpoly


class KrylovBasis:
    """Echelon form of ``1, t, t^2, ...`` until the first linear dependency.

    ``minpoly`` holds the monic minimal polynomial of ``t`` (lowest degree
    first); :meth:`express` writes an algebra element as a polynomial in
    ``t`` when it lies in the span.
    """

    def __init__(self, qa: QuotientAlgebra, form):
        self.qa = qa
        self.form = tuple(mpq(c) for c in form)
        self.rows: dict[int, tuple[list, list]] = {}  # pivot -> (vector, combination)
        self.order: list[int] = []
        v = qa.unit()
        k = 0
        while True:
            comb = [mpq(0)] * k + [mpq(1)]
            vec, comb = self._reduce(list(v), comb)
            piv = next((i for i, c in enumerate(vec) if c), None)
            if piv is None:
                self.minpoly = comb
                break
            inv = 1 / vec[piv]
            vec = [c * inv for c in vec]
            comb = [c * inv for c in comb]
            self.rows[piv] = (vec, comb)
            self.order.append(piv)
            v = qa.mul_form(self.form, v)
            k += 1
        self.degree = len(self.minpoly) - 1

    def _reduce(self, vec: list, comb: list):
        for piv in self.order:
            c = vec[piv]
            if c:
                rvec, rcomb = self.rows[piv]
                for i in range(piv, len(vec)):
                    if rvec[i]:
                        vec[i] -= c * rvec[i]
                if len(rcomb) > len(comb):
                    comb = comb + [mpq(0)] * (len(rcomb) - len(comb))
                for i, x in enumerate(rcomb):
                    if x:
                        comb[i] -= c * x
        return vec, comb

    def express(self, vec: list) -> list | None:
        """Coefficients ``g`` with ``vec = g(t)``, or ``None`` outside the span."""
        out, comb = self._reduce(list(vec), [mpq(0)] * max(self.degree, 1))
        if any(out):
            return None
        neg = [-c for c in comb]
        while neg and not neg[-1]:
            neg.pop()
        return neg


def charpoly(rows: list[list]) -> list:
    """Characteristic polynomial of a rational matrix (lowest degree first).

    Hessenberg reduction followed by the standard three-term recurrence.
    """
    n = len(rows)
    h = [list(r) for r in rows]
    for m in range(1, n - 1):
        piv = next((i for i in range(m, n) if h[i][m - 1]), None)
        if piv is None:
            continue
        if piv != m:
            h[piv], h[m] = h[m], h[piv]
            for r in h:
                r[piv], r[m] = r[m], r[piv]
        for i in range(m + 1, n):
            if h[i][m - 1]:
                f = h[i][m - 1] / h[m][m - 1]
                for j in range(m - 1, n):
                    h[i][j] -= f * h[m][j]
                for r in h:
                    r[m] += f * r[i]
    # p_k(x) = characteristic polynomial of the leading k x k block
    polys = [[mpq(1)]]
    for k in range(1, n + 1):
        p = [mpq(0)] + polys[k - 1]
        p = _sub_poly(p, _scale_poly(polys[k - 1], h[k - 1][k - 1]))
        prod = mpq(1)
        for i in range(1, k):
            prod *= h[k - i][k - i - 1]
            if not prod:
                break
            p = _sub_poly(p, _scale_poly(polys[k - i - 1], prod * h[k - i - 1][k - 1]))
        polys.append(p)
    out = polys[n]
    while len(out) > 1 and not out[-1]:
        out.pop()
    return out


def _scale_poly(p: list, c) -> list:
    return [x * c for x in p]


def _sub_poly(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
