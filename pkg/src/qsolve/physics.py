"""Observables and independent checks for solved Q-systems.

Every function here is written against the field interface of
:mod:`qsolve.algebra.rings`, so the same code runs over the rationals, over
``Q[t]/(p)`` (one exact pass for all solutions of a chart, with component
splitting wherever a zero test is not uniform), and over working-precision
complex numbers for files that only carry numerical coefficients.

With ``R = Q[0,0] * Q[2,0]`` the Baxter polynomial ``Q = Q[1,0]`` and its
dual ``Qt`` obey ``Q^+ Qt^- - Q^- Qt^+ = (deg Q - deg Qt) R``, which gives
the second-order equation ``T Q = Q^{++} R^- + Q^{--} R^+``.  For two-row
diagrams ``Q[2,0] = 1`` and these reduce to the familiar XXX relations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
from gmpy2 import mpq

from .algebra.rational import format_rational
from .algebra.rings import QQ, ComplexField, on_components
from .algebra.upoly import UPoly, divmod_monic, gcd_univariate, minus, plus, shift, wronskian
from .errors import UndecidableAtPrecision
from .algebra import dense
from .algebra.factor import irreducible_factors
from .qgrid import QGrid, initial_q00, select_relations, substitute
from .solver.roots import RootDisk, as_mpc, dyadic, enclose, radius_string, to_decimal
from .solver.solve import Chart, SolutionSet


# --- single-polynomial observables -----------------------------------------------

def _order_at_zero(f: UPoly) -> int:
    ring = f.ring
    for k, c in enumerate(f.coeffs):
        if not ring.is_zero(c):
            return k
    return len(f.coeffs)


def energy_momentum(Q: UPoly):
    """``(e^{ip}, E)`` from the limits of ``Q^+/Q^-`` at ``u = 0``.

    Common powers of ``u`` are cancelled first, which covers roots at
    ``+-1/2``.  ``E`` is the log-derivative, normalised so that
    ``E = sum_j 1/(1/4 - u_j^2)`` for ordinary roots.
    """
    ring = Q.ring
    qp, qm = plus(Q), minus(Q)
    kp, km = _order_at_zero(qp), _order_at_zero(qm)
    if kp != km:
        raise ZeroDivisionError("Q^+ and Q^- vanish to different orders at u = 0")
    k = kp
    p0, p1 = qp.coefficient(k), qp.coefficient(k + 1)
    m0, m1 = qm.coefficient(k), qm.coefficient(k + 1)
    phase = ring.div(p0, m0)
    energy = ring.div(p1, p0) - ring.div(m1, m0)
    return phase, energy


def baxter_T(Q: UPoly, Q00: UPoly, Q20: UPoly | None = None) -> tuple[UPoly, bool]:
    """Transfer matrix ``T = (Q^{++} R^- + Q^{--} R^+) / Q`` and divisibility."""
    R = Q00 if Q20 is None else Q00 * Q20
    num = shift(Q, 1) * minus(R) + shift(Q, -1) * plus(R)
    qm = Q.monic() if not Q.is_monic() else Q
    quo, rem = divmod_monic(num, qm)
    ok = all(Q.ring.is_zero(c) for c in rem.coeffs)
    return quo, ok


def dual_q(Q: UPoly, Q00: UPoly, Q20: UPoly | None = None) -> UPoly | None:
    """Second solution ``Qt`` of the Wronskian relation, if it is a polynomial.

    ``Qt`` is monic of degree ``deg R + 1 - deg Q`` and its coefficient of
    ``u**deg(Q)`` is set to zero, removing the freedom ``Qt -> Qt + c Q``.
    """
    ring = Q.ring
    R = Q00 if Q20 is None else Q00 * Q20
    dq = Q.degree
    d = R.degree + 1 - dq
    if d < 0 or d == dq:
        return None
    target = R * ring.convert(mpq(dq - d)) - wronskian(Q, UPoly.monomial(d, ring))
    unknowns = [k for k in range(d) if k != dq]
    cols = [wronskian(Q, UPoly.monomial(k, ring)) for k in unknowns]
    nrows = max([len(target.coeffs)] + [len(c.coeffs) for c in cols])
    rows = [[c.coefficient(j) for c in cols] for j in range(nrows)]
    rhs = [target.coefficient(j) for j in range(nrows)]
    sol = solve_linear(rows, rhs, ring)
    if sol is None:
        return None
    coeffs = [ring.zero] * (d + 1)
    for k, v in zip(unknowns, sol):
        coeffs[k] = v
    coeffs[d] = ring.one
    return UPoly(coeffs, ring)


def solve_linear(rows: list[list], rhs: list, ring) -> list | None:
    """Gauss-Jordan elimination over a field ring; ``None`` if inconsistent.

    Free variables (if any) are set to zero.
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    numeric = not ring.exact
    for c in range(n):
        piv = None
        if numeric:
            best = None
            for i in range(r, m):
                v = abs(a[i][c])
                if best is None or v > best:
                    best, piv = v, i
            if piv is not None and ring.is_zero(a[piv][c]):
                piv = None
        else:
            piv = next((i for i in range(r, m) if not ring.is_zero(a[i][c])), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = ring.div(ring.one, a[r][c])
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r:
                f = a[i][c]
                if not _structurally_zero(f):
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if not ring.is_zero(a[i][n]):
            return None
    out = [ring.zero] * n
    for i, c in enumerate(pivots):
        out[c] = a[i][n]
    return out


def _structurally_zero(x) -> bool:
    c = getattr(x, "c", None)
    if c is not None:
        return not c
    try:
        return x == 0
    except TypeError:
        return False


def is_exceptional(Q: UPoly) -> bool:
    """Whether ``Q^+`` and ``Q^-`` share a root."""
    if Q.degree < 1:
        return False
    return gcd_univariate(plus(Q), minus(Q)).degree > 0


def root_multiplicities(Q: UPoly) -> list[int]:
    """Multiplicity of each distinct root of ``Q`` (Yun's decomposition)."""
    if Q.degree < 1:
        return []
    f = Q.monic()
    a0 = gcd_univariate(f, f.derivative())
    b, _ = divmod_monic(f, a0)
    c, _ = divmod_monic(f.derivative(), a0)
    d = c - b.derivative()
    out: list[int] = []
    i = 1
    while b.degree > 0:
        a = gcd_univariate(b, d)
        out.extend([i] * a.degree)
        b, _ = divmod_monic(b, a)
        c, _ = divmod_monic(d, a)
        d = c - b.derivative()
        i += 1
        if i > Q.degree + 1:
            raise ArithmeticError("squarefree decomposition did not terminate")
    return sorted(out, reverse=True)


def bethe_residuals(Q: UPoly, Q00: UPoly, Q20: UPoly | None = None, precision: int = 128,
                    exceptional: bool | None = None):
    """Largest Bethe-equation defect over the roots of ``Q``, or ``None``.

    ``None`` means not applicable: the solution is exceptional, or a root
    meets a pole of the equations (a singular nested solution).  Coefficients
    may be rationals or complex numbers; roots are found at ``precision`` bits.
    """
    if Q.degree < 1:
        return mpmath.mpf(0)
    if exceptional is None:
        exceptional = is_exceptional(_as_exact_or_complex(Q, precision))
    if exceptional:
        return None
    with mpmath.workprec(precision):
        cs = [_to_mpc(c) for c in reversed(Q.coeffs)]
        roots = mpmath.polyroots(cs, maxsteps=400, extraprec=2 * precision)
        roots = roots if isinstance(roots, list) else [roots]
        q00 = [_to_mpc(c) for c in reversed(Q00.coeffs)]
        q20 = [_to_mpc(c) for c in reversed(Q20.coeffs)] if Q20 is not None else None
        half = mpmath.mpf(1) / 2
        worst = mpmath.mpf(0)
        tiny = mpmath.mpf(2) ** (-(precision // 2))
        for k, uk in enumerate(roots):
            num = mpmath.polyval(q00, uk + half)
            den = mpmath.polyval(q00, uk - half)
            if q20 is not None:
                num *= mpmath.polyval(q20, uk + half)
                den *= mpmath.polyval(q20, uk - half)
            for j, uj in enumerate(roots):
                if j != k:
                    num *= uk - uj - 1
                    den *= uk - uj + 1
            if abs(den) <= tiny * max(1, abs(num)):
                # a nested root sits on a pole: the equations are singular there
                return None
            worst = max(worst, abs(num / den - 1))
        return worst


def _to_mpc(c):
    if isinstance(c, (mpmath.mpc, mpmath.mpf)):
        return as_mpc(c)
    q = mpq(c)
    return mpmath.mpc(mpmath.mpf(int(q.numerator)) / int(q.denominator))


def _as_exact_or_complex(Q: UPoly, precision: int) -> UPoly:
    if Q.ring is QQ or not Q.ring.exact:
        return Q
    return Q.map_coefficients(_to_mpc, ComplexField(precision))


def grid_polynomiality(grid: QGrid, ring, values: dict, inhom=None) -> bool:
    """Substitute a solution into the full diagram and check every relation.

    Also requires the dual Baxter polynomial to exist.
    """
    full = substitute(grid, ring, values, select_relations(grid.lam, "full"), inhom)
    if not all(ring.is_zero(e.poly) for e in full.equations):
        return False
    Q, Q20 = baxter_pair(full)
    return dual_q(Q, full.q00, Q20) is not None


def baxter_pair(grid: QGrid) -> tuple[UPoly, UPoly]:
    """``(Q[1,0], Q[2,0])`` with missing vertices read as the constant 1."""
    ring = grid.ring
    one = UPoly([ring.one], ring)
    Q = grid.q(1, 0) if grid.known((1, 0)) else one
    Q20 = grid.q(2, 0) if grid.known((2, 0)) else one
    return Q, Q20


# --- reports -----------------------------------------------------------------------

@dataclass
class ValidationReport:
    baxter_T_polynomial_ok: bool
    dual_q_polynomial_ok: bool
    grid_polynomiality_ok: bool
    momentum_quantized_ok: bool
    energy_real_ok: bool = True
    bethe_residual: object = None  # mpf, or None when not applicable
    bethe_residual_bound: float = 1e-20

    @property
    def bethe_applicable(self) -> bool:
        return self.bethe_residual is not None

    @property
    def passed(self) -> bool:
        ok = (
            self.baxter_T_polynomial_ok
            and self.dual_q_polynomial_ok
            and self.grid_polynomiality_ok
            and self.momentum_quantized_ok
            and self.energy_real_ok
        )
        if self.bethe_applicable:
            ok = ok and self.bethe_residual <= self.bethe_residual_bound
        return ok

    def to_json(self) -> dict:
        return {
            "baxter_T_polynomial_ok": self.baxter_T_polynomial_ok,
            "dual_q_polynomial_ok": self.dual_q_polynomial_ok,
            "grid_polynomiality_ok": self.grid_polynomiality_ok,
            "momentum_quantized_ok": self.momentum_quantized_ok,
            "energy_real_ok": self.energy_real_ok,
            "bethe_residual": "not-applicable" if self.bethe_residual is None
            else mpmath.nstr(self.bethe_residual, 6),
            "passed": self.passed,
        }


@dataclass
class Enclosure:
    value: mpmath.mpc
    radius: mpq
    exact: str | None = None

    def to_json(self, digits: int = 30) -> dict:
        out = {
            "re": to_decimal(as_mpc(self.value).real, digits),
            "im": to_decimal(as_mpc(self.value).imag, digits),
            "radius": radius_string(self.radius),
        }
        if self.exact is not None:
            out["exact"] = self.exact
        return out


@dataclass
class SpectrumEntry:
    partition: tuple
    index: int
    q_coefficients: list[Enclosure]
    energy: Enclosure
    momentum_phase: Enclosure
    exceptional: bool
    root_multiplicities: list[int]
    validation: ValidationReport
    roots: list = field(default_factory=list)
    component: str = ""
    factor: object = None
    values: list = field(default_factory=list)  # Enclosure per ansatz symbol

    @property
    def degree(self) -> int:
        return len(self.q_coefficients) - 1


@dataclass
class _ComponentData:
    Q: list  # coefficient lists over Q[t]/(factor)
    Q20: list
    phase: list
    energy: list
    exceptional: bool
    multiplicities: list
    T_ok: bool
    dual_ok: bool
    grid_ok: bool
    quantized: bool


def _lift(x) -> list:
    c = getattr(x, "c", None)
    if c is not None:
        return list(c)
    q = mpq(x)
    return [q] if q else []


def _component(grid: QGrid, chart: Chart, inhom, ring) -> _ComponentData:
    values = dict(zip(grid.symbols, chart.values(ring)))
    full = substitute(grid, ring, values, select_relations(grid.lam, "full"), inhom)
    grid_ok = all(ring.is_zero(e.poly) for e in full.equations)
    Q, Q20 = baxter_pair(full)
    exceptional = is_exceptional(Q)
    phase, energy = energy_momentum(Q)
    _, T_ok = baxter_T(Q, full.q00, Q20)
    dual_ok = dual_q(Q, full.q00, Q20) is not None
    L = grid.lam.weight
    quantized = ring.is_zero(phase ** L - ring.one) if inhom is None else True
    return _ComponentData(
        [_lift(c) for c in Q.coeffs], [_lift(c) for c in Q20.coeffs], _lift(phase), _lift(energy), exceptional,
        root_multiplicities(Q), T_ok, dual_ok and grid_ok, grid_ok, quantized,
    )


def analyze(grid: QGrid, solutions: SolutionSet, inhom=None, precision: int = 128) -> list[SpectrumEntry]:
    """Spectrum entries for every solution point, validated exactly per component."""
    entries: list[SpectrumEntry] = []
    for ci, chart in enumerate(solutions.charts):
        comps = []
        for piece in irreducible_factors(chart.modulus):
            comps += on_components(piece, lambda K, chart=chart: _component(grid, chart, inhom, K))
        pts = [p for p in solutions.points if p.chart == ci]
        for p in pts:
            factor, data = _assign(comps, p.theta, precision)
            entry = _entry(grid, p.theta, factor, data, inhom, precision)
            entry.values = [Enclosure(v, r) for v, r in zip(p.values, p.radii)]
            entries.append(entry)
    entries.sort(key=_entry_key)
    for i, e in enumerate(entries):
        e.index = i
    return entries


def _assign(comps, disk: RootDisk, precision: int):
    """The component whose factor vanishes at the isolated root."""
    hits = []
    for factor, data in comps:
        if len(factor) == 2:
            root = -factor[0]
            re, im = dyadic(as_mpc(disk.center).real), dyadic(as_mpc(disk.center).imag)
            if (re - root) ** 2 + im**2 <= disk.radius**2:
                hits.append((factor, data))
            continue
        val, err = enclose(factor, disk, precision * 2)
        if abs(val) <= mpmath.mpf(int(err.numerator)) / int(err.denominator):
            hits.append((factor, data))
    if len(hits) != 1:
        raise UndecidableAtPrecision("could not attribute a root to a single component")
    return hits[0]


def _entry(grid: QGrid, disk: RootDisk, factor, data: _ComponentData, inhom, precision: int) -> SpectrumEntry:
    work = precision * 2
    exact_ok = len(factor) == 2

    def encl(coeffs):
        val, err = enclose(coeffs, disk, work)
        exact = None
        if exact_ok:
            q = coeffs[0] if coeffs else mpq(0)
            if len(coeffs) > 1:
                q = sum(c * (-factor[0]) ** k for k, c in enumerate(coeffs))
            exact = format_rational(q)
            with mpmath.workprec(work):
                val, err = _to_mpc(mpq(q)), mpq(0)
        return Enclosure(val, err, exact)

    qcoeffs = [encl(c) for c in data.Q]
    energy = encl(data.energy)
    phase = encl(data.phase)
    q00 = initial_q00(grid.lam.weight, inhom, QQ)
    Q = UPoly([e.value for e in qcoeffs], ComplexField(work))
    Q20 = None
    if len(data.Q20) > 1:
        Q20 = UPoly([encl(c).value for c in data.Q20], ComplexField(work))
    residual = None
    if Q.degree < 1:
        residual = mpmath.mpf(0)
    elif not data.exceptional:
        residual = bethe_residuals(Q, q00, Q20, work, exceptional=False)
    bound = mpmath.mpf(int(energy.radius.numerator)) / int(energy.radius.denominator)
    energy_real = abs(as_mpc(energy.value).imag) <= bound + mpmath.mpf(2) ** (-precision // 2)
    report = ValidationReport(data.T_ok, data.dual_ok, data.grid_ok, data.quantized, bool(energy_real), residual)
    return SpectrumEntry(
        tuple(grid.lam.parts), 0, qcoeffs, energy, phase, data.exceptional,
        data.multiplicities, report, _roots(Q, work), dense.to_string(factor, "t"), factor,
    )


def _roots(Q: UPoly, work: int) -> list:
    if Q.degree < 1:
        return []
    with mpmath.workprec(work):
        r = mpmath.polyroots([_to_mpc(c) for c in reversed(Q.coeffs)], maxsteps=400, extraprec=work)
    r = r if isinstance(r, list) else [r]
    return sorted(r, key=lambda z: (float(mpmath.re(z)), float(mpmath.im(z))))


def _entry_key(e: SpectrumEntry):
    v = as_mpc(e.energy.value)
    return (float(v.real), float(v.imag), [float(as_mpc(c.value).real) for c in e.q_coefficients],
            [float(as_mpc(c.value).imag) for c in e.q_coefficients])
