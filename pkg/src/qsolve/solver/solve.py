"""Exact-then-certified solving of zero-dimensional systems.

Pipeline: grevlex Groebner basis, quotient dimension (the count with
multiplicity), per-variable eliminants, radical if needed, a primitive
element ``t`` (the last variable, else seeded random linear forms) with
every variable written as ``x_i = g_i(t) mod p(t)``, and finally certified
isolation of the roots of ``p``.  The exact data ``(p, g_i)`` is kept as a
:class:`Chart` so later stages can compute in ``Q[t]/(p)`` directly.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
from gmpy2 import mpq

from ..algebra import dense
from ..algebra.mpoly import MPoly, SymbolId
from ..algebra.rings import EtaleAlgebra, on_components
from ..errors import NotZeroDimensional, PrecisionExhausted, ShapePositionFailure
from .groebner import CancelToken, GroebnerBasis, groebner
from .quotient import QuotientAlgebra, charpoly
from .roots import RootDisk, dyadic, enclose, isolate, magnitude_bits, refine

MAX_SHAPE_ATTEMPTS = 5
TRIANGULAR_MAX_DEGREE = 16


@dataclass
class PolySystem:
    variables: list[SymbolId]
    equations: list[MPoly]
    extra: MPoly | None = None

    def __post_init__(self):
        n = len(self.variables)
        for eq in self.all_equations():
            if eq.nvars != n:
                raise ValueError("equation ring does not match the variable list")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def all_equations(self) -> list[MPoly]:
        eqs = list(self.equations)
        if self.extra is not None:
            eqs.append(self.extra)
        return eqs

    def with_extra(self, extra: MPoly) -> "PolySystem":
        return PolySystem(self.variables, self.equations, extra)


@dataclass
class Chart:
    """Exact description of a finite set of points.

    The points are the roots of the squarefree ``modulus`` ``p(t)``; the
    coordinates are ``x_i = coords[i](t)``.  ``form`` records the linear
    form that defines ``t``.
    """

    modulus: list
    coords: list[list]
    form: tuple
    seed: int | None = None
    tag: object = None

    @property
    def degree(self) -> int:
        return len(self.modulus) - 1

    def algebra(self) -> EtaleAlgebra:
        return EtaleAlgebra(self.modulus)

    def values(self, ring: EtaleAlgebra) -> list:
        return [ring.from_poly(g) for g in self.coords]

    def restrict(self, factor: list) -> "Chart":
        return Chart(
            dense.monic(factor),
            [dense.rem(g, dense.monic(factor)) for g in self.coords],
            self.form,
            self.seed,
            self.tag,
        )


@dataclass
class SolutionPoint:
    values: list  # mpc per variable
    radii: list  # exact rational bound per variable
    residual_bound: mpq
    theta: RootDisk
    chart: int = 0
    multiplicity: int = 1


@dataclass
class SolutionSet:
    variables: list[SymbolId]
    points: list[SolutionPoint]
    charts: list[Chart]
    count_with_multiplicity: int
    eliminants: dict = field(default_factory=dict)
    precision_bits: int = 128
    seed: int | None = None
    triangular: bool = False

    @property
    def count_distinct(self) -> int:
        return len(self.points)

    @property
    def radical(self) -> bool:
        return self.count_distinct == self.count_with_multiplicity

    def exact_description(self) -> list[dict]:
        names = [v.name for v in self.variables]
        out = []
        for ch in self.charts:
            item = {"modulus": dense.to_string(ch.modulus, "t"), "form": [str(c) for c in ch.form]}
            if ch.degree <= TRIANGULAR_MAX_DEGREE:
                item["coordinates"] = {n: dense.to_string(g, "t") for n, g in zip(names, ch.coords)}
            out.append(item)
        return out


# --- exact stage -----------------------------------------------------------------

@dataclass
class ExactSolution:
    charts: list[Chart]
    dimension: int
    eliminants: dict
    multiplicities: list[dict] | None = None  # per chart: factor index -> multiplicity


def _univariate_in(var: int, nvars: int, coeffs: list) -> MPoly:
    terms = {}
    for k, c in enumerate(coeffs):
        if c:
            e = [0] * nvars
            e[var] = k
            terms[tuple(e)] = mpq(c)
    return MPoly(nvars, terms, _clean=True)


def _random_form(rng: random.Random, n: int) -> tuple:
    while True:
        form = tuple(mpq(rng.randint(-9, 9)) for _ in range(n))
        if sum(1 for c in form if c) >= min(2, n):
            return form


def solve_exact(system: PolySystem, seed: int = 0, token: CancelToken | None = None) -> ExactSolution:
    """Groebner basis, counting and a shape-position chart of ``system``."""
    n = system.nvars
    eqs = [e for e in system.all_equations() if not e.is_zero()]
    gb = groebner(eqs, "grevlex", nvars=n, token=token)
    if gb.is_unit_ideal():
        return ExactSolution([], 0, {})
    if n and not gb.polys:
        raise NotZeroDimensional("no equations on the unknowns")
    qa = QuotientAlgebra(gb, token)
    dim = qa.dimension

    eliminants = {}
    radical_gens = []
    is_radical = True
    for var in range(n):
        m = qa.minimal_polynomial(_unit_form(n, var))
        sq = dense.squarefree_part(m)
        eliminants[var] = sq
        if len(sq) != len(m):
            is_radical = False
        radical_gens.append(_univariate_in(var, n, sq))

    qr = qa
    if not is_radical:
        qr = QuotientAlgebra(groebner(eqs + radical_gens, "grevlex", nvars=n, token=token), token)
    distinct = qr.dimension

    rng = random.Random(seed)
    forms = [_unit_form(n, n - 1)] if n else [()]
    forms += [_random_form(rng, n) for _ in range(MAX_SHAPE_ATTEMPTS)] if n > 1 else []
    for attempt, form in enumerate(forms):
        kb = qr.krylov(form)
        if kb.degree != distinct:
            continue
        coords = []
        for var in range(n):
            g = kb.express(qr.vector(MPoly.gen(n, var)))
            if g is None:
                raise ShapePositionFailure("coordinate outside the Krylov span")
            coords.append(g)
        chart = Chart(dense.monic(kb.minpoly), coords, form, seed if attempt else None)
        mults = None
        if not is_radical:
            mults = _multiplicities(qa, form, chart)
        return ExactSolution([chart], dim, eliminants, [mults] if mults is not None else None)
    raise ShapePositionFailure(
        f"no separating linear form after {MAX_SHAPE_ATTEMPTS} random attempts (seed {seed})"
    )


def _unit_form(n: int, var: int) -> tuple:
    return tuple(mpq(1) if i == var else mpq(0) for i in range(n))


def _multiplicities(qa: QuotientAlgebra, form, chart: Chart) -> dict:
    """Multiplicity of each irreducible-over-Q piece of the chart modulus.

    Uses the characteristic polynomial of multiplication by ``t`` on the
    non-radical algebra: its factor over each point has that point's
    multiplicity as exponent.
    """
    cp = dense.monic(charpoly(qa.matrix(form)))
    out = {}
    rest = cp
    # split cp = prod_k p_k^k by repeated gcd with the squarefree modulus
    k = 0
    while len(rest) > 1:
        k += 1
        g = dense.gcd(rest, chart.modulus)
        if len(g) == 1:
            break
        rest, _ = dense.divmod_(rest, g)
        out[k] = g
    return _multiplicity_table(out, chart.modulus)


def _multiplicity_table(layers: dict, modulus: list) -> dict:
    """Map from ``dense.to_string(factor)`` to multiplicity, per point layer.

    ``layers[k]`` is the product of points whose multiplicity is at least k.
    """
    table = {}
    ks = sorted(layers)
    for i, k in enumerate(ks):
        nxt = layers[ks[i + 1]] if i + 1 < len(ks) else [mpq(1)]
        exact_k, _ = dense.divmod_(layers[k], nxt)
        if len(exact_k) > 1:
            table[k] = exact_k
    return table


# --- numeric stage ---------------------------------------------------------------

def _residual(eqs: Sequence[MPoly], values: list, prec: int) -> mpq:
    worst = mpmath.mpf(0)
    with mpmath.workprec(prec):
        for eq in eqs:
            val = eq.evaluate(values, one=mpmath.mpc(1))
            worst = max(worst, abs(val))
    return mpq(2) * dyadic(worst) + mpq(1, 2 ** (prec - 4))


def points_of_chart(chart: Chart, eqs: Sequence[MPoly], prec: int, max_prec: int = 1024,
                    chart_index: int = 0, multiplicity_of=None):
    """Certified numerical points of one chart.

    Root separation escalates from ``prec`` up to ``max_prec`` bits.  Each
    isolated root is then polished with enough extra bits to absorb the
    cancellation in ``g_i(t)``, so that coordinate radii and residuals meet
    ``2**(-prec/2)``.
    """
    disks, bits = isolate(chart.modulus, prec, max_prec)
    target = mpq(1, 2 ** (prec // 2))
    pts = []
    for d in disks:
        extra = max((magnitude_bits(g, d) for g in chart.coords), default=0)
        work = bits + extra
        for _ in range(4):
            d2 = refine(chart.modulus, d, work)
            vals, radii = [], []
            for g in chart.coords:
                v, r = enclose(g, d2, work)
                vals.append(v)
                radii.append(r)
            res = _residual(eqs, vals, work)
            if res <= target and all(r <= target * max(1, dyadic(abs(v))) for r, v in zip(radii, vals)):
                break
            work *= 2
        else:
            raise PrecisionExhausted("coordinate enclosures stay above the declared bound")
        mult = multiplicity_of(d) if multiplicity_of else 1
        pts.append(SolutionPoint(vals, radii, res, d2, chart_index, mult))
    return pts, bits


def _point_multiplicity(mults: dict | None):
    if not mults:
        return None

    def lookup(disk: RootDisk) -> int:
        best, which = None, 1
        with mpmath.workprec(256):
            for k, factor in mults.items():
                v = abs(mpmath.polyval([mpmath.mpf(int(c.numerator)) / int(c.denominator) for c in reversed(factor)], disk.center))
                if best is None or v < best:
                    best, which = v, k
        return which

    return lookup


def solve_points(system: PolySystem, precision_bits: int = 128, seed: int = 0,
                 token: CancelToken | None = None, max_bits: int = 1024) -> SolutionSet:
    """All complex solutions with certified enclosures."""
    ex = solve_exact(system, seed, token)
    return _assemble(system, [ex.charts], [ex], precision_bits, seed, max_bits)


def _assemble(system: PolySystem, chart_groups, exacts, prec, seed, max_bits) -> SolutionSet:
    eqs = system.all_equations()
    base_eqs = list(system.equations)
    charts, points = [], []
    bits_used = prec
    total_mult = 0
    for group, ex in zip(chart_groups, exacts):
        for ch in group:
            idx = len(charts)
            charts.append(ch)
            mults = ex.multiplicities[0] if ex.multiplicities else None
            pts, b = points_of_chart(ch, base_eqs if len(chart_groups) > 1 else eqs, prec, max_bits,
                                     idx, _point_multiplicity(mults))
            bits_used = max(bits_used, b)
            points.extend(pts)
            total_mult += sum(p.multiplicity for p in pts)
    elim = {}
    for ex in exacts:
        for var, poly in ex.eliminants.items():
            elim.setdefault(var, []).append(poly)
    eliminants = {system.variables[v]: _lcm_all(ps) for v, ps in elim.items()}
    if len(exacts) == 1:
        total_mult = exacts[0].dimension
    triangular = bool(charts) and all(c.degree <= TRIANGULAR_MAX_DEGREE for c in charts)
    return SolutionSet(system.variables, points, charts, total_mult, eliminants, bits_used, seed, triangular)


def _lcm_all(polys: list) -> list:
    out = [mpq(1)]
    for p in polys:
        g = dense.gcd(out, p)
        out = dense.monic(dense.mul(out, dense.divmod_(p, g)[0]))
    return out


# --- momentum-split solving ------------------------------------------------------

def _factor_task(args):
    system, extra, seed = args
    return solve_exact(system.with_extra(extra), seed)


def split_solve(system: PolySystem, factors: Sequence, precision_bits: int = 128, seed: int = 0,
                threads: int = 1, max_bits: int = 1024) -> SolutionSet:
    """Solve ``system`` once per extra factor and merge without duplicates.

    ``factors`` is a list of ``(label, MPoly)`` pairs.  A point found under
    factor ``k`` is dropped when an earlier factor also vanishes there; the
    test is exact, carried out in the chart algebra with component splitting.
    """
    factors = list(factors)
    if len(factors) <= 1:
        if factors:
            system = system.with_extra(factors[0][1])
        return solve_points(system, precision_bits, seed, max_bits=max_bits)
    tasks = [(system, f, seed) for _, f in factors]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            exacts = list(pool.map(_factor_task, tasks))
    else:
        exacts = [_factor_task(t) for t in tasks]

    groups = []
    for k, ex in enumerate(exacts):
        earlier = [f for _, f in factors[:k]]
        kept = []
        for ch in ex.charts:
            ch.tag = factors[k][0]
            if not earlier:
                kept.append(ch)
                continue

            def fresh(ring, ch=ch, earlier=earlier):
                vals = ch.values(ring)
                return all(not ring.is_zero(f.evaluate(vals, one=ring.one)) for f in earlier)

            pieces = [f for f, keep in on_components(ch.modulus, fresh) if keep]
            if pieces:
                factor = [mpq(1)]
                for piece in pieces:
                    factor = dense.mul(factor, piece)
                kept.append(ch.restrict(factor))
        groups.append(kept)
    merged = _assemble(system, groups, exacts, precision_bits, seed, max_bits)
    return merged
