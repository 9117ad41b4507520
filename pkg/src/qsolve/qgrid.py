"""Q-functions on the Young diagram and the equations they impose.

A grid holds one monic polynomial per vertex.  ``Q[0,0]`` is ``u**L`` (or the
product over inhomogeneities), the upper-right boundary carries ``1``, a
monotone path from the corner to the boundary carries a generic ansatz, and
every other vertex is generated from a unit plaquette

    Q[a+1,s] * Q[a,s+1]  ~  W(Q[a+1,s+1], Q[a,s])

by exact division.  Division remainders, and the mismatches on plaquettes
whose four corners are already known, are collected as polynomial equations
on the ansatz coefficients.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .algebra.mpoly import MPoly, SymbolId
from .algebra.rational import HALF, format_rational, to_rational
from .algebra.rings import MPolyRing
from .algebra.upoly import UPoly, divmod_monic, wronskian
from .errors import BadInhomogeneityCount, RegionExcludesPath, StuckPropagation
from .representation import (
    Partition,
    boundary,
    degree_table,
    hook_lengths,
    minimal_symmetric_hook,
    vertices,
)

Vertex = tuple[int, int]


@dataclass(frozen=True)
class PathSpec:
    vertices: tuple[Vertex, ...]

    def __post_init__(self):
        vs = self.vertices
        if not vs or vs[0] != (0, 0):
            raise ValueError("path must start at (0, 0)")
        for (a0, s0), (a1, s1) in zip(vs, vs[1:]):
            if (a1 - a0, s1 - s0) not in ((1, 0), (0, 1)):
                raise ValueError(f"non-monotone step {(a0, s0)} -> {(a1, s1)}")


@dataclass(frozen=True)
class Region:
    """Plaquettes (boxes) whose QQ-relation is imposed."""

    kind: str
    max_a: int
    max_s: int

    def contains_box(self, box: Vertex) -> bool:
        return box[0] <= self.max_a and box[1] <= self.max_s

    def contains_vertex(self, v: Vertex) -> bool:
        return v[0] <= self.max_a and v[1] <= self.max_s

    def label(self) -> str:
        if self.kind == "rect":
            return f"rect:{self.max_a},{self.max_s}"
        return self.kind


def parse_relations(text: str) -> tuple:
    text = text.strip()
    if text in ("full", "minimal"):
        return (text,)
    if text.startswith("rect:"):
        n, s = (int(x) for x in text[5:].split(","))
        return ("rect", n, s)
    raise ValueError(f"unknown relation mode {text!r}")


def select_relations(lam: Partition, mode="full", path: PathSpec | None = None) -> Region:
    if isinstance(mode, str):
        mode = parse_relations(mode)
    kind = mode[0]
    if kind == "full":
        region = Region("full", lam.rows, lam.row(1))
    elif kind == "minimal":
        n = minimal_symmetric_hook(lam)
        region = Region("minimal", n, n)
    elif kind == "rect":
        region = Region("rect", int(mode[1]), int(mode[2]))
    else:
        raise ValueError(f"unknown relation mode {mode!r}")
    if path is not None and not all(region.contains_vertex(v) for v in path.vertices):
        raise RegionExcludesPath(f"{region.label()} does not contain path {path.vertices}")
    return region


def choose_path(lam: Partition, degrees: Mapping[Vertex, int], region: Region | None = None) -> PathSpec:
    """Monotone path to the boundary minimising the total ansatz degree.

    Ties prefer the step that increases ``a``.
    """
    allowed = {v for v in degrees if region is None or region.contains_vertex(v)}
    memo: dict[Vertex, tuple[float, tuple]] = {}

    def best(v: Vertex):
        if v in memo:
            return memo[v]
        if degrees[v] == 0:
            memo[v] = (0, (v,))
            return memo[v]
        options = []
        for step in ((v[0] + 1, v[1]), (v[0], v[1] + 1)):
            if step in allowed:
                cost, tail = best(step)
                options.append((cost, tail))
        if not options:
            memo[v] = (float("inf"), (v,))
            return memo[v]
        cost, tail = options[0]
        for c, t in options[1:]:
            if c < cost:
                cost, tail = c, t
        memo[v] = (cost + (degrees[v] if v != (0, 0) else 0), (v,) + tail)
        return memo[v]

    if (0, 0) not in allowed:
        raise RegionExcludesPath("region excludes the corner vertex")
    cost, verts = best((0, 0))
    if cost == float("inf"):
        raise RegionExcludesPath("no monotone path to the boundary inside the region")
    return PathSpec(verts)


@dataclass
class QEntry:
    vertex: Vertex
    status: str  # "fixed" | "ansatz" | "derived"
    poly: UPoly


@dataclass
class Equation:
    poly: object
    source: str


@dataclass
class QGrid:
    lam: Partition
    degrees: dict
    path: PathSpec
    region: Region
    ring: object
    symbols: list[SymbolId]
    entries: dict = field(default_factory=dict)
    equations: list[Equation] = field(default_factory=list)
    log: dict = field(default_factory=dict)
    q00: UPoly | None = None

    def q(self, a: int, s: int) -> UPoly:
        return self.entries[(a, s)].poly

    def known(self, v: Vertex) -> bool:
        return v in self.entries

    def region_boxes(self) -> list[Vertex]:
        return [b for b in self.lam.boxes() if self.region.contains_box(b)]

    def equation_polys(self) -> list:
        return [e.poly for e in self.equations]

    def sorted_equations(self) -> list:
        """Equations ordered by total degree, lowest first."""
        polys = self.equation_polys()
        if polys and isinstance(polys[0], MPoly):
            return sorted(polys, key=lambda p: (p.total_degree(), len(p.terms)))
        return polys

    def _add_equation(self, value, source: str, seen: set):
        if isinstance(value, MPoly):
            if value.is_zero():
                return
            canon = value.canonical()
            if canon in seen:
                return
            seen.add(canon)
            self.equations.append(Equation(canon, source))
        else:
            self.equations.append(Equation(value, source))

    def to_json(self) -> dict:
        names = [s.name for s in self.symbols]

        def fmt(c):
            if isinstance(c, MPoly):
                return c.to_string(names)
            try:
                return format_rational(c)
            except (TypeError, ValueError):
                return str(c)

        return {
            "partition": list(self.lam.parts),
            "path": [list(v) for v in self.path.vertices],
            "relations": self.region.label(),
            "symbols": names,
            "vertices": {
                f"{a},{s}": {
                    "status": e.status,
                    "degree": self.degrees[(a, s)],
                    "coefficients": [fmt(c) for c in e.poly.coeffs],
                }
                for (a, s), e in sorted(self.entries.items())
            },
            "equations": [{"source": e.source, "poly": fmt(e.poly)} for e in self.equations],
        }

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)


def initial_q00(L: int, inhom: Sequence | None, ring) -> UPoly:
    if inhom is None:
        return UPoly.monomial(L, ring)
    if len(inhom) != L:
        raise BadInhomogeneityCount(f"expected {L} inhomogeneities, got {len(inhom)}")
    out = UPoly([ring.one], ring)
    for chi in inhom:
        out = out * UPoly([ring.convert(-to_rational(chi)), ring.one], ring)
    return out


def path_symbols(path: PathSpec, degrees: Mapping[Vertex, int]) -> list[SymbolId]:
    syms = []
    for v in path.vertices[1:]:
        syms.extend(SymbolId(v, k) for k in range(degrees[v]))
    return sorted(syms)


def build_ansatz(
    lam: Partition,
    path: PathSpec,
    inhom: Sequence | None = None,
    region: Region | None = None,
    *,
    ring=None,
    values: Mapping[SymbolId, object] | None = None,
) -> QGrid:
    """Fixed data plus the generic ansatz along ``path``.

    With ``values`` the ansatz coefficients are replaced by elements of
    ``ring``; this is how a solution is substituted back into the grid.
    """
    degrees = degree_table(lam)
    if region is None:
        region = select_relations(lam, "full", path)
    elif not all(region.contains_vertex(v) for v in path.vertices):
        raise RegionExcludesPath(f"{region.label()} does not contain path {path.vertices}")
    symbols = path_symbols(path, degrees)
    if values is None:
        ring = MPolyRing(len(symbols))
        gens = {sym: MPoly.gen(len(symbols), i) for i, sym in enumerate(symbols)}
    else:
        if ring is None:
            raise ValueError("a coefficient ring is required with explicit values")
        gens = {sym: ring.convert(values[sym]) for sym in symbols}
    grid = QGrid(lam, degrees, path, region, ring, symbols)
    q00 = initial_q00(lam.weight, inhom, ring)
    grid.q00 = q00
    grid.entries[(0, 0)] = QEntry((0, 0), "fixed", q00)
    for v in boundary(lam):
        if v != (0, 0):
            grid.entries[v] = QEntry(v, "fixed", UPoly([ring.one], ring))
    for v in path.vertices[1:]:
        if v in grid.entries:
            continue
        m = degrees[v]
        coeffs = [gens[SymbolId(v, k)] for k in range(m)] + [ring.one]
        grid.entries[v] = QEntry(v, "ansatz", UPoly(coeffs, ring))
    return grid


def propagate(grid: QGrid, emit_consistency: bool = True) -> QGrid:
    """Generate every Q-function of the region and collect the equations.

    Plaquettes are visited in rounds ordered by ``(a + s, a)`` of their lower
    left vertex.  A plaquette either derives its one missing corner (top-left
    or bottom-right) by exact division, or, when all four corners are known,
    contributes consistency equations.
    """
    pending = sorted(grid.region_boxes(), key=lambda b: (b[0] + b[1], b[0]))
    ring = grid.ring
    seen: set = set()
    while pending:
        progressed = False
        remaining = []
        for box in pending:
            a, s = box[0] - 1, box[1] - 1
            ll, tl, br, tr = (a, s), (a + 1, s), (a, s + 1), (a + 1, s + 1)
            if not (grid.known(ll) and grid.known(tr)):
                remaining.append(box)
                continue
            unknown = [v for v in (tl, br) if not grid.known(v)]
            if len(unknown) == 2:
                remaining.append(box)
                continue
            w = wronskian(grid.q(*tr), grid.q(*ll))
            lc = w.leading_coefficient()
            norm = lc.constant_value() if isinstance(lc, MPoly) else lc
            w = w * ring.div(ring.one, lc)
            if unknown:
                target = unknown[0]
                other = br if target == tl else tl
                quotient, remainder = divmod_monic(w, grid.q(*other))
                grid.entries[target] = QEntry(target, "derived", quotient)
                for k, c in enumerate(remainder.coeffs):
                    grid._add_equation(c, f"remainder{box}[u^{k}]", seen)
                grid.log[box] = ("derive", target, norm)
            else:
                grid.log[box] = ("check", None, norm)
                if emit_consistency:
                    diff = w - grid.q(*tl) * grid.q(*br)
                    for k, c in enumerate(diff.coeffs):
                        grid._add_equation(c, f"consistency{box}[u^{k}]", seen)
            progressed = True
        pending = remaining
        if pending and not progressed:
            raise StuckPropagation(f"no admissible plaquette among {pending}")
    return grid


def build_grid(
    lam: Partition,
    relations="full",
    inhom: Sequence | None = None,
    path: PathSpec | None = None,
    emit_consistency: bool = True,
) -> QGrid:
    """Convenience: region, optimal path, ansatz and propagation in one call."""
    region = select_relations(lam, relations)
    if path is None:
        path = choose_path(lam, degree_table(lam), region)
    grid = build_ansatz(lam, path, inhom, region)
    return propagate(grid, emit_consistency)


def substitute(grid: QGrid, ring, values: Mapping[SymbolId, object], region: Region | None = None,
               inhom: Sequence | None = None, emit_consistency: bool = True) -> QGrid:
    """Rebuild ``grid`` over ``ring`` with the unknowns set to ``values``."""
    return propagate(
        build_ansatz(grid.lam, grid.path, inhom, region or grid.region, ring=ring, values=values),
        emit_consistency,
    )


def hook_of_plaquette(lam: Partition, box: Vertex) -> int:
    return hook_lengths(lam)[box]


def cyclotomic(n: int) -> list[int]:
    """Integer coefficients (lowest first) of the n-th cyclotomic polynomial."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _int_div(num, cyclotomic(d))
    return num


def _int_div(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] // b[-1]
        q[k] = c
        for j, bj in enumerate(b):
            a[k + j] -= c * bj
    return q


def momentum_values(grid: QGrid):
    """``(Q[1,0](1/2), Q[1,0](-1/2))`` with coefficients in the grid ring."""
    q = grid.q(1, 0)
    x = q(grid.ring.convert(HALF))
    y = q(grid.ring.convert(-HALF))
    return x, y


def momentum_split(grid: QGrid) -> list[tuple[int, MPoly]]:
    """Factor ``x**L - y**L`` into homogenised cyclotomic pieces.

    Returns ``(d, Phi_d(x, y))`` for every divisor ``d`` of ``L`` with
    ``x, y`` the values of ``Q[1,0]`` at ``+-1/2``.
    """
    L = grid.lam.weight
    x, y = momentum_values(grid)
    out = []
    for d in (d for d in range(1, L + 1) if L % d == 0):
        phi = cyclotomic(d)
        n = len(phi) - 1
        xp = [grid.ring.one]
        yp = [grid.ring.one]
        for _ in range(n):
            xp.append(xp[-1] * x)
            yp.append(yp[-1] * y)
        total = grid.ring.zero
        for k, c in enumerate(phi):
            if c:
                total = total + xp[k] * yp[n - k] * c
        out.append((d, total))
    return out


def split_factors_count(L: int) -> int:
    return sum(1 for d in range(1, L + 1) if L % d == 0)
