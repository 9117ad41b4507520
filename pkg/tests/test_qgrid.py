"""Ansatz construction, propagation over the diagram, and momentum factors."""

import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PROPERTY_EXAMPLES, partitions
from qsolve.algebra.mpoly import MPoly, SymbolId
from qsolve.algebra.rings import QQ
from qsolve.algebra.upoly import UPoly, u_poly
from qsolve.errors import BadInhomogeneityCount, RegionExcludesPath
from qsolve.qgrid import (
    PathSpec,
    build_ansatz,
    build_grid,
    choose_path,
    cyclotomic,
    momentum_split,
    propagate,
    select_relations,
    split_factors_count,
)
from qsolve.representation import Partition, degree_table, hook_lengths, two_row
from qsolve.solver.groebner import groebner


def P(*parts):
    return Partition(tuple(parts))


def test_single_row_path_is_trivial():
    lam = P(5)
    path = choose_path(lam, degree_table(lam))
    assert path.vertices == ((0, 0), (1, 0))
    grid = build_grid(lam)
    assert grid.symbols == []
    assert grid.equations == []


@pytest.mark.parametrize("L,M", [(4, 2), (7, 3), (12, 6), (9, 1)])
def test_su2_path_has_magnon_many_unknowns(L, M):
    lam = two_row(L, M)
    path = choose_path(lam, degree_table(lam))
    grid = build_ansatz(lam, path)
    assert len(grid.symbols) == M
    assert grid.q(1, 0).degree == M


def test_symbol_counts():
    for lam, expected in [(P(6, 6), 6), (P(4, 2, 1), 4)]:
        grid = build_grid(lam, "minimal")
        assert len(grid.symbols) == expected, lam


def test_two_site_chain_paths():
    lam = P(1, 1)
    # the cheapest path runs through Q[0,1] = 1 and leaves nothing unknown
    grid = build_grid(lam)
    assert grid.path.vertices == ((0, 0), (0, 1))
    assert grid.symbols == []
    assert grid.q(1, 0) == u_poly(grid.ring)
    # forcing the path up the first column gives the ansatz Q[1,0] = u + c
    forced = PathSpec(((0, 0), (1, 0), (2, 0)))
    grid = build_ansatz(lam, forced)
    assert grid.symbols == [SymbolId((1, 0), 0)]


def test_path_must_stay_in_region():
    lam = P(4, 2, 1)
    with pytest.raises(RegionExcludesPath):
        select_relations(lam, "rect:2,2", PathSpec(((0, 0), (1, 0), (2, 0), (3, 0))))
    with pytest.raises(RegionExcludesPath):
        # no vertex of degree zero inside the unit square
        choose_path(lam, degree_table(lam), select_relations(lam, "rect:1,1"))
    region = select_relations(lam, "rect:2,2")
    path = choose_path(lam, degree_table(lam), region)
    assert all(region.contains_vertex(v) for v in path.vertices)


def test_path_validation():
    with pytest.raises(ValueError):
        PathSpec(((0, 0), (1, 1)))
    with pytest.raises(ValueError):
        PathSpec(((1, 0),))


def test_relation_regions():
    assert select_relations(P(6, 6), "minimal").max_a == 2
    assert select_relations(P(6, 6), "minimal").max_s == 2
    rect = select_relations(P(6, 6), "rect:2,4")
    assert (rect.max_a, rect.max_s) == (2, 4)
    assert rect.label() == "rect:2,4"
    full = select_relations(P(6, 6), "full")
    assert (full.max_a, full.max_s) == (2, 6)
    with pytest.raises(ValueError):
        select_relations(P(6, 6), "everything")


def test_two_site_chain_forces_zero():
    grid = build_grid(P(1, 1), path=PathSpec(((0, 0), (1, 0), (2, 0))))
    (c,) = grid.symbols
    assert c == SymbolId((1, 0), 0)
    gb = groebner(grid.equation_polys(), nvars=1)
    assert [p.terms for p in gb.polys] == [{(1,): 1}]


def test_inhomogeneity_count_checked():
    lam = P(2, 1)
    path = choose_path(lam, degree_table(lam))
    with pytest.raises(BadInhomogeneityCount):
        build_ansatz(lam, path, inhom=[0, 1])
    grid = build_ansatz(lam, path, inhom=[0, mpq(1, 3), -1])
    u = u_poly(grid.ring)
    assert grid.q(0, 0) == u * (u - mpq(1, 3)) * (u + 1)


def test_su2_row_one_needs_no_remainders():
    # Q[1,s+1] comes from Q[1,s]+ - Q[1,s]- divided by Q[2,s] = 1
    grid = build_grid(two_row(8, 3))
    assert grid.equations
    assert not [e for e in grid.equations if e.source.startswith("remainder(2,")]
    derived = [v for v, e in grid.entries.items() if e.status == "derived"]
    assert (1, 1) in derived and (1, 2) in derived


def test_equations_sorted_by_degree():
    grid = build_grid(two_row(7, 3))
    degs = [p.total_degree() for p in grid.sorted_equations()]
    assert degs == sorted(degs)


def test_dump_roundtrip(tmp_path):
    import json

    grid = build_grid(P(2, 2))
    grid.dump(tmp_path / "grid.json")
    data = json.loads((tmp_path / "grid.json").read_text())
    assert data["partition"] == [2, 2]
    assert data["vertices"]["0,0"]["coefficients"] == ["0", "0", "0", "0", "1"]
    assert data["symbols"] == ["c[1,0][0]", "c[1,0][1]"]


def _random_values(grid, rng):
    return {sym: mpq(rng.randint(-9, 9), rng.randint(1, 5)) for sym in grid.symbols}


@settings(max_examples=PROPERTY_EXAMPLES)
@given(partitions(max_weight=9, max_rows=4), st.integers(0, 2**31))
def test_normalization_constant_is_hook_length(lam, seed):
    # Over random rational data every derivation plaquette still divides by
    # its leading constant; that constant only depends on the degrees.
    path = choose_path(lam, degree_table(lam))
    skeleton = build_ansatz(lam, path)
    values = _random_values(skeleton, random.Random(seed))
    grid = propagate(build_ansatz(lam, path, ring=QQ, values=values))
    hooks = hook_lengths(lam)
    for box, (kind, target, norm) in grid.log.items():
        assert norm == -hooks[box]
        assert norm != 0
    for v, entry in grid.entries.items():
        assert entry.poly.is_monic()
        assert entry.poly.degree == grid.degrees[v]
    assert set(grid.log) == set(lam.boxes())


def test_cyclotomic():
    assert cyclotomic(1) == [-1, 1]
    assert cyclotomic(2) == [1, 1]
    assert cyclotomic(3) == [1, 1, 1]
    assert cyclotomic(6) == [1, -1, 1]
    assert cyclotomic(12) == [1, 0, -1, 0, 1]


@pytest.mark.parametrize("L,count", [(1, 1), (6, 4), (12, 6), (7, 2)])
def test_split_factor_counts(L, count):
    assert split_factors_count(L) == count


def test_momentum_split_factors_multiply_back():
    lam = two_row(6, 2)
    grid = build_grid(lam)
    factors = momentum_split(grid)
    assert [d for d, _ in factors] == [1, 2, 3, 6]
    q = grid.q(1, 0)
    x = q(grid.ring.convert(mpq(1, 2)))
    y = q(grid.ring.convert(mpq(-1, 2)))
    prod = grid.ring.one
    for _, f in factors:
        prod = prod * f
    assert prod == x**6 - y**6


def test_momentum_split_single_site():
    grid = build_grid(P(1))
    ((d, f),) = momentum_split(grid)
    assert d == 1
    assert f.is_zero()  # x = y = 1 on the vacuum


def test_derived_q_functions_over_symbols_are_monic():
    grid = build_grid(P(3, 2, 1))
    for v, entry in grid.entries.items():
        assert entry.poly.is_monic(), v
        assert entry.poly.degree == grid.degrees[v]
    assert all(isinstance(e.poly, MPoly) for e in grid.equations)
