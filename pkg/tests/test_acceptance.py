"""Acceptance criteria, one test per criterion.

Each test records a ``criterion N: PASS|FAIL`` line, printed in the terminal
summary, and then asserts.  Tolerances: counts are exact, spectra agree
within 1e-8 absolute, wall-clock limits are 15 minutes per L = 12 row and
10 minutes for the two-row sweep.
"""

import json
import subprocess
import sys
import time
from math import comb
from pathlib import Path

import mpmath
from gmpy2 import mpq

from conftest import ACCEPTANCE_LINES
from qsolve.algebra.rings import QQ
from qsolve.algebra.upoly import UPoly, u_poly
from qsolve.oracle import su2_new_levels
from qsolve.physics import analyze, baxter_T, dual_q, grid_polynomiality
from qsolve.qgrid import build_grid, momentum_split
from qsolve.representation import Partition, enumerate_partitions, multiplicity, two_row
from qsolve.solver.solve import PolySystem, solve_points, split_solve

TESTS = Path(__file__).parent


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def solve_doc(run_cli, *args):
    code, out, _ = run_cli("solve", *args)
    return code, json.loads(out)["partitions"][0]


def solve_entries(lam, relations="full", split=False):
    grid = build_grid(lam, relations)
    system = PolySystem(grid.symbols, grid.sorted_equations())
    sol = split_solve(system, momentum_split(grid)) if split else solve_points(system)
    return grid, sol, analyze(grid, sol)


def test_criterion_1_twelve_site_rows(run_cli):
    results = []
    for parts, expected in [("11,1", 11), ("10,2", 54)]:
        start = time.perf_counter()
        code, part = solve_doc(run_cli, "--length", "12", "--partition", parts)
        elapsed = time.perf_counter() - start
        ok = code == 0 and part["found_distinct"] == part["validated_count"] == expected and elapsed < 900
        results.append((parts, part["validated_count"], expected, round(elapsed, 1), ok))
    detail = "; ".join(f"{p}: {got}/{exp} in {t}s" for p, got, exp, t, _ in results)
    record(1, all(r[-1] for r in results), detail)


def test_criterion_2_two_row_sweep():
    start = time.perf_counter()
    bad = []
    for L in range(2, 9):
        for M in range(L // 2 + 1):
            _, sol, entries = solve_entries(two_row(L, M))
            expected = comb(L, M) - (comb(L, M - 1) if M else 0)
            validated = sum(e.validation.passed for e in entries)
            if not (sol.count_distinct == validated == expected):
                bad.append((L, M, sol.count_distinct, expected))
    elapsed = time.perf_counter() - start
    record(2, not bad and elapsed < 600, f"L=2..8 all M, mismatches {bad}, {elapsed:.1f}s")


def test_criterion_3_all_diagrams():
    bad = []
    total = 0
    for L in range(3, 7):
        for lam in enumerate_partitions(L):
            _, sol, entries = solve_entries(lam)
            total += 1
            d = multiplicity(lam)
            if not (sol.count_distinct == d and all(e.validation.passed for e in entries)):
                bad.append((str(lam), sol.count_distinct, d))
    record(3, not bad, f"{total} diagrams for L=3..6, mismatches {bad}")


def test_criterion_4_spectra_against_oracle():
    worst = 0.0
    bad = []
    for L in range(2, 9):
        oracle = su2_new_levels(L)
        for M in range(L // 2 + 1):
            _, _, entries = solve_entries(two_row(L, M))
            bethe = sorted(float(mpmath.re(e.energy.value)) for e in entries)
            ref = sorted(oracle[M])
            if len(bethe) != len(ref):
                bad.append((L, M))
                continue
            gap = max((abs(a - b) for a, b in zip(bethe, ref)), default=0.0)
            worst = max(worst, gap)
            if gap > 1e-8:
                bad.append((L, M))
    _, _, (two_site,) = solve_entries(two_row(2, 1))
    e2 = float(mpmath.re(two_site.energy.value))
    ok = not bad and abs(e2 - 4) < 1e-8 and abs(su2_new_levels(2)[1][0] - 4) < 1e-8
    record(4, ok, f"max deviation {worst:.2e}, mismatched sectors {bad}, L=2 energy {e2}")


def test_criterion_5_exceptional_state(run_cli):
    code, part = solve_doc(run_cli, "--length", "4", "--partition", "2,2")
    sols = part["solutions"]
    exc = [s for s in sols if s["exceptional"]]
    ok = (
        code == 0
        and len(sols) == 2
        and len(exc) == 1
        and exc[0]["validation"]["passed"]
        and exc[0]["validation"]["dual_q_polynomial_ok"]
        and exc[0]["validation"]["bethe_residual"] == "not-applicable"
    )
    u = u_poly()
    Q = u**2 - mpq(1, 4)
    dual = dual_q(Q, u**4)
    ok = ok and isinstance(dual, UPoly) and dual.degree == 3
    record(5, ok, f"{len(sols)} solutions, {len(exc)} exceptional, dual degree {dual.degree if dual else None}")


PROPERTY_TESTS = [
    "test_exact_algebra.py::test_shift_inverse",
    "test_exact_algebra.py::test_shift_is_ring_homomorphism",
    "test_exact_algebra.py::test_upoly_ring_laws",
    "test_exact_algebra.py::test_mpoly_ring_laws",
    "test_exact_algebra.py::test_divmod_reconstruction",
    "test_exact_algebra.py::test_wronskian_antisymmetric_bilinear",
    "test_exact_algebra.py::test_psi_is_right_inverse_of_difference",
    "test_representation.py::test_plaquette_degree_identity",
    "test_qgrid.py::test_normalization_constant_is_hook_length",
    "test_solver.py::test_groebner_agrees_with_sympy",
    "test_solver.py::test_split_matches_unsplit",
]


def test_criterion_6_property_suites():
    from conftest import PROPERTY_EXAMPLES

    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *PROPERTY_TESTS],
        cwd=TESTS,
        capture_output=True,
        text=True,
    )
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    ok = proc.returncode == 0 and PROPERTY_EXAMPLES >= 1000
    record(6, ok, f"{PROPERTY_EXAMPLES} examples per property, split vs unsplit on every L<=6 diagram: {tail}")


def test_criterion_7_negative_controls(run_cli):
    u = u_poly()
    grid = build_grid(two_row(4, 2))
    c0, c1 = grid.symbols
    perturbed = {c0: mpq(13, 12), c1: mpq(0)}
    Q = UPoly([perturbed[c0], perturbed[c1], 1])
    rejected = (
        not grid_polynomiality(grid, QQ, perturbed)
        and not baxter_T(Q, u**4)[1]
        and dual_q(Q, u**4) is None
    )
    code, part = solve_doc(run_cli, "--length", "5", "--partition", "3,2", "--relations", "rect:2,1")
    over = part["found_distinct"]
    kept = part["validated_count"]
    ok = rejected and over > 5 and kept == 5 == multiplicity(Partition((3, 2))) and code == 2
    record(7, ok, f"perturbed rejected={rejected}; rect:2,1 on (3,2) found {over}, grid filter keeps {kept}")


def test_criterion_8_declared_not_reproduced():
    # L = 12, M >= 4 rows are stretch targets; their mechanisms run here at L <= 8
    bad = []
    for L in (7, 8):
        for M in range(L // 2 + 1):
            lam = two_row(L, M)
            _, plain, _ = solve_entries(lam)
            _, split, entries = solve_entries(lam, split=True)
            if not (plain.count_distinct == split.count_distinct == multiplicity(lam)):
                bad.append(("split", L, M))
            if not all(e.validation.passed for e in entries):
                bad.append(("validate", L, M))
    for parts, region in [((4, 4), "rect:2,4"), ((5, 3), "rect:2,3"), ((3, 3, 2), "rect:3,3")]:
        lam = Partition(parts)
        _, sol, entries = solve_entries(lam, region)
        if sum(e.validation.passed for e in entries) != multiplicity(lam):
            bad.append(("rect", parts, region, sol.count_distinct))
    record(8, not bad, f"declared not reproduced: L=12 rows 154/275/297/132; split and rectangle checks at L<=8 failures {bad}")
