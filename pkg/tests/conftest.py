import pytest
from gmpy2 import mpq
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qsolve.algebra.mpoly import MPoly
from qsolve.algebra.upoly import UPoly
from qsolve.representation import Partition

# property suites pin their own example counts; this only relaxes timing
settings.register_profile("qsolve", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qsolve")

PROPERTY_EXAMPLES = 1000


def rationals(max_num=20, max_den=6):
    return st.builds(
        lambda n, d: mpq(n, d),
        st.integers(-max_num, max_num),
        st.integers(1, max_den),
    )


def upolys(max_degree=5):
    return st.lists(rationals(), min_size=0, max_size=max_degree + 1).map(UPoly)


def monic_upolys(max_degree=4, min_degree=0):
    return st.lists(rationals(), min_size=min_degree, max_size=max_degree).map(
        lambda cs: UPoly(list(cs) + [1])
    )


def mpolys(nvars=3, max_terms=4, max_exp=2):
    term = st.tuples(
        st.tuples(*[st.integers(0, max_exp) for _ in range(nvars)]),
        rationals(),
    )
    return st.lists(term, max_size=max_terms).map(
        lambda items: MPoly(nvars, _merge(items))
    )


def _merge(items):
    out = {}
    for e, c in items:
        out[e] = out.get(e, mpq(0)) + c
    return out


@st.composite
def partitions(draw, max_weight=12, max_rows=5):
    L = draw(st.integers(1, max_weight))
    parts = []
    rest, cap = L, L
    while rest and len(parts) < max_rows:
        p = draw(st.integers(1, min(rest, cap)))
        parts.append(p)
        rest -= p
        cap = p
    if rest:
        # too many rows requested; fold the rest into the first row
        parts[0] += rest
    return Partition(tuple(parts))


@pytest.fixture
def run_cli(capsys):
    """Run the command-line entry point in-process; returns (code, stdout, stderr)."""
    from qsolve.cli import main

    def run(*argv):
        code = main(list(argv))
        out = capsys.readouterr()
        return code, out.out, out.err

    return run


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
