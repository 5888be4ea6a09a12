import pytest
from hypothesis import strategies as st

from certsel import CsInstance
from certsel.generators import balanced_identity, letters_digits, t1


@pytest.fixture
def T1():
    return t1()


@pytest.fixture
def balanced():
    return balanced_identity()


@pytest.fixture
def ld4():
    return letters_digits(4)


@st.composite
def instances(draw, max_in=5, max_out=5, max_certs=7, allow_isolated_in=False):
    """Small valid instances; every in-class point has a certificate unless allowed otherwise."""
    n_in = draw(st.integers(1, max_in))
    n_out = draw(st.integers(1, max_out))
    m = draw(st.integers(1, max_certs))
    ins = [f"x{i}" for i in range(n_in)]
    outs = [f"y{i}" for i in range(n_out)]
    certs = [f"c{i}" for i in range(m)]
    edges = set()
    for x in ins + outs:
        row = draw(st.lists(st.booleans(), min_size=m, max_size=m))
        edges |= {(x, c) for c, on in zip(certs, row) if on}
    if not allow_isolated_in:
        for x in ins:
            if not any(e[0] == x for e in edges):
                edges.add((x, certs[draw(st.integers(0, m - 1))]))
    return CsInstance.build(ins, outs, certs, edges)


ACCEPTANCE_LINES = []


def record_criterion(number, name, ok, elapsed, limit, detail=""):
    status = "PASS" if ok else "FAIL"
    line = f"criterion {number} [{status}] {name}: {elapsed:.2f}s (limit {limit}s)"
    ACCEPTANCE_LINES.append(line + (f" {detail}" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
