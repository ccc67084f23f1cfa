from fractions import Fraction as F

import pytest
from hypothesis import strategies as st

from truncsc.population import Population

P0_MASSES = {(137, 0): F(1, 2), (33, 1): F(1, 2)}
P1_MASSES = {(137, 0): F(1, 2), (65, 0): F(1, 2)}


@pytest.fixture
def p0():
    return Population(P0_MASSES)


@pytest.fixture
def p1():
    return Population(P1_MASSES)


cells = st.tuples(st.integers(1, 256), st.integers(0, 1))

# Small supports reach the boundaries (empty strata, zero conditions) that
# dense random weights almost never produce.
weights = st.dictionaries(cells, st.integers(0, 6), min_size=1, max_size=8).filter(
    lambda d: sum(d.values()) > 0
)


def to_population(w):
    return Population.from_weights(w)


_acceptance_lines = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion, then assert it."""

    def record(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}"
        if detail:
            line += f" ({detail})"
        _acceptance_lines.append((number, line))
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_acceptance_lines):
            terminalreporter.write_line(line)
