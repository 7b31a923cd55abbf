import random

import pytest
from hypothesis import strategies as st

from sembleu.graph import parse_penman
from sembleu.synthetic import random_amr

ASK = "(a / ask-01 :ARG0 (g / girl) :ARG1 (l / leave-11 :ARG0 (b / boy)))"
MAKE = "(m / make-01 :ARG0 (w / woman) :ARG1 (p / pie :quant 2))"


@pytest.fixture
def ask():
    return parse_penman(ASK)


@pytest.fixture
def make():
    return parse_penman(MAKE)


@st.composite
def amr_graphs(draw, min_vars=1, max_vars=8, **kw):
    """Random AMR-like graphs (re-entrancy, constants, inverse roles)."""
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(min_vars, max_vars))
    return random_amr(random.Random(seed), n, **kw)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS, key=lambda l: int(l.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)
