import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from linf_cophenetic.newick import loads
from linf_cophenetic.random_trees import random_phylo_tree

settings.register_profile(
    "default", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# The two 4-leaf trees printed with their cophenetic matrices, with a_i = i.
# Left: cherries {1,2} at a6 and {3,4} at a5 under a root at a7; leaves at
# a1, a4, a2, a3.  Right: (1, (2, (3, 4)a5)a6)a7; leaves at a2, a3, a4, a1.
FIG2_LEFT = (
    "((1[&height=1],2[&height=4])[&height=6],"
    "(3[&height=2],4[&height=3])[&height=5])[&height=7];"
)
FIG2_RIGHT = (
    "(1[&height=2],(2[&height=3],(3[&height=4],4[&height=1])[&height=5])"
    "[&height=6])[&height=7];"
)
# Same two trees as branch lengths, root at 0 (every height lowered by 7).
FIG2_LEFT_LENGTHS = "((1:5,2:2):1,(3:3,4:2):2):0;"
FIG2_RIGHT_LENGTHS = "(1:5,(2:3,(3:1,4:4):1):1):0;"

FIG2_LEFT_ROWS = [[1, 6, 7, 7], [4, 7, 7], [2, 5], [3]]
FIG2_RIGHT_ROWS = [[2, 7, 7, 7], [3, 6, 6], [4, 5], [1]]


@pytest.fixture
def fig2_left():
    return loads(FIG2_LEFT)[0]


@pytest.fixture
def fig2_right():
    return loads(FIG2_RIGHT)[0]


def trees(min_n=1, max_n=8, dyadic_bits=None, multifurcation=0.2):
    """Strategy: random labeled trees over the names t0..t{n-1}."""
    return st.tuples(st.integers(min_n, max_n), st.integers(0, 2**32 - 1)).map(
        lambda a: random_phylo_tree(
            a[0], a[1], dyadic_bits=dyadic_bits, multifurcation=multifurcation
        )
    )


def tree_pairs(min_n=1, max_n=8, dyadic_bits=None, count=2):
    """Strategy: ``count`` random trees sharing one label set."""
    return st.tuples(
        st.integers(min_n, max_n), st.lists(st.integers(0, 2**32 - 1), min_size=count, max_size=count)
    ).map(
        lambda a: tuple(
            random_phylo_tree(a[0], s, dyadic_bits=dyadic_bits, multifurcation=0.2)
            for s in a[1]
        )
    )


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
