import random
import sys

import pytest
from hypothesis import settings, strategies as st

from epsaccept.core import Alphabet, Branch, Leaf, RegularTree, TreeAutomaton
from epsaccept.generate import random_automaton, random_tree

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

SIGMA = Alphabet({"*"}, {"s"})
OKERR = Alphabet({"*"}, {"ok", "err"})
SMALL = Alphabet({"c0"}, {"f0", "f1"})


def sigma_automaton():
    """One state, one transition: only the full s-tree is accepted."""
    return TreeAutomaton({"a"}, "a", {"a": [Branch("s", "a", "a")]}, SIGMA)


def okerr_automaton():
    return TreeAutomaton({"a"}, "a", {"a": [Leaf("*"), Branch("ok", "a", "a")]}, OKERR)


def tree(root, **nodes):
    """tree("r", r=("ok", "x", "x"), x="*")"""
    succ = {n: Leaf(v) if isinstance(v, str) else Branch(*v) for n, v in nodes.items()}
    symbols = [v for v in nodes.values()]
    alphabet = Alphabet({v for v in symbols if isinstance(v, str)}, {v[0] for v in symbols if not isinstance(v, str)})
    return RegularTree(root, succ, alphabet)


@pytest.fixture
def okerr():
    return okerr_automaton()


@pytest.fixture
def sigma():
    return sigma_automaton()


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def trees(draw, alphabet=SMALL, max_nodes=8, leaf_prob=None, back=None):
    rng = random.Random(draw(seeds))
    lp = draw(st.sampled_from([0.1, 0.3, 0.5])) if leaf_prob is None else leaf_prob
    bp = draw(st.sampled_from([0.0, 0.25, 0.6])) if back is None else back
    return random_tree(rng, alphabet, max_nodes, lp, bp)


@st.composite
def automata(draw, alphabet=SMALL, max_states=4):
    rng = random.Random(draw(seeds))
    return random_automaton(rng, alphabet, max_states, draw(st.integers(1, 4)), draw(st.sampled_from([0.2, 0.5])))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
