from fractions import Fraction

import pytest
from hypothesis import given

from conftest import OKERR, SIGMA, tree, trees
from oracles import is_acyclic, unfolded_error_mass, unfolded_leaf_mass
from epsaccept.core import InvalidInput, loop_tree
from epsaccept.fixpoint import NoConvergence
from epsaccept.measures import (
    EXACT,
    ITERATION,
    defect_mass,
    error_mass,
    leaf_mass,
    relative_measure,
)


def test_relative_measure():
    assert relative_measure("01", "0110") == Fraction(1, 4)
    assert relative_measure("", "") == 1
    assert relative_measure("1", "01") == 0


def test_full_sigma_tree_has_no_leaf_mass():
    t = loop_tree("s", SIGMA)
    assert leaf_mass(t)[t.root] == 0
    assert leaf_mass(t, ITERATION)[t.root] == 0.0


def test_leaf_spine_has_full_mass():
    t = tree("r", r=("s", "x", "r"), x="*")
    table = leaf_mass(t)
    assert table.method == EXACT
    assert table[t.root] == 1


def test_three_quarters():
    t = tree("r", r=("s", "x", "y"), x="*", y=("s", "x", "y2"), y2=("s", "y2", "y2"))
    assert leaf_mass(t)[t.root] == Fraction(3, 4)


def test_error_mass_example():
    t = tree("r", r=("ok", "e", "x"), e=("err", "x", "x"), x="*")
    assert error_mass(t, ["err"])[t.root] == Fraction(1, 2)
    with pytest.raises(InvalidInput):
        error_mass(t, ["*"])


def test_error_loop_cycles_through_ok():
    t = tree("r", r=("ok", "e", "r"), e=("err", "r", "r"))
    assert error_mass(t)[t.root] == 1


def test_base_must_cover_every_node():
    t = tree("r", r=("s", "x", "x"), x="*")
    with pytest.raises(InvalidInput):
        defect_mass(t, {"r": None})
    with pytest.raises(InvalidInput):
        defect_mass(t, {"r": None, "x": None})
    with pytest.raises(InvalidInput):
        defect_mass(t, {"r": None, "x": 2})


@given(trees(alphabet=SIGMA, max_nodes=12))
def test_exact_and_iteration_agree(t):
    exact = leaf_mass(t, EXACT)
    approx = leaf_mass(t, ITERATION, tol=1e-12)
    for n in t.nodes:
        # iteration under-approximates the least solution
        assert float(exact[n]) + 1e-12 >= approx[n] >= float(exact[n]) - 1e-6
    assert exact.residual == 0.0


@given(trees(alphabet=SIGMA, max_nodes=12))
def test_unfolding_bounds_the_leaf_mass(t):
    m = leaf_mass(t)[t.root]
    assert unfolded_leaf_mass(t, 10) <= m
    if is_acyclic(t):
        assert m == 1 == unfolded_leaf_mass(t, len(t) + 1)


@given(trees(alphabet=OKERR, max_nodes=12))
def test_unfolding_bounds_the_error_mass(t):
    m = error_mass(t)[t.root]
    assert unfolded_error_mass(t, {"err"}, 10) <= m
    if is_acyclic(t):
        assert m == unfolded_error_mass(t, {"err"}, len(t) + 1)


@given(trees(alphabet=OKERR, max_nodes=12))
def test_error_mass_and_clean_leaves_are_disjoint(t):
    # leaves reached without passing an error node
    base = {n: 1 if t[n].arity == 0 else (0 if t[n].symbol == "err" else None) for n in t.nodes}
    clean = defect_mass(t, base)[t.root]
    assert 0 <= clean + error_mass(t)[t.root] <= 1


def test_iteration_budget_exhausted():
    t = tree("r", r=("s", "x", "r"), x="*")
    with pytest.raises(NoConvergence):
        defect_mass(t, {"r": None, "x": 1}, ITERATION, tol=1e-15, max_iter=5)
