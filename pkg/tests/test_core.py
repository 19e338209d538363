import random

import pytest
from hypothesis import given

from conftest import OKERR, SIGMA, SMALL, tree, trees
from epsaccept.core import (
    AVG,
    MAX,
    AddressUnresolvable,
    Alphabet,
    Branch,
    InvalidInput,
    Leaf,
    RegularTree,
    TreeAutomaton,
    canonicalize,
    check_monotone,
    get_lifting,
    leaf_tree,
    lifted_distance,
    lifted_relation_holds,
    loop_tree,
    parse_lifting,
    require_valid,
    resolve,
    substitute,
    subtree,
    unfold,
    validate,
    weighted,
)


def kinds(obj):
    return [d.kind for d in validate(obj)]


def test_alphabet_invariants():
    assert Alphabet({"a"}, {"a"}).diagnostics()[0].kind == "AlphabetOverlap"
    assert Alphabet().diagnostics()[0].kind == "EmptyAlphabet"
    assert Alphabet({"*"}, {"s"}).diagnostics() == []


def test_tree_diagnostics():
    assert kinds(RegularTree("r", {"r": Leaf("s")}, SIGMA)) == ["ArityMismatch"]
    assert kinds(RegularTree("r", {"r": Branch("*", "r", "r")}, SIGMA)) == ["ArityMismatch"]
    assert kinds(RegularTree("r", {"r": Leaf("zz")}, SIGMA)) == ["UnknownSymbol"]
    assert kinds(RegularTree("r", {"r": Branch("s", "r", "q")}, SIGMA)) == ["DanglingChild"]
    assert kinds(RegularTree("r", {}, SIGMA)) == ["MissingRoot"]
    assert kinds(loop_tree("s", SIGMA)) == []


def test_unreachable_nodes_are_pruned():
    t = RegularTree("r", {"r": Leaf("*"), "junk": Leaf("*")}, SIGMA)
    assert t.nodes == ("r",)


def test_automaton_diagnostics():
    assert kinds(TreeAutomaton({"a"}, "a", {"a": []}, SIGMA)) == ["DeadlockState"]
    assert kinds(TreeAutomaton({"a"}, "b", {"a": [Leaf("*")]}, SIGMA)) == ["UnknownState"]
    assert kinds(TreeAutomaton({"a"}, "a", {"a": [Branch("s", "a", "z")]}, SIGMA)) == ["UnknownState"]
    with pytest.raises(InvalidInput):
        require_valid(TreeAutomaton({"a"}, "a", {"a": []}, SIGMA))


def test_canonical_transition_order_puts_leaves_first():
    aut = TreeAutomaton({"a"}, "a", {"a": [Branch("ok", "a", "a"), Leaf("*")]}, OKERR)
    assert aut.transitions("a")[0] == Leaf("*")


def test_resolve_and_subtree():
    t = tree("r", r=("ok", "e", "x"), e=("err", "x", "x"), x="*")
    assert resolve(t, "") == "r"
    assert resolve(t, "01") == "x"
    with pytest.raises(AddressUnresolvable) as exc:
        resolve(t, "10")
    assert exc.value.prefix == "1"
    with pytest.raises(ValueError):
        resolve(t, "2")
    assert unfold(subtree(t, "0"), 1) == {"": "err", "0": "*", "1": "*"}


def test_resolve_on_a_loop_never_fails():
    t = loop_tree("s", SIGMA)
    assert resolve(t, "0110101") == "n0"


def test_substitute_touches_only_one_address():
    t = loop_tree("s", SIGMA)
    out = substitute(t, "01", leaf_tree("*", SIGMA))
    labels = unfold(out, 4)
    assert labels["01"] == "*"
    assert "010" not in labels
    assert labels["00"] == labels["10"] == labels["11"] == labels["0011"] == "s"
    assert validate(out) == []


@given(trees())
def test_substitution_agrees_with_unfolding(t):
    rng = random.Random(len(t))
    labels = unfold(t, 4)
    addr = rng.choice(sorted(labels))
    out = substitute(t, addr, leaf_tree("c0", SMALL))
    new = unfold(out, 4)
    for w, sym in labels.items():
        if w.startswith(addr) and w != addr:
            continue
        assert new[w] == ("c0" if w == addr else sym)
    assert not [w for w in new if w.startswith(addr) and w != addr]


@given(trees())
def test_canonicalize_preserves_unfolding(t):
    c = canonicalize(t)
    assert unfold(c, 5) == unfold(t, 5)
    assert c.root == "n0"
    assert canonicalize(c).succ == c.succ


def test_lifted_relation():
    r = {("a", "x"), ("b", "y")}
    assert lifted_relation_holds(r, Branch("s", "a", "b"), Branch("s", "x", "y"))
    assert not lifted_relation_holds(r, Branch("s", "b", "a"), Branch("s", "x", "y"))
    assert lifted_relation_holds(set(), Leaf("*"), Leaf("*"))
    assert not lifted_relation_holds(r, Leaf("*"), Branch("s", "x", "y"))


def test_lifted_distance():
    d = {("a", "x"): 0.2, ("b", "y"): 0.6}
    assert lifted_distance(AVG, d, Branch("s", "a", "b"), Branch("s", "x", "y")) == pytest.approx(0.4)
    assert lifted_distance(MAX, d, Branch("s", "a", "b"), Branch("s", "x", "y")) == pytest.approx(0.6)
    assert lifted_distance(weighted(0.3), d, Branch("s", "a", "b"), Branch("s", "x", "y")) == pytest.approx(0.48)
    assert lifted_distance(AVG, d, Leaf("*"), Leaf("*")) == 0.0
    assert lifted_distance(AVG, d, Leaf("*"), Leaf("c")) == 1.0
    assert lifted_distance(AVG, d, Branch("ok", "a", "b"), Branch("err", "x", "y")) == 1.0


def test_lifting_lookup():
    assert parse_lifting("avg") is AVG
    assert parse_lifting("weighted:0.3")(1.0, 0.0) == pytest.approx(0.3)
    assert parse_lifting("weighted(0.25)").params == (0.25,)
    assert get_lifting("weighted", {"p": 0.5}).as_obj() == {"name": "weighted", "params": {"p": 0.5}}
    for bad in ("median", "weighted:2"):
        with pytest.raises(ValueError):
            parse_lifting(bad)
    with pytest.raises(ValueError):
        get_lifting("weighted")


def test_monotonicity_sampler_catches_a_bad_lifting():
    from epsaccept.core import Lifting

    bad = Lifting("flip", lambda x, y: 1.0 - x)
    assert check_monotone(bad, 200)
    for lifting in (AVG, MAX, weighted(0.3)):
        assert check_monotone(lifting, 200) == []
