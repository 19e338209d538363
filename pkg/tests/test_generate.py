from hypothesis import given

from conftest import seeds
from oracles import is_acyclic
from epsaccept.core import validate
from epsaccept.formats import emit
from epsaccept.generate import GeneratorConfig, generate_instance
import pytest

from epsaccept.measures import leaf_mass


@given(seeds)
def test_deterministic_in_seed(seed):
    cfg = GeneratorConfig(seed=seed)
    assert emit(generate_instance(cfg)) == emit(generate_instance(cfg))


@given(seeds)
def test_generated_objects_are_valid(seed):
    b = generate_instance(GeneratorConfig(seed=seed, max_nodes=15, max_states=5))
    assert validate(b.tree) == [] and validate(b.automaton) == []
    assert len(b.tree) <= 15 and len(b.automaton.states) <= 5


@given(seeds)
def test_leaf_probability_one_gives_a_finite_tree(seed):
    b = generate_instance(GeneratorConfig(seed=seed, leaf_prob=1.0))
    assert is_acyclic(b.tree)
    assert leaf_mass(b.tree)[b.tree.root] == 1


@given(seeds)
def test_all_back_edges_no_leaves(seed):
    b = generate_instance(GeneratorConfig(seed=seed, leaf_prob=0.0, back_edge_prob=1.0))
    assert all(b.tree[n].arity == 2 for n in b.tree.nodes)
    assert leaf_mass(b.tree)[b.tree.root] == 0


def test_both_finite_and_infinite_unfoldings_occur():
    kinds = {is_acyclic(generate_instance(GeneratorConfig(seed=s)).tree) for s in range(40)}
    assert kinds == {True, False}


@pytest.mark.parametrize(
    "kwargs", [{"leaf_prob": 1.5}, {"back_edge_prob": -0.1}, {"max_nodes": 0}, {"nullary_size": 0, "binary_size": 0}]
)
def test_config_invariants(kwargs):
    with pytest.raises(ValueError):
        GeneratorConfig(**kwargs)
