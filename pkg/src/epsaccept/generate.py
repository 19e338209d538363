"""Seeded random trees, automata and instance bundles."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from .core import AVG, Alphabet, Branch, Leaf, Lifting, RegularTree, TreeAutomaton
from .formats import InstanceBundle


@dataclass(frozen=True)
class GeneratorConfig:
    max_nodes: int = 8
    max_states: int = 4
    nullary_size: int = 1
    binary_size: int = 2
    leaf_prob: float = 0.25
    back_edge_prob: float = 0.25
    fan_out: int = 4
    seed: int = 0
    alphabet: Alphabet | None = None
    lifting: Lifting | None = None

    def __post_init__(self):
        for name in ("leaf_prob", "back_edge_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        for name in ("max_nodes", "max_states", "fan_out"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.alphabet is None and self.nullary_size + self.binary_size < 1:
            raise ValueError("alphabet must have at least one symbol")
        if self.nullary_size < 0 or self.binary_size < 0:
            raise ValueError("alphabet sizes must be nonnegative")

    def make_alphabet(self) -> Alphabet:
        if self.alphabet is not None:
            return self.alphabet
        return Alphabet(
            [f"c{i}" for i in range(self.nullary_size)],
            [f"f{i}" for i in range(self.binary_size)],
        )


def random_tree(
    rng: random.Random,
    alphabet: Alphabet,
    max_nodes: int = 8,
    leaf_prob: float = 0.35,
    back_edge_prob: float = 0.25,
) -> RegularTree:
    """Grow a tree breadth-first; back edges point at any node created so far."""
    nullary = sorted(alphabet.nullary)
    binary = sorted(alphabet.binary)
    target = rng.randint((max_nodes + 1) // 2, max_nodes)
    ids = ["n0"]
    pending = deque(ids)
    succ = {}
    while pending:
        n = pending.popleft()
        budget = target - len(ids)
        make_leaf = bool(nullary) and (not binary or rng.random() < leaf_prob)
        modes = []
        if not make_leaf:
            modes = ["back" if rng.random() < back_edge_prob else "new" for _ in range(2)]
            excess = modes.count("new") - budget
            if excess > 0:
                if back_edge_prob > 0 or not nullary:
                    for i in (1, 0):
                        if excess > 0 and modes[i] == "new":
                            modes[i] = "back"
                            excess -= 1
                else:
                    make_leaf = True
        if make_leaf:
            succ[n] = Leaf(rng.choice(nullary))
            continue
        kids = []
        for mode in modes:
            if mode == "back":
                kids.append(rng.choice(ids))
            else:
                kid = f"n{len(ids)}"
                ids.append(kid)
                pending.append(kid)
                kids.append(kid)
        succ[n] = Branch(rng.choice(binary), kids[0], kids[1])
    return RegularTree("n0", succ, alphabet)


def random_automaton(
    rng: random.Random, alphabet: Alphabet, max_states: int = 4, fan_out: int = 3, leaf_prob: float = 0.35
) -> TreeAutomaton:
    nullary = sorted(alphabet.nullary)
    binary = sorted(alphabet.binary)
    states = [f"q{i}" for i in range(rng.randint(1, max_states))]
    delta = {}
    for q in states:
        ts = []
        for _ in range(rng.randint(1, fan_out)):
            if nullary and (not binary or rng.random() < leaf_prob):
                ts.append(Leaf(rng.choice(nullary)))
            else:
                ts.append(Branch(rng.choice(binary), rng.choice(states), rng.choice(states)))
        delta[q] = ts
    return TreeAutomaton(states, "q0", delta, alphabet)


def random_choice(automaton: TreeAutomaton, rng: random.Random) -> dict:
    """A random choice function: one transition per state."""
    return {a: rng.choice(automaton.transitions(a)) for a in sorted(automaton.states)}


def generate_instance(config: GeneratorConfig) -> InstanceBundle:
    rng = random.Random(config.seed)
    alphabet = config.make_alphabet()
    tree = random_tree(rng, alphabet, config.max_nodes, config.leaf_prob, config.back_edge_prob)
    automaton = random_automaton(rng, alphabet, config.max_states, config.fan_out, config.leaf_prob)
    return InstanceBundle(alphabet, tree, automaton, config.lifting or AVG, None, config.seed)
