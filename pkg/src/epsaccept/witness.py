"""Witness trees: an accepted tree within the optimal budget of the input.

Following Verifier's optimal epsilon-strategy from the root gives a run tree
over (state, node) pairs.  Pairs whose budget is below the value-1 threshold
copy the input's successor; at the first pair reaching the threshold the
accepted tree of its state is spliced in.  The result is accepted by the
automaton and its bisimulation distance to the input is at most the root
budget.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping

from .acceptance import ChoiceFunction, _chooser, accepted_tree, accepts
from .bisim import distance_table
from .core import AVG, Branch, Leaf, Lifting, RegularTree, TreeAutomaton, canonicalize, require_valid
from .epsgame import EpsStrategy, EpsValueTable, eps_strategy, eps_value_table
from .fixpoint import DEFAULT_MAX_ITER, FLOAT_EPS

DEFAULT_THRESHOLD = 1.0 - 1e-6


@dataclass(frozen=True, eq=False)
class RunTree:
    root: tuple
    values: Mapping  # (state, node) -> budget carried at that pair
    edges: Mapping  # (state, node) -> () or (left pair, right pair)

    def __len__(self):
        return len(self.values)

    def addresses(self, depth: int) -> dict:
        """Unfolded addresses of length at most ``depth``, each mapped to its pair."""
        out = {}
        frontier = [("", self.root)]
        for _ in range(depth + 1):
            nxt = []
            for addr, pair in frontier:
                out[addr] = pair
                kids = self.edges[pair]
                if kids:
                    nxt.append((addr + "0", kids[0]))
                    nxt.append((addr + "1", kids[1]))
            frontier = nxt
        return out


def run_tree(automaton: TreeAutomaton, tree: RegularTree, strategy: EpsStrategy) -> RunTree:
    require_valid(automaton, tree)
    root = (automaton.initial, tree.root)
    if root not in strategy:
        raise ValueError("strategy was not extracted for this automaton and tree")
    values = {root: strategy.values[root]}
    edges = {}
    queue = deque([root])
    while queue:
        pair = queue.popleft()
        entry = strategy[pair]
        t, s = entry.transition, tree[pair[1]]
        if isinstance(t, Branch) and isinstance(s, Branch) and t.symbol == s.symbol:
            kids = ((t.left, s.left), (t.right, s.right))
            edges[pair] = kids
            for k in kids:
                if k not in values:
                    values[k] = entry.distance(*k)
                    queue.append(k)
        else:
            edges[pair] = ()
    return RunTree(root, values, edges)


@dataclass(frozen=True, eq=False)
class WitnessConstruction:
    tree: RegularTree  # node ids: ("run", state, node) or ("acc", state)
    inner: frozenset  # pairs copied from the input
    frontier: frozenset  # pairs where an accepted tree was spliced
    table: EpsValueTable


def build_witness(
    automaton: TreeAutomaton,
    tree: RegularTree,
    lifting: Lifting = AVG,
    tol: float | None = None,
    threshold: float = DEFAULT_THRESHOLD,
    choice: ChoiceFunction = None,
    table: EpsValueTable | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
) -> WitnessConstruction:
    require_valid(automaton, tree)
    if table is None:
        table = eps_value_table(automaton, tree, lifting, tol, max_iter)
    strategy = eps_strategy(table, automaton, tree)
    pick = _chooser(automaton, choice)
    fixed = {b: pick(b) for b in sorted(automaton.states)}

    succ = {}
    inner, frontier = set(), set()
    spliced = set()

    def node_for(pair):
        return ("acc", pair[0]) if pair in frontier else ("run",) + pair

    root = (automaton.initial, tree.root)
    order = []
    seen = {root}
    queue = deque([root])
    while queue:
        pair = queue.popleft()
        order.append(pair)
        t, s = strategy[pair].transition, tree[pair[1]]
        matched = (isinstance(t, Leaf) and isinstance(s, Leaf) and t.symbol == s.symbol) or (
            isinstance(t, Branch) and isinstance(s, Branch) and t.symbol == s.symbol
        )
        if table[pair] >= threshold or not matched:
            frontier.add(pair)
            spliced.add(pair[0])
            continue
        inner.add(pair)
        if isinstance(t, Branch):
            for k in ((t.left, s.left), (t.right, s.right)):
                if k not in seen:
                    seen.add(k)
                    queue.append(k)

    for pair in order:
        if pair not in inner:
            continue
        t, s = strategy[pair].transition, tree[pair[1]]
        if isinstance(s, Leaf):
            succ[node_for(pair)] = s
        else:
            succ[node_for(pair)] = Branch(
                s.symbol, node_for((t.left, s.left)), node_for((t.right, s.right))
            )
    for b in sorted(spliced):
        part = accepted_tree(automaton, b, fixed)
        for state, t in part.succ.items():
            if isinstance(t, Leaf):
                succ[("acc", state)] = t
            else:
                succ[("acc", state)] = Branch(t.symbol, ("acc", t.left), ("acc", t.right))

    alphabet = tree.alphabet.union(automaton.alphabet)
    raw = RegularTree(node_for(root), succ, alphabet)
    return WitnessConstruction(raw, frozenset(inner), frozenset(frontier), table)


def witness_tree(
    automaton: TreeAutomaton,
    tree: RegularTree,
    lifting: Lifting = AVG,
    tol: float | None = None,
    threshold: float = DEFAULT_THRESHOLD,
    choice: ChoiceFunction = None,
    max_iter: int = DEFAULT_MAX_ITER,
) -> RegularTree:
    built = build_witness(automaton, tree, lifting, tol, threshold, choice, max_iter=max_iter)
    return canonicalize(built.tree)


@dataclass(frozen=True, eq=False)
class WitnessReport:
    witness: RegularTree
    accepted: bool
    bd_value: float
    residual: float
    epsilon: float
    passed: bool

    def __str__(self):
        status = "pass" if self.passed else "fail"
        return (
            f"{status}: accepted={self.accepted} bd={self.bd_value:.12g} "
            f"(residual {self.residual:.3g}) epsilon={self.epsilon:.12g}"
        )


def verify_witness(
    automaton: TreeAutomaton,
    tree: RegularTree,
    witness: RegularTree,
    epsilon: float,
    lifting: Lifting = AVG,
    tol: float | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
) -> WitnessReport:
    """Check the witness is accepted and within ``epsilon`` of ``tree``."""
    accepted = accepts(automaton, witness)
    start = (witness.root, tree.root)
    table = distance_table(witness, tree, lifting, tol, max_iter, start=start)
    value = table[start]
    passed = accepted and value <= epsilon + FLOAT_EPS
    return WitnessReport(witness, accepted, value, table.residual, epsilon, passed)
