"""Boolean acceptance game of a safety tree automaton on a regular tree.

Verifier picks a transition and a relation on successor pairs, Falsifier
picks a pair from the relation.  Infinite plays are won by Verifier, so the
winning region is a greatest fixpoint.  Falsifier's choices are restricted
to the minimal relations (empty, or the two immediate successor pairs);
this restriction does not change who wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Union

from .core import (
    Branch,
    InvalidInput,
    Leaf,
    RegularTree,
    Successor,
    TreeAutomaton,
    iter_pairs,
    lifted_relation_holds,
    require_valid,
)


def minimal_relation(transition: Successor, succ: Successor) -> frozenset | None:
    """The smallest relation lifting ``transition`` to ``succ``, or None if none exists."""
    if isinstance(transition, Leaf) and isinstance(succ, Leaf):
        return frozenset() if transition.symbol == succ.symbol else None
    if isinstance(transition, Branch) and isinstance(succ, Branch) and transition.symbol == succ.symbol:
        return frozenset({(transition.left, succ.left), (transition.right, succ.right)})
    return None


def _good_move(transition, succ, region) -> bool:
    rel = minimal_relation(transition, succ)
    return rel is not None and rel <= region


def safety_step(automaton: TreeAutomaton, tree: RegularTree, region) -> set:
    """One application of the controllable-predecessor operator."""
    return {
        (a, w)
        for a, w in sorted(region)
        if any(_good_move(t, tree[w], region) for t in automaton.transitions(a))
    }


@dataclass(frozen=True, eq=False)
class WinningRegion:
    pairs: frozenset
    automaton: TreeAutomaton
    tree: RegularTree
    rounds: int = 0

    def __contains__(self, pair):
        return pair in self.pairs

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(sorted(self.pairs))


def winning_region(automaton: TreeAutomaton, tree: RegularTree) -> WinningRegion:
    require_valid(automaton, tree)
    region = set(iter_pairs(sorted(automaton.states), tree.nodes))
    bound = len(region)
    rounds = 0
    while True:
        nxt = safety_step(automaton, tree, region)
        rounds += 1
        if nxt == region:
            break
        region = nxt
        assert rounds <= bound + 1, "safety iteration exceeded its round bound"
    return WinningRegion(frozenset(region), automaton, tree, rounds)


def accepts(automaton: TreeAutomaton, tree: RegularTree, state=None) -> bool:
    state = automaton.initial if state is None else state
    return (state, tree.root) in winning_region(automaton, tree)


@dataclass(frozen=True)
class AcceptStrategy:
    choice: Mapping  # (state, node) -> transition

    def __getitem__(self, pair) -> Successor:
        return self.choice[pair]

    def relation(self, tree: RegularTree, pair) -> frozenset:
        return minimal_relation(self.choice[pair], tree[pair[1]])


def accept_strategy(region: WinningRegion) -> AcceptStrategy:
    """First transition in canonical order that keeps the play inside the region."""
    choice = {}
    for a, w in sorted(region.pairs):
        for t in region.automaton.transitions(a):
            if _good_move(t, region.tree[w], region.pairs):
                choice[(a, w)] = t
                break
    return AcceptStrategy(choice)


ChoiceFunction = Union[Mapping, Callable[[str, tuple], Successor], None]


def _chooser(automaton: TreeAutomaton, choice: ChoiceFunction) -> Callable[[str], Successor]:
    if choice is None:
        return lambda b: automaton.transitions(b)[0]
    if callable(choice):
        return lambda b: choice(b, automaton.transitions(b))
    return lambda b: choice[b] if b in choice else automaton.transitions(b)[0]


def accepted_tree(automaton: TreeAutomaton, state=None, choice: ChoiceFunction = None) -> RegularTree:
    """A tree accepted from ``state``: fix one transition per state and follow it.

    Node ids are state ids.  The default choice takes the first transition in
    canonical order, which prefers a leaf whenever the state has one.
    """
    state = automaton.initial if state is None else state
    require_valid(automaton)
    pick = _chooser(automaton, choice)
    succ = {}
    todo = [state]
    while todo:
        b = todo.pop()
        if b in succ:
            continue
        t = pick(b)
        if t not in automaton.transitions(b):
            raise InvalidInput([f"choice {t} is not a transition of {b}"])
        succ[b] = t
        todo.extend(c for c in t.children() if c not in succ)
    return RegularTree(state, succ, automaton.alphabet)


# ---------------------------------------------------------------------------
# Single-step adjudication


class IllegalMove(ValueError):
    def __init__(self, rule: str, detail: str = ""):
        self.rule = rule
        super().__init__(f"{rule}: {detail}" if detail else rule)


ONGOING = "ongoing"
VERIFIER_STUCK = "verifier-stuck"
FALSIFIER_STUCK = "falsifier-stuck"


@dataclass(frozen=True)
class BasicPosition:
    state: str
    node: str

    player = "verifier"


@dataclass(frozen=True)
class TransitionPosition:
    transition: Successor
    node: str

    player = "verifier"


@dataclass(frozen=True)
class RelationPosition:
    pairs: frozenset

    player = "falsifier"


@dataclass(frozen=True)
class Step:
    position: object
    outcome: str

    @property
    def winner(self) -> str | None:
        return {VERIFIER_STUCK: "falsifier", FALSIFIER_STUCK: "verifier"}.get(self.outcome)


def step_game(automaton: TreeAutomaton, tree: RegularTree, position, move) -> Step:
    """Advance the acceptance game by one move, enforcing its rules.

    At a basic position the move is a transition, at a transition position a
    relation (set of (state, node) pairs), at a relation position a pair.
    """
    if isinstance(position, BasicPosition):
        if move not in automaton.transitions(position.state):
            raise IllegalMove("transition-not-in-delta", f"{move} is not a transition of {position.state}")
        nxt = TransitionPosition(move, position.node)
        if minimal_relation(move, tree[position.node]) is None:
            return Step(nxt, VERIFIER_STUCK)
        return Step(nxt, ONGOING)
    if isinstance(position, TransitionPosition):
        rel = frozenset(move)
        if not lifted_relation_holds(rel, position.transition, tree[position.node]):
            raise IllegalMove(
                "relation-does-not-lift",
                f"{sorted(rel)} does not relate {position.transition} to {tree[position.node]}",
            )
        for b, v in rel:
            if b not in automaton.states or v not in tree.succ:
                raise IllegalMove("relation-out-of-range", f"({b}, {v}) is not a state/node pair")
        nxt = RelationPosition(rel)
        return Step(nxt, FALSIFIER_STUCK if not rel else ONGOING)
    if isinstance(position, RelationPosition):
        if tuple(move) not in position.pairs:
            raise IllegalMove("pair-not-in-relation", f"{move} not in {sorted(position.pairs)}")
        return Step(BasicPosition(*move), ONGOING)
    raise TypeError(f"unknown position {position!r}")
