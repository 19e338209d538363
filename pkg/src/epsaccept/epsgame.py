"""Optimal budgets for the epsilon-acceptance game.

``E(a, w)`` is the least budget with which Verifier wins from state ``a`` at
node ``w``.  It is the least fixpoint of

    E(a, w) = min over transitions t of a of  cost(t, succ(w); E)

where matching leaves cost 0, matching branches cost
``phi(E(b0, w0), E(b1, w1))`` and every mismatch costs 1 (Verifier can
always answer with the constant-1 distance and keep playing).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .acceptance import IllegalMove, ONGOING, VERIFIER_STUCK, Step
from .core import (
    AVG,
    Branch,
    Leaf,
    Lifting,
    RegularTree,
    Successor,
    TreeAutomaton,
    iter_pairs,
    lifted_distance,
    require_valid,
)
from .fixpoint import DEFAULT_MAX_ITER, FLOAT_EPS, System, ValueTable, Verdict, decide, solve


class EpsValueTable(ValueTable):
    """Optimal-budget table indexed by (state, node)."""


def _cost_option(transition: Successor, succ: Successor, index: Mapping):
    if isinstance(transition, Leaf) and isinstance(succ, Leaf):
        return 0.0 if transition.symbol == succ.symbol else 1.0
    if isinstance(transition, Branch) and isinstance(succ, Branch) and transition.symbol == succ.symbol:
        return (index[(transition.left, succ.left)], index[(transition.right, succ.right)])
    return 1.0


def eps_system(automaton: TreeAutomaton, tree: RegularTree) -> System:
    keys = list(iter_pairs(sorted(automaton.states), tree.nodes))
    index = {k: i for i, k in enumerate(keys)}
    options = [[_cost_option(t, tree[w], index) for t in automaton.transitions(a)] for a, w in keys]
    return System(keys, options)


def eps_value_table(
    automaton: TreeAutomaton,
    tree: RegularTree,
    lifting: Lifting = AVG,
    tol: float | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
    allow_exact: bool = True,
    on_iterate=None,
) -> EpsValueTable:
    require_valid(automaton, tree)
    return solve(
        eps_system(automaton, tree),
        lifting,
        tol,
        max_iter,
        allow_exact=allow_exact,
        on_iterate=on_iterate,
        table_cls=EpsValueTable,
    )


def eps_value(automaton, tree, lifting: Lifting = AVG, tol=None, max_iter=DEFAULT_MAX_ITER) -> float:
    return eps_value_table(automaton, tree, lifting, tol, max_iter)[(automaton.initial, tree.root)]


def eps_accepts(
    automaton: TreeAutomaton,
    tree: RegularTree,
    epsilon: float,
    lifting: Lifting = AVG,
    tol: float | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
) -> Verdict:
    table = eps_value_table(automaton, tree, lifting, tol, max_iter)
    key = (automaton.initial, tree.root)
    return decide(table[key], table.slack(key), table.exact, epsilon)


# ---------------------------------------------------------------------------
# Strategies


@dataclass(frozen=True)
class StrategyEntry:
    transition: Successor
    local: Mapping  # (state, node) -> distance; every other pair gets 1

    def distance(self, b, v) -> float:
        return self.local.get((b, v), 1.0)


@dataclass(frozen=True, eq=False)
class EpsStrategy:
    entries: Mapping  # (state, node) -> StrategyEntry
    lifting: Lifting
    values: Mapping  # the optimal-budget table the strategy was read from

    def __getitem__(self, pair) -> StrategyEntry:
        return self.entries[pair]

    def __contains__(self, pair):
        return pair in self.entries


def local_assignment(transition: Successor, succ: Successor, values: Mapping) -> dict:
    if isinstance(transition, Branch) and isinstance(succ, Branch) and transition.symbol == succ.symbol:
        kids = ((transition.left, succ.left), (transition.right, succ.right))
        return {p: values[p] for p in kids}
    return {}


def transition_cost(lifting: Lifting, transition: Successor, succ: Successor, values: Mapping) -> float:
    local = local_assignment(transition, succ, values)
    return lifted_distance(lifting, lambda b, v: local.get((b, v), 1.0), transition, succ)


def eps_strategy(table: EpsValueTable, automaton: TreeAutomaton, tree: RegularTree) -> EpsStrategy:
    """Argmin transition per pair (first in canonical order on ties) with table-valued distances."""
    if table.lifting is None:
        raise ValueError("table carries no lifting")
    missing = [k for k in iter_pairs(sorted(automaton.states), tree.nodes) if k not in table]
    if missing:
        raise ValueError(f"table was not computed for this automaton and tree (missing {missing[0]})")
    entries = {}
    values = table.entries
    for a, w in table.entries:
        best, best_cost = None, None
        for t in automaton.transitions(a):
            c = transition_cost(table.lifting, t, tree[w], values)
            if best_cost is None or c < best_cost - FLOAT_EPS:
                best, best_cost = t, c
        entries[(a, w)] = StrategyEntry(best, local_assignment(best, tree[w], values))
    return EpsStrategy(entries, table.lifting, dict(values))


def strategy_violations(strategy: EpsStrategy, table: EpsValueTable, tree: RegularTree, tol: float = 1e-6) -> list:
    """Pairs whose chosen move overspends the budget or pins Falsifier to a wrong value."""
    bad = []
    for (a, w), entry in strategy.entries.items():
        spent = lifted_distance(strategy.lifting, entry.distance, entry.transition, tree[w])
        if spent > table[(a, w)] + tol:
            bad.append(((a, w), "overspent", spent, table[(a, w)]))
        for pair, value in entry.local.items():
            if abs(table[pair] - value) > tol:
                bad.append(((a, w), "pinned-value", pair, value))
    return bad


# ---------------------------------------------------------------------------
# Single-step adjudication of the epsilon game


@dataclass(frozen=True)
class EpsBasicPosition:
    state: str
    node: str
    budget: float

    player = "verifier"


@dataclass(frozen=True)
class EpsTransitionPosition:
    transition: Successor
    node: str
    budget: float

    player = "verifier"


@dataclass(frozen=True)
class DistancePosition:
    local: tuple  # sorted ((state, node), value) items; unlisted pairs are at distance 1

    player = "falsifier"

    def distance(self, b, v) -> float:
        return dict(self.local).get((b, v), 1.0)


def eps_step_game(automaton: TreeAutomaton, tree: RegularTree, position, move, lifting: Lifting = AVG) -> Step:
    """Advance the epsilon-acceptance game by one move.

    Verifier moves are a transition, then a distance assignment given as a
    mapping from (state, node) to [0, 1] (unlisted pairs are 1).  Falsifier
    answers with ``(state, node, budget)`` where the budget is at least the
    assigned distance.
    """
    if isinstance(position, EpsBasicPosition):
        if move not in automaton.transitions(position.state):
            raise IllegalMove("transition-not-in-delta", f"{move} is not a transition of {position.state}")
        nxt = EpsTransitionPosition(move, position.node, position.budget)
        floor = lifted_distance(lifting, lambda b, v: 0.0, move, tree[position.node])
        if floor > position.budget + FLOAT_EPS:
            return Step(nxt, VERIFIER_STUCK)
        return Step(nxt, ONGOING)
    if isinstance(position, EpsTransitionPosition):
        local = {tuple(k): float(v) for k, v in dict(move).items()}
        for k, v in local.items():
            if not 0.0 <= v <= 1.0:
                raise IllegalMove("distance-out-of-range", f"d{k} = {v}")
        spent = lifted_distance(lifting, lambda b, v: local.get((b, v), 1.0), position.transition, tree[position.node])
        if spent > position.budget + FLOAT_EPS:
            raise IllegalMove(
                "lifted-distance-exceeds-budget", f"lifted distance {spent:.12g} > budget {position.budget:.12g}"
            )
        return Step(DistancePosition(tuple(sorted(local.items()))), ONGOING)
    if isinstance(position, DistancePosition):
        b, v, budget = move
        if b not in automaton.states or v not in tree.succ:
            raise IllegalMove("pair-out-of-range", f"({b}, {v}) is not a state/node pair")
        if not position.distance(b, v) <= budget <= 1.0:
            raise IllegalMove("budget-below-distance", f"budget {budget} < d({b}, {v}) = {position.distance(b, v)}")
        return Step(EpsBasicPosition(b, v, float(budget)), ONGOING)
    raise TypeError(f"unknown position {position!r}")
