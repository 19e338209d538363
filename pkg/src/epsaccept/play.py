"""Text-mode play of the acceptance and epsilon-acceptance games.

A human takes one side; the other side is played from the solved game.
Moves are entered either as the number of a listed option or as text:

    transition       SYMBOL            or  SYMBOL LEFT RIGHT
    relation         R [STATE NODE ...]          (boolean game)
    distance         d [STATE NODE VALUE ...]    (epsilon game, unlisted pairs are 1)
    Falsifier pick   STATE NODE  /  STATE NODE BUDGET
"""

from __future__ import annotations

from typing import TextIO

from .acceptance import (
    FALSIFIER_STUCK,
    ONGOING,
    VERIFIER_STUCK,
    BasicPosition,
    IllegalMove,
    TransitionPosition,
    accept_strategy,
    minimal_relation,
    step_game,
    winning_region,
)
from .core import AVG, Branch, Leaf, Lifting, RegularTree, TreeAutomaton
from .epsgame import (
    EpsBasicPosition,
    EpsTransitionPosition,
    eps_step_game,
    eps_strategy,
    eps_value_table,
    local_assignment,
    transition_cost,
)
from .fixpoint import FLOAT_EPS


def _parse_transition(words):
    if len(words) == 1:
        return Leaf(words[0])
    if len(words) == 3:
        return Branch(*words)
    raise IllegalMove("malformed-move", "a transition is SYMBOL or SYMBOL LEFT RIGHT")


class _Game:
    """Common driver: subclasses list options, parse text moves and step."""

    def __init__(self, automaton: TreeAutomaton, tree: RegularTree):
        self.automaton = automaton
        self.tree = tree

    def describe(self, position) -> str:
        raise NotImplementedError

    def options(self, position) -> list:
        raise NotImplementedError

    def parse(self, position, text: str):
        raise NotImplementedError

    def step(self, position, move):
        raise NotImplementedError

    def machine_move(self, position):
        raise NotImplementedError

    def stuck(self, position) -> bool:
        """True when the player to move has no legal move at all."""
        return False


class BooleanGame(_Game):
    def __init__(self, automaton, tree):
        super().__init__(automaton, tree)
        self.region = winning_region(automaton, tree)
        self.strategy = accept_strategy(self.region)
        self.start = BasicPosition(automaton.initial, tree.root)

    def describe(self, p):
        if isinstance(p, BasicPosition):
            return f"position ({p.state}, {p.node}) with node {self.tree[p.node]}: Verifier picks a transition"
        if isinstance(p, TransitionPosition):
            return f"Verifier committed to {p.transition} at {p.node} ({self.tree[p.node]}): pick a relation"
        return f"relation {sorted(p.pairs)}: Falsifier picks a pair"

    def options(self, p):
        if isinstance(p, BasicPosition):
            return list(self.automaton.transitions(p.state))
        if isinstance(p, TransitionPosition):
            rel = minimal_relation(p.transition, self.tree[p.node])
            return [] if rel is None else [rel]
        return sorted(p.pairs)

    def parse(self, p, text):
        words = text.split()
        if isinstance(p, BasicPosition):
            return _parse_transition(words)
        if isinstance(p, TransitionPosition):
            if not words or words[0] != "R" or len(words) % 2 != 1:
                raise IllegalMove("malformed-move", "a relation is R followed by STATE NODE pairs")
            rest = words[1:]
            return frozenset(zip(rest[::2], rest[1::2]))
        if len(words) != 2:
            raise IllegalMove("malformed-move", "a pick is STATE NODE")
        return tuple(words)

    def step(self, p, move):
        return step_game(self.automaton, self.tree, p, move)

    def machine_move(self, p):
        if isinstance(p, BasicPosition):
            pair = (p.state, p.node)
            if pair in self.strategy.choice:
                return self.strategy[pair]
            return self.automaton.transitions(p.state)[0]
        if isinstance(p, TransitionPosition):
            return minimal_relation(p.transition, self.tree[p.node])
        losing = [q for q in sorted(p.pairs) if q not in self.region]
        return (losing or sorted(p.pairs))[0]


class EpsGame(_Game):
    def __init__(self, automaton, tree, epsilon: float, lifting: Lifting = AVG, tol=None):
        super().__init__(automaton, tree)
        self.lifting = lifting
        self.table = eps_value_table(automaton, tree, lifting, tol)
        self.strategy = eps_strategy(self.table, automaton, tree)
        self.start = EpsBasicPosition(automaton.initial, tree.root, float(epsilon))

    def describe(self, p):
        if isinstance(p, EpsBasicPosition):
            return (
                f"position ({p.state}, {p.node}, budget {p.budget:.12g}) with node {self.tree[p.node]}: "
                "Verifier picks a transition"
            )
        if isinstance(p, EpsTransitionPosition):
            return f"Verifier committed to {p.transition} at {p.node}, budget {p.budget:.12g}: pick a distance"
        return f"distance {dict(p.local) or '{}'} (1 elsewhere): Falsifier picks a pair and budget"

    def options(self, p):
        if isinstance(p, EpsBasicPosition):
            return list(self.automaton.transitions(p.state))
        if isinstance(p, EpsTransitionPosition):
            local = local_assignment(p.transition, self.tree[p.node], self.table.entries)
            return [local, {}]
        return [(b, v, d) for (b, v), d in p.local] or [(self.automaton.initial, self.tree.root, 1.0)]

    def parse(self, p, text):
        words = text.split()
        if isinstance(p, EpsBasicPosition):
            return _parse_transition(words)
        if isinstance(p, EpsTransitionPosition):
            if not words or words[0] != "d" or len(words) % 3 != 1:
                raise IllegalMove("malformed-move", "a distance is d followed by STATE NODE VALUE triples")
            rest = words[1:]
            try:
                return {(rest[i], rest[i + 1]): float(rest[i + 2]) for i in range(0, len(rest), 3)}
            except ValueError:
                raise IllegalMove("malformed-move", "distance values must be numbers") from None
        if len(words) not in (2, 3):
            raise IllegalMove("malformed-move", "a pick is STATE NODE [BUDGET]")
        b, v = words[:2]
        try:
            budget = float(words[2]) if len(words) == 3 else p.distance(b, v)
        except ValueError:
            raise IllegalMove("malformed-move", "budget must be a number") from None
        return (b, v, budget)

    def step(self, p, move):
        return eps_step_game(self.automaton, self.tree, p, move, self.lifting)

    def stuck(self, p):
        if not isinstance(p, EpsTransitionPosition):
            return False
        # the table-valued assignment is the cheapest one available
        cost = transition_cost(self.lifting, p.transition, self.tree[p.node], self.table.entries)
        return cost > p.budget + FLOAT_EPS

    def machine_move(self, p):
        if isinstance(p, EpsBasicPosition):
            return self.strategy[(p.state, p.node)].transition
        if isinstance(p, EpsTransitionPosition):
            return local_assignment(p.transition, self.tree[p.node], self.table.entries)
        # Falsifier: the pinned pair whose optimal budget overshoots the most
        picks = [(b, v, d) for (b, v), d in p.local]
        if not picks:
            return (self.automaton.initial, self.tree.root, 1.0)
        return max(picks, key=lambda m: (self.table[(m[0], m[1])] - m[2], m))


def play(game: _Game, human: str, stdin: TextIO, stdout: TextIO, max_rounds: int = 50) -> str:
    """Run a play; returns the winner ("verifier" or "falsifier")."""
    position = game.start
    rounds = 0
    while True:
        if isinstance(position, (BasicPosition, EpsBasicPosition)):
            rounds += 1
            if rounds > max_rounds:
                print(f"{max_rounds} rounds played without a stuck player; infinite plays are won by Verifier", file=stdout)
                return "verifier"
        print(game.describe(position), file=stdout)
        if game.stuck(position):
            print("Verifier has no distance within budget: Falsifier wins", file=stdout)
            return "falsifier"
        opts = game.options(position)
        if position.player == human:
            for i, o in enumerate(opts, 1):
                print(f"  [{i}] {_show(o)}", file=stdout)
            line = stdin.readline()
            if not line:
                print("input ended; stopping", file=stdout)
                return "falsifier" if human == "verifier" else "verifier"
            line = line.strip()
            try:
                if line.isdigit():
                    k = int(line)
                    if not 1 <= k <= len(opts):
                        raise IllegalMove("no-such-option", f"choose 1..{len(opts)}")
                    move = opts[k - 1]
                else:
                    move = game.parse(position, line)
                result = game.step(position, move)
            except IllegalMove as exc:
                print(f"illegal move ({exc.rule}): {exc}", file=stdout)
                continue
        else:
            move = game.machine_move(position)
            print(f"  {position.player} plays {_show(move)}", file=stdout)
            result = game.step(position, move)
        position = result.position
        if result.outcome == VERIFIER_STUCK:
            print("Verifier cannot move: Falsifier wins", file=stdout)
            return "falsifier"
        if result.outcome == FALSIFIER_STUCK:
            print("Falsifier cannot move: Verifier wins", file=stdout)
            return "verifier"
        assert result.outcome == ONGOING


def _show(move) -> str:
    if isinstance(move, (Leaf, Branch)):
        return str(move)
    if isinstance(move, frozenset):
        return "R " + " ".join(f"{b} {v}" for b, v in sorted(move)) if move else "R (empty)"
    if isinstance(move, dict):
        if not move:
            return "d (every pair at 1)"
        body = " ".join(f"{b} {v} {x:.12g}" for (b, v), x in sorted(move.items()))
        return f"d {body} (1 elsewhere)"
    if isinstance(move, tuple) and len(move) == 3:
        return f"{move[0]} {move[1]} {move[2]:.12g}"
    return " ".join(map(str, move))
