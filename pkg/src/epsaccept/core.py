"""Alphabets, regular trees, tree automata and the lifting kernels.

A regular tree is a finite pointed graph whose nodes carry a successor
shape: either ``Leaf(symbol)`` or ``Branch(symbol, left, right)``.  The
(possibly infinite) labelled binary tree it denotes is its unfolding from
the root; addresses are strings over ``{0, 1}``.

Automata reuse the same successor shapes, with child ids ranging over
states instead of nodes.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Union

import numpy as np


class InvalidInput(ValueError):
    """Raised by solvers when a tree or automaton fails validation."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class AddressUnresolvable(KeyError):
    def __init__(self, address: str, prefix: str):
        self.address = address
        self.prefix = prefix
        super().__init__(f"address {address!r}: node at {prefix!r} is a leaf")

    def __str__(self):
        return self.args[0]


# ---------------------------------------------------------------------------
# Alphabets and successor shapes


@dataclass(frozen=True)
class Alphabet:
    nullary: frozenset = frozenset()
    binary: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "nullary", frozenset(self.nullary))
        object.__setattr__(self, "binary", frozenset(self.binary))

    def union(self, other: "Alphabet") -> "Alphabet":
        return Alphabet(self.nullary | other.nullary, self.binary | other.binary)

    def diagnostics(self) -> list["Diagnostic"]:
        out = []
        for sym in sorted(self.nullary & self.binary):
            out.append(Diagnostic("AlphabetOverlap", sym, "symbol is both nullary and binary"))
        if not self.nullary and not self.binary:
            out.append(Diagnostic("EmptyAlphabet", "", "alphabet has no symbols"))
        return out


@dataclass(frozen=True, order=True)
class Leaf:
    symbol: str

    arity = 0

    def children(self) -> tuple:
        return ()

    def __str__(self):
        return self.symbol


@dataclass(frozen=True, order=True)
class Branch:
    symbol: str
    left: str
    right: str

    arity = 2

    def children(self) -> tuple:
        return (self.left, self.right)

    def __str__(self):
        return f"{self.symbol}({self.left}, {self.right})"


Successor = Union[Leaf, Branch]


def successor_key(s: Successor) -> tuple:
    """Canonical sort key: leaves before branches, then lexicographic."""
    if isinstance(s, Leaf):
        return (0, s.symbol, "", "")
    return (2, s.symbol, s.left, s.right)


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    subject: str
    detail: str = ""

    def __str__(self):
        text = f"{self.kind}({self.subject})"
        return f"{text}: {self.detail}" if self.detail else text


def _symbol_diagnostics(where: str, s: Successor, alphabet: Alphabet) -> list[Diagnostic]:
    if isinstance(s, Leaf):
        if s.symbol in alphabet.nullary:
            return []
        if s.symbol in alphabet.binary:
            return [Diagnostic("ArityMismatch", where, f"binary symbol {s.symbol!r} used as a leaf")]
    elif isinstance(s, Branch):
        if s.symbol in alphabet.binary:
            return []
        if s.symbol in alphabet.nullary:
            return [Diagnostic("ArityMismatch", where, f"nullary symbol {s.symbol!r} used as a branch")]
    else:
        return [Diagnostic("BadSuccessor", where, f"{s!r} is neither Leaf nor Branch")]
    return [Diagnostic("UnknownSymbol", where, f"{s.symbol!r} not in alphabet")]


# ---------------------------------------------------------------------------
# Regular trees


def _reachable(root, succ: Mapping) -> list:
    """Breadth-first order of ids reachable from ``root``; dangling ids are skipped."""
    seen = {root}
    order = []
    queue = deque([root])
    while queue:
        n = queue.popleft()
        if n not in succ:
            continue
        order.append(n)
        for c in succ[n].children():
            if c not in seen:
                seen.add(c)
                queue.append(c)
    return order


@dataclass(frozen=True, eq=False)
class RegularTree:
    """Finite pointed graph denoting a labelled binary tree by unfolding.

    Nodes unreachable from ``root`` are dropped on construction.  Equality
    is identity; compare trees with :func:`epsaccept.bisim.bisimilar`.
    """

    root: str
    succ: Mapping[str, Successor]
    alphabet: Alphabet

    def __post_init__(self):
        succ = dict(self.succ)
        keep = _reachable(self.root, succ)
        object.__setattr__(self, "succ", {n: succ[n] for n in keep})

    @property
    def nodes(self) -> tuple:
        return tuple(sorted(self.succ))

    def __len__(self):
        return len(self.succ)

    def __getitem__(self, node) -> Successor:
        return self.succ[node]

    def label(self, node) -> str:
        return self.succ[node].symbol

    def __repr__(self):
        body = ", ".join(f"{n}: {self.succ[n]}" for n in self.nodes)
        return f"RegularTree(root={self.root!r}, {{{body}}})"


def leaf_tree(symbol: str, alphabet: Alphabet | None = None) -> RegularTree:
    alphabet = alphabet or Alphabet({symbol}, ())
    return RegularTree("n0", {"n0": Leaf(symbol)}, alphabet)


def loop_tree(symbol: str, alphabet: Alphabet | None = None) -> RegularTree:
    """The full infinite binary tree with every node labelled ``symbol``."""
    alphabet = alphabet or Alphabet((), {symbol})
    return RegularTree("n0", {"n0": Branch(symbol, "n0", "n0")}, alphabet)


def validate_tree(tree: RegularTree) -> list[Diagnostic]:
    out = tree.alphabet.diagnostics()
    if tree.root not in tree.succ:
        out.append(Diagnostic("MissingRoot", str(tree.root), "root has no successor entry"))
        return out
    for n in tree.nodes:
        s = tree.succ[n]
        out.extend(_symbol_diagnostics(f"node {n}", s, tree.alphabet))
        for c in getattr(s, "children", lambda: ())():
            if c not in tree.succ:
                out.append(Diagnostic("DanglingChild", str(n), f"child {c!r} is not a node"))
    return out


def canonicalize(tree: RegularTree, prefix: str = "n") -> RegularTree:
    """Rename nodes deterministically in breadth-first, left-first order."""
    order = _reachable(tree.root, tree.succ)
    names = {n: f"{prefix}{i}" for i, n in enumerate(order)}
    succ = {}
    for n in order:
        s = tree.succ[n]
        if isinstance(s, Leaf):
            succ[names[n]] = s
        else:
            succ[names[n]] = Branch(s.symbol, names[s.left], names[s.right])
    return RegularTree(names[tree.root], succ, tree.alphabet)


# ---------------------------------------------------------------------------
# Addresses


def _check_address(address: str):
    if any(ch not in "01" for ch in address):
        raise ValueError(f"address {address!r} is not a binary string")


def resolve(tree: RegularTree, address: str) -> str:
    _check_address(address)
    node = tree.root
    for i, bit in enumerate(address):
        s = tree.succ[node]
        if isinstance(s, Leaf):
            raise AddressUnresolvable(address, address[:i])
        node = s.left if bit == "0" else s.right
    return node


def subtree(tree: RegularTree, address: str) -> RegularTree:
    return RegularTree(resolve(tree, address), tree.succ, tree.alphabet)


def substitute(tree: RegularTree, address: str, other: RegularTree) -> RegularTree:
    """Replace the subtree at one unfolded ``address`` by ``other``.

    Ancestors of the address are path-copied, so graph nodes shared with
    other addresses keep their original successors.
    """
    resolve(tree, address)
    succ: dict = {("t", n): _retag(s, "t") for n, s in tree.succ.items()}
    succ.update({("o", n): _retag(s, "o") for n, s in other.succ.items()})
    target = ("o", other.root)
    # walk back up from the target, copying each ancestor on the path
    path = [tree.root]
    for bit in address:
        s = tree.succ[path[-1]]
        path.append(s.left if bit == "0" else s.right)
    for depth in range(len(address) - 1, -1, -1):
        s = tree.succ[path[depth]]
        copy_id = ("p", address[:depth])
        if address[depth] == "0":
            succ[copy_id] = Branch(s.symbol, target, ("t", s.right))
        else:
            succ[copy_id] = Branch(s.symbol, ("t", s.left), target)
        target = copy_id
    merged = RegularTree(target, succ, tree.alphabet.union(other.alphabet))
    return canonicalize(merged)


def _retag(s: Successor, tag: str) -> Successor:
    if isinstance(s, Leaf):
        return s
    return Branch(s.symbol, (tag, s.left), (tag, s.right))


def unfold(tree: RegularTree, depth: int) -> dict[str, str]:
    """Labels of the unfolding at every address of length at most ``depth``."""
    out = {}
    frontier = [("", tree.root)]
    for _ in range(depth + 1):
        nxt = []
        for addr, n in frontier:
            s = tree.succ[n]
            out[addr] = s.symbol
            if isinstance(s, Branch):
                nxt.append((addr + "0", s.left))
                nxt.append((addr + "1", s.right))
        frontier = nxt
    return out


# ---------------------------------------------------------------------------
# Automata


@dataclass(frozen=True, eq=False)
class TreeAutomaton:
    """Nondeterministic safety tree automaton: every infinite run is accepting."""

    states: frozenset
    initial: str
    delta: Mapping[str, tuple]
    alphabet: Alphabet

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(
            self,
            "delta",
            {a: tuple(sorted(set(ts), key=successor_key)) for a, ts in dict(self.delta).items()},
        )

    def transitions(self, state) -> tuple:
        return self.delta.get(state, ())

    def __repr__(self):
        body = "; ".join(
            f"{a}: {{{', '.join(map(str, self.delta.get(a, ())))}}}" for a in sorted(self.states)
        )
        return f"TreeAutomaton(initial={self.initial!r}, {body})"


def validate_automaton(automaton: TreeAutomaton) -> list[Diagnostic]:
    out = automaton.alphabet.diagnostics()
    states = automaton.states
    if automaton.initial not in states:
        out.append(Diagnostic("UnknownState", str(automaton.initial), "initial state not in states"))
    for a in sorted(set(automaton.delta) - states):
        out.append(Diagnostic("UnknownState", str(a), "transitions given for an undeclared state"))
    for a in sorted(states):
        ts = automaton.delta.get(a, ())
        if not ts:
            out.append(Diagnostic("DeadlockState", str(a), "no transitions"))
        for t in ts:
            out.extend(_symbol_diagnostics(f"state {a}", t, automaton.alphabet))
            for c in getattr(t, "children", lambda: ())():
                if c not in states:
                    out.append(Diagnostic("UnknownState", str(c), f"target of a transition from {a}"))
    return out


def validate(obj) -> list[Diagnostic]:
    """Diagnostics for a tree or automaton; empty iff every invariant holds."""
    if isinstance(obj, RegularTree):
        return validate_tree(obj)
    if isinstance(obj, TreeAutomaton):
        return validate_automaton(obj)
    raise TypeError(f"cannot validate {type(obj).__name__}")


def require_valid(*objs):
    diags = []
    for obj in objs:
        diags.extend(validate(obj))
    if diags:
        raise InvalidInput(diags)


# ---------------------------------------------------------------------------
# Liftings


@dataclass(frozen=True)
class Lifting:
    """A monotone map phi: [0,1] x [0,1] -> [0,1] inducing a distance lifting.

    ``phi`` must accept numpy arrays as well as floats.
    """

    name: str
    phi: Callable = field(compare=False)
    params: tuple = ()

    def __call__(self, x, y):
        return self.phi(x, y)

    @property
    def symmetric(self) -> bool:
        return self.name in ("avg", "max")

    def as_obj(self) -> dict:
        if self.name == "weighted":
            return {"name": "weighted", "params": {"p": self.params[0]}}
        return {"name": self.name, "params": dict(self.params)}

    def __str__(self):
        if self.name == "weighted":
            return f"weighted({self.params[0]:g})"
        return self.name


AVG = Lifting("avg", lambda x, y: 0.5 * x + 0.5 * y)
MAX = Lifting("max", np.maximum)


def weighted(p: float) -> Lifting:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"weight {p} outside [0, 1]")
    q = 1.0 - p
    return Lifting("weighted", lambda x, y: p * x + q * y, (p,))


BUILTIN_LIFTINGS = ("avg", "max", "weighted")


def get_lifting(name: str, params: Mapping | None = None) -> Lifting:
    params = dict(params or {})
    if name == "avg":
        return AVG
    if name == "max":
        return MAX
    if name == "weighted":
        if "p" not in params:
            raise ValueError("weighted lifting needs parameter 'p'")
        return weighted(params["p"])
    raise ValueError(f"unknown lifting {name!r} (expected one of {', '.join(BUILTIN_LIFTINGS)})")


def parse_lifting(text: str) -> Lifting:
    """Parse ``avg``, ``max`` or ``weighted:0.3`` / ``weighted(0.3)``."""
    text = text.strip()
    for sep in (":", "("):
        if sep in text:
            name, arg = text.split(sep, 1)
            return get_lifting(name.strip(), {"p": float(arg.rstrip(")"))})
    return get_lifting(text)


def check_monotone(lifting: Lifting, samples: int = 1000, rng: random.Random | None = None) -> list:
    """Random quadruples (x, y, x', y') with x <= x', y <= y' violating monotonicity or range."""
    rng = rng or random.Random(0)
    bad = []
    for _ in range(samples):
        x, x2 = sorted((rng.random(), rng.random()))
        y, y2 = sorted((rng.random(), rng.random()))
        lo, hi = float(lifting(x, y)), float(lifting(x2, y2))
        if lo > hi + 1e-12 or not (0.0 <= lo <= 1.0 and 0.0 <= hi <= 1.0):
            bad.append((x, y, x2, y2))
    return bad


# ---------------------------------------------------------------------------
# Relation and distance lifting


def lifted_relation_holds(relation, alpha: Successor, beta: Successor) -> bool:
    if isinstance(alpha, Leaf) and isinstance(beta, Leaf):
        return alpha.symbol == beta.symbol
    if isinstance(alpha, Branch) and isinstance(beta, Branch):
        return (
            alpha.symbol == beta.symbol
            and (alpha.left, beta.left) in relation
            and (alpha.right, beta.right) in relation
        )
    return False


Distance = Union[Mapping, Callable[[Hashable, Hashable], float]]


def _as_callable(d: Distance):
    if callable(d):
        return d
    return lambda x, y: d[(x, y)]


def lifted_distance(lifting: Lifting, d: Distance, alpha: Successor, beta: Successor) -> float:
    if isinstance(alpha, Leaf) and isinstance(beta, Leaf):
        return 0.0 if alpha.symbol == beta.symbol else 1.0
    if isinstance(alpha, Branch) and isinstance(beta, Branch) and alpha.symbol == beta.symbol:
        dist = _as_callable(d)
        return float(lifting(dist(alpha.left, beta.left), dist(alpha.right, beta.right)))
    return 1.0


def iter_pairs(xs: Iterable, ys: Iterable) -> Iterator[tuple]:
    ys = list(ys)
    for x in xs:
        for y in ys:
            yield (x, y)
