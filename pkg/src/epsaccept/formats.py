"""JSON documents for alphabets, trees, automata, liftings and instance bundles.

    {
      "alphabet":  {"nullary": ["*"], "binary": ["ok", "err"]},
      "tree":      {"root": "r", "nodes": [{"id": "r", "symbol": "ok", "left": "a", "right": "a"},
                                           {"id": "a", "leaf": "*"}]},
      "automaton": {"initial": "q", "delta": {"q": ["*", ["ok", "q", "q"]]}},
      "lifting":   {"name": "avg", "params": {}},
      "epsilon":   0.5,
      "seed":      7
    }

Every key is optional except ``alphabet`` whenever a tree or automaton is given.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Any

from .core import (
    Alphabet,
    Branch,
    Leaf,
    Lifting,
    RegularTree,
    TreeAutomaton,
    get_lifting,
    validate,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(field)
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class SchemaError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        kinds = sorted({d.kind for d in self.diagnostics})
        self.invariant = kinds[0] if len(kinds) == 1 else ", ".join(kinds)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True, eq=False)
class InstanceBundle:
    alphabet: Alphabet | None = None
    tree: RegularTree | None = None
    automaton: TreeAutomaton | None = None
    lifting: Lifting | None = None
    epsilon: float | None = None
    seed: int | None = None

    def with_(self, **changes) -> "InstanceBundle":
        return replace(self, **changes)


def _expect(value, kind, field):
    if not isinstance(value, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise ParseError(f"expected {names}, got {type(value).__name__}", field=field)
    return value


def _symbols(value, field) -> list:
    _expect(value, list, field)
    for i, s in enumerate(value):
        _expect(s, str, f"{field}[{i}]")
    return value


def alphabet_from_obj(obj, field="alphabet") -> Alphabet:
    _expect(obj, dict, field)
    return Alphabet(
        _symbols(obj.get("nullary", []), f"{field}.nullary"),
        _symbols(obj.get("binary", []), f"{field}.binary"),
    )


def tree_from_obj(obj, alphabet: Alphabet, field="tree") -> RegularTree:
    _expect(obj, dict, field)
    if "root" not in obj:
        raise ParseError("missing key 'root'", field=field)
    root = _expect(obj["root"], str, f"{field}.root")
    nodes = _expect(obj.get("nodes"), list, f"{field}.nodes")
    succ = {}
    for i, node in enumerate(nodes):
        where = f"{field}.nodes[{i}]"
        _expect(node, dict, where)
        nid = _expect(node.get("id"), str, f"{where}.id")
        if nid in succ:
            raise ParseError(f"duplicate node id {nid!r}", field=f"{where}.id")
        if "leaf" in node:
            succ[nid] = Leaf(_expect(node["leaf"], str, f"{where}.leaf"))
        else:
            for key in ("symbol", "left", "right"):
                if key not in node:
                    raise ParseError(f"missing key {key!r} (or 'leaf')", field=where)
                _expect(node[key], str, f"{where}.{key}")
            succ[nid] = Branch(node["symbol"], node["left"], node["right"])
    return RegularTree(root, succ, alphabet)


def automaton_from_obj(obj, alphabet: Alphabet, field="automaton") -> TreeAutomaton:
    _expect(obj, dict, field)
    initial = _expect(obj.get("initial"), str, f"{field}.initial")
    delta_obj = _expect(obj.get("delta"), dict, f"{field}.delta")
    delta = {}
    for state, ts in delta_obj.items():
        _expect(ts, list, f"{field}.delta.{state}")
        out = []
        for i, t in enumerate(ts):
            where = f"{field}.delta.{state}[{i}]"
            if isinstance(t, str):
                out.append(Leaf(t))
            elif isinstance(t, list) and len(t) == 3 and all(isinstance(x, str) for x in t):
                out.append(Branch(*t))
            else:
                raise ParseError("transition must be a symbol or [symbol, left, right]", field=where)
        delta[state] = out
    states = set(delta) | {initial}
    return TreeAutomaton(states, initial, delta, alphabet)


def lifting_from_obj(obj, field="lifting") -> Lifting:
    if isinstance(obj, str):
        obj = {"name": obj}
    _expect(obj, dict, field)
    name = _expect(obj.get("name"), str, f"{field}.name")
    params = _expect(obj.get("params", {}), dict, f"{field}.params")
    try:
        return get_lifting(name, params)
    except ValueError as exc:
        raise ParseError(str(exc), field=field) from None


def bundle_from_obj(obj: Any, check: bool = True) -> InstanceBundle:
    _expect(obj, dict, "<document>")
    alphabet = None
    if "alphabet" in obj:
        alphabet = alphabet_from_obj(obj["alphabet"])
    elif "tree" in obj or "automaton" in obj:
        raise ParseError("missing key 'alphabet'", field="<document>")
    tree = tree_from_obj(obj["tree"], alphabet) if "tree" in obj else None
    automaton = automaton_from_obj(obj["automaton"], alphabet) if "automaton" in obj else None
    lifting = lifting_from_obj(obj["lifting"]) if "lifting" in obj else None
    epsilon = None
    if obj.get("epsilon") is not None:
        epsilon = float(_expect(obj["epsilon"], (int, float), "epsilon"))
        if not 0.0 <= epsilon <= 1.0:
            raise ParseError("epsilon must lie in [0, 1]", field="epsilon")
    seed = obj.get("seed")
    if seed is not None:
        _expect(seed, int, "seed")
    bundle = InstanceBundle(alphabet, tree, automaton, lifting, epsilon, seed)
    if check:
        diags = []
        for part in (tree, automaton):
            if part is not None:
                diags.extend(validate(part))
        if alphabet is not None and tree is None and automaton is None:
            diags.extend(alphabet.diagnostics())
        if diags:
            raise SchemaError(dict.fromkeys(diags))
    return bundle


def parse(text: str, check: bool = True) -> InstanceBundle:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    return bundle_from_obj(obj, check)


def load(path, check: bool = True) -> InstanceBundle:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), check)


# ---------------------------------------------------------------------------


def alphabet_to_obj(alphabet: Alphabet) -> dict:
    return {"nullary": sorted(alphabet.nullary), "binary": sorted(alphabet.binary)}


def tree_to_obj(tree: RegularTree) -> dict:
    nodes = []
    for n in tree.nodes:
        s = tree[n]
        if isinstance(s, Leaf):
            nodes.append({"id": n, "leaf": s.symbol})
        else:
            nodes.append({"id": n, "symbol": s.symbol, "left": s.left, "right": s.right})
    return {"root": tree.root, "nodes": nodes}


def automaton_to_obj(automaton: TreeAutomaton) -> dict:
    delta = {}
    for a in sorted(automaton.states):
        delta[a] = [t.symbol if isinstance(t, Leaf) else [t.symbol, t.left, t.right] for t in automaton.transitions(a)]
    return {"initial": automaton.initial, "delta": delta}


def bundle_to_obj(bundle: InstanceBundle) -> dict:
    obj = {}
    alphabet = bundle.alphabet
    if alphabet is None:
        parts = [p.alphabet for p in (bundle.tree, bundle.automaton) if p is not None]
        if parts:
            alphabet = parts[0]
            for extra in parts[1:]:
                alphabet = alphabet.union(extra)
    if alphabet is not None:
        obj["alphabet"] = alphabet_to_obj(alphabet)
    if bundle.tree is not None:
        obj["tree"] = tree_to_obj(bundle.tree)
    if bundle.automaton is not None:
        obj["automaton"] = automaton_to_obj(bundle.automaton)
    if bundle.lifting is not None:
        obj["lifting"] = bundle.lifting.as_obj()
    if bundle.epsilon is not None:
        obj["epsilon"] = bundle.epsilon
    if bundle.seed is not None:
        obj["seed"] = bundle.seed
    return obj


def emit(bundle: InstanceBundle) -> str:
    return json.dumps(bundle_to_obj(bundle), indent=2) + "\n"


def emit_tree(tree: RegularTree) -> str:
    return emit(InstanceBundle(alphabet=tree.alphabet, tree=tree))
