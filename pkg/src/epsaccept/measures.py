"""Dyadic tree measures: leaf mass and error mass on regular trees.

Both are least nonnegative solutions of a recurrence that fixes the value at
designated nodes and averages the two children everywhere else.  Nodes that
cannot reach a positive fixed node get 0 first; what remains is a
nonsingular linear system, solved exactly over the rationals for small
trees and by iteration otherwise.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .core import InvalidInput, Leaf, RegularTree, require_valid
from .fixpoint import DEFAULT_MAX_ITER, NoConvergence, default_tol

EXACT_LIMIT = 500
EXACT, ITERATION = "exact-linear", "iteration"


def relative_measure(w: str, v: str) -> Fraction:
    """Mass of the subtree at ``v`` relative to the one at ``w``."""
    if v.startswith(w):
        return Fraction(1, 2 ** (len(v) - len(w)))
    return Fraction(0)


@dataclass(frozen=True, eq=False)
class MassTable:
    entries: Mapping  # node -> Fraction (exact) or float (iteration)
    method: str
    residual: float
    iterations: int = 0

    def __getitem__(self, node):
        return self.entries[node]

    def __len__(self):
        return len(self.entries)


def _solve_sparse(rows: list[dict], rhs: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination on sparse rational rows."""
    n = len(rows)
    rows = [dict(r) for r in rows]
    rhs = list(rhs)
    by_col = defaultdict(set)
    for i, r in enumerate(rows):
        for c in r:
            by_col[c].add(i)
    pivot_row = {}
    for col in range(n):
        candidates = [i for i in by_col[col] if i not in pivot_row.values() and rows[i].get(col)]
        if not candidates:
            raise ArithmeticError("singular system")
        p = min(candidates, key=lambda i: (len(rows[i]), i))
        pivot_row[col] = p
        piv = rows[p][col]
        if piv != 1:
            rows[p] = {c: v / piv for c, v in rows[p].items()}
            rhs[p] /= piv
        for i in list(by_col[col]):
            if i == p:
                continue
            f = rows[i].get(col)
            if not f:
                continue
            for c, v in rows[p].items():
                nv = rows[i].get(c, 0) - f * v
                if nv:
                    rows[i][c] = nv
                    by_col[c].add(i)
                else:
                    rows[i].pop(c, None)
                    by_col[c].discard(i)
            rhs[i] -= f * rhs[p]
    return [rhs[pivot_row[c]] for c in range(n)]


def defect_mass(
    tree: RegularTree,
    base: Mapping,
    method: str | None = None,
    tol: float | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
) -> MassTable:
    """Least solution of m = base at fixed nodes, m = (m0 + m1) / 2 elsewhere.

    ``base`` maps every node to a value in [0, 1] or to None (recurse).
    """
    require_valid(tree)
    diags = []
    for n in tree.nodes:
        if n not in base:
            diags.append(f"base has no entry for node {n}")
        elif base[n] is None and isinstance(tree[n], Leaf):
            diags.append(f"leaf {n} cannot recurse")
        elif base[n] is not None and not 0 <= base[n] <= 1:
            diags.append(f"base value {base[n]} at {n} outside [0, 1]")
    if diags:
        raise InvalidInput(diags)
    method = method or (EXACT if len(tree) <= EXACT_LIMIT else ITERATION)
    if method not in (EXACT, ITERATION):
        raise ValueError(f"unknown method {method!r}")

    recurse = [n for n in tree.nodes if base[n] is None]
    parents = defaultdict(list)
    for n in recurse:
        for c in tree[n].children():
            parents[c].append(n)
    live = set()
    queue = deque(n for n in tree.nodes if base[n] is not None and base[n] > 0)
    while queue:
        c = queue.popleft()
        for p in parents[c]:
            if p not in live:
                live.add(p)
                queue.append(p)
    unknowns = [n for n in recurse if n in live]

    if method == EXACT:
        values = {n: Fraction(base[n]) for n in tree.nodes if base[n] is not None}
        values.update({n: Fraction(0) for n in recurse if n not in live})
        col = {n: i for i, n in enumerate(unknowns)}
        rows, rhs = [], []
        for n in unknowns:
            row = {col[n]: Fraction(1)}
            b = Fraction(0)
            for c in tree[n].children():
                if c in col:
                    row[col[c]] = row.get(col[c], 0) - Fraction(1, 2)
                else:
                    b += values[c] / 2
            row = {k: v for k, v in row.items() if v}
            rows.append(row)
            rhs.append(b)
        for n, v in zip(unknowns, _solve_sparse(rows, rhs)):
            values[n] = v
        entries = {n: values[n] for n in tree.nodes}
        return MassTable(entries, EXACT, residual(tree, base, entries))

    tol = default_tol() if tol is None else tol
    x = {n: float(base[n]) if base[n] is not None else 0.0 for n in tree.nodes}
    it = 0
    change = float("inf")
    while it < max_iter:
        new = dict(x)
        for n in unknowns:
            left, right = tree[n].children()
            new[n] = 0.5 * x[left] + 0.5 * x[right]
        it += 1
        change = max((new[n] - x[n] for n in unknowns), default=0.0)
        x = new
        if change < tol:
            break
    table = MassTable(x, ITERATION, residual(tree, base, x), it)
    if change >= tol:
        raise NoConvergence(table)
    return table


def residual(tree: RegularTree, base: Mapping, entries: Mapping) -> float:
    """Largest pointwise violation of the defining recurrence."""
    worst = 0.0
    for n in tree.nodes:
        if base[n] is not None:
            target = base[n]
        else:
            left, right = tree[n].children()
            target = (entries[left] + entries[right]) / 2
        worst = max(worst, abs(float(entries[n]) - float(target)))
    return worst


def leaf_mass(tree: RegularTree, method: str | None = None, tol: float | None = None) -> MassTable:
    base = {n: (1 if isinstance(tree[n], Leaf) else None) for n in tree.nodes}
    return defect_mass(tree, base, method, tol)


def error_mass(
    tree: RegularTree, error_symbols: Iterable[str] = ("err",), method: str | None = None, tol: float | None = None
) -> MassTable:
    errors = frozenset(error_symbols)
    stray = sorted(errors - tree.alphabet.binary)
    if stray:
        raise InvalidInput([f"error symbol {s!r} is not a binary symbol" for s in stray])
    base = {}
    for n in tree.nodes:
        s = tree[n]
        if isinstance(s, Leaf):
            base[n] = 0
        elif s.symbol in errors:
            base[n] = 1
        else:
            base[n] = None
    return defect_mass(tree, base, method, tol)
