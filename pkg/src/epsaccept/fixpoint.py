"""Least-fixpoint engine for min-of-lifted-cost systems over finite positions.

Every position carries a nonempty list of options.  An option is either a
constant in [0, 1] or a pair of positions ``(i, j)`` whose value is
``phi(x[i], x[j])``.  The value of a position is the minimum over its
options.  Bisimulation distance has one option per position; the
epsilon-acceptance value has one per automaton transition.

Solved by topological back-substitution when the dependency graph is
acyclic, by synchronous Kleene iteration from the all-zero vector otherwise.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Callable, Hashable, Mapping, Sequence, Union

import numpy as np

from .core import Lifting

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 1_000_000
# slack on float comparisons between an exactly computed value and a threshold
FLOAT_EPS = 1e-12

Option = Union[float, tuple]


def default_tol() -> float:
    raw = os.environ.get("EPSACCEPT_TOL")
    return float(raw) if raw else DEFAULT_TOL


class NoConvergence(RuntimeError):
    def __init__(self, table: "ValueTable"):
        self.table = table
        super().__init__(
            f"no convergence after {table.iterations} iterations (residual {table.residual:.3g})"
        )


class NumericalError(ArithmeticError):
    """A Kleene iterate decreased or left [0, 1]; the lifting is not monotone."""


@dataclass(frozen=True, eq=False)
class ValueTable:
    entries: Mapping[Hashable, float]
    iterations: int
    residual: float
    exact: bool
    lifting: Lifting | None = None
    residuals: tuple = field(default=(), repr=False)

    def __getitem__(self, key) -> float:
        return self.entries[key]

    def __contains__(self, key):
        return key in self.entries

    def __len__(self):
        return len(self.entries)

    def slack(self, key=None) -> float:
        """Estimated gap between a computed entry and the true fixpoint value.

        Zero for exact tables.  Otherwise the geometric tail
        ``r * rho / (1 - rho)`` from the last two residuals, or the full
        remaining range when the iteration shows no contraction.
        """
        if self.exact:
            return 0.0
        ceiling = 1.0 - self.entries[key] if key is not None else 1.0
        if len(self.residuals) < 2 or self.residuals[-2] <= 0.0:
            return ceiling
        rho = self.residuals[-1] / self.residuals[-2]
        if rho >= 1.0:
            return ceiling
        return min(ceiling, self.residual * rho / (1.0 - rho))


@dataclass
class System:
    keys: list
    options: list  # options[i] is a list of Option for keys[i]

    def __post_init__(self):
        self.index = {k: i for i, k in enumerate(self.keys)}
        for i, opts in enumerate(self.options):
            if not opts:
                raise ValueError(f"position {self.keys[i]!r} has no options")


def _vectorized(phi: Callable) -> Callable:
    probe = np.array([0.0, 1.0])
    try:
        out = np.asarray(phi(probe, probe[::-1]), dtype=float)
        if out.shape == probe.shape:
            return phi
    except Exception:
        pass
    return np.vectorize(phi, otypes=[float])


def _topological(system: System) -> list | None:
    graph = {}
    for i, opts in enumerate(system.options):
        deps = set()
        for o in opts:
            if isinstance(o, tuple):
                deps.update(o)
        graph[i] = deps
    try:
        return list(TopologicalSorter(graph).static_order())
    except CycleError:
        return None


def _exact(system: System, order: list, phi: Callable) -> list:
    values = [0.0] * len(system.keys)
    for i in order:
        best = 1.0
        for o in system.options[i]:
            v = o if not isinstance(o, tuple) else float(phi(values[o[0]], values[o[1]]))
            best = min(best, v)
        values[i] = best
    return values


def solve(
    system: System,
    lifting: Lifting,
    tol: float | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
    allow_exact: bool = True,
    on_iterate: Callable[[np.ndarray], None] | None = None,
    table_cls=ValueTable,
) -> ValueTable:
    """Least fixpoint of ``x = min_options(...)`` starting from zero."""
    tol = default_tol() if tol is None else tol
    if tol <= 0 or max_iter < 1:
        raise ValueError("tol must be positive and max_iter at least 1")
    n = len(system.keys)
    if allow_exact:
        order = _topological(system)
        if order is not None:
            values = _exact(system, order, lifting.phi)
            _check_range(values, system)
            return table_cls(dict(zip(system.keys, values)), len(order), 0.0, True, lifting, (0.0,))

    phi = _vectorized(lifting.phi)
    pos, const, left, right, is_const = [], [], [], [], []
    for i, opts in enumerate(system.options):
        for o in opts:
            pos.append(i)
            if isinstance(o, tuple):
                const.append(0.0)
                left.append(o[0])
                right.append(o[1])
                is_const.append(False)
            else:
                const.append(float(o))
                left.append(0)
                right.append(0)
                is_const.append(True)
    # options are emitted position by position, so pos is already sorted
    pos = np.asarray(pos, dtype=np.intp)
    starts = np.flatnonzero(np.r_[True, pos[1:] != pos[:-1]]) if n else np.array([], dtype=np.intp)
    const = np.asarray(const)
    left = np.asarray(left, dtype=np.intp)
    right = np.asarray(right, dtype=np.intp)
    is_const = np.asarray(is_const, dtype=bool)

    x = np.zeros(n)
    residuals = []
    iterations = 0
    residual = math.inf
    if n == 0:
        return table_cls({}, 0, 0.0, True, lifting, (0.0,))
    while iterations < max_iter:
        vals = np.where(is_const, const, phi(x[left], x[right]))
        new = np.minimum.reduceat(vals, starts)
        iterations += 1
        diff = new - x
        if diff.min() < -FLOAT_EPS:
            i = int(diff.argmin())
            raise NumericalError(f"iterate decreased at {system.keys[i]!r} by {-diff[i]:.3g}")
        if new.min() < -FLOAT_EPS or new.max() > 1.0 + FLOAT_EPS:
            raise NumericalError("iterate left [0, 1]")
        residual = float(diff.max())
        residuals.append(residual)
        x = new
        if on_iterate is not None:
            on_iterate(x)
        if residual < tol:
            break
    table = table_cls(
        dict(zip(system.keys, x.tolist())),
        iterations,
        residual,
        residual == 0.0,
        lifting,
        tuple(residuals[-2:]),
    )
    if residual >= tol:
        raise NoConvergence(table)
    return table


def _check_range(values: Sequence[float], system: System):
    for k, v in zip(system.keys, values):
        if not (-FLOAT_EPS <= v <= 1.0 + FLOAT_EPS):
            raise NumericalError(f"value {v} at {k!r} outside [0, 1]")


WIN, LOSE, INCONCLUSIVE = "win", "lose", "inconclusive"


@dataclass(frozen=True)
class Verdict:
    outcome: str
    value: float
    lower: float
    upper: float
    epsilon: float

    def __bool__(self):
        return self.outcome == WIN

    def __str__(self):
        if self.outcome == INCONCLUSIVE:
            return f"{self.outcome} [{self.lower:.12g}, {self.upper:.12g}] vs epsilon {self.epsilon:.12g}"
        return f"{self.outcome} (value {self.value:.12g}, epsilon {self.epsilon:.12g})"


def decide(value: float, slack: float, exact: bool, epsilon: float) -> Verdict:
    """Three-valued comparison of an under-approximated least fixpoint with epsilon.

    Computed values never exceed the true value, so ``value > epsilon`` is a
    sound loss.  A win needs exactness, the budget 1 (always winning), or
    room for the estimated slack.
    """
    upper = 0.0 if exact else min(1.0, value + slack)
    upper = max(value, upper)
    if epsilon >= 1.0:
        return Verdict(WIN, value, value, upper, epsilon)
    if value > epsilon + FLOAT_EPS:
        return Verdict(LOSE, value, value, upper, epsilon)
    if exact or upper <= epsilon + FLOAT_EPS:
        return Verdict(WIN, value, value, upper, epsilon)
    return Verdict(INCONCLUSIVE, value, value, upper, epsilon)
