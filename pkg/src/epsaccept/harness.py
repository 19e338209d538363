"""Randomized check that epsilon-acceptance coincides with acceptance plus distance.

Each trial draws an instance and checks both directions:

* the witness built from the optimal budget E is accepted and lies within
  E (+ tol) of the input tree;
* every sampled accepted tree T' satisfies E <= bd(T', tree) + tol.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from .acceptance import accepted_tree
from .bisim import bd
from .core import AVG, MAX, canonicalize, weighted
from .epsgame import eps_value_table
from .formats import InstanceBundle
from .generate import GeneratorConfig, generate_instance, random_choice
from .witness import build_witness, verify_witness

DEFAULT_LIFTINGS = (AVG, MAX, weighted(0.3))


@dataclass(frozen=True)
class TrialFailure:
    trial: int
    direction: str  # "witness" or "accepted-tree"
    detail: str
    bundle: InstanceBundle = field(repr=False)


@dataclass
class TheoremReport:
    trials: int = 0
    checked_accepted_trees: int = 0
    failures: list = field(default_factory=list)
    values: list = field(default_factory=list)  # (trial, lifting name, E) per trial

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return (
            f"{status}: {self.trials} trials, {self.checked_accepted_trees} accepted trees compared, "
            f"{len(self.failures)} failures"
        )


def trial_seed(seed: int, trial: int) -> int:
    return random.Random(f"{seed}/{trial}").getrandbits(48)


def check_instance(
    bundle: InstanceBundle, trial: int = 0, samples: int = 3, tol: float = 1e-6, solver_tol: float | None = None
):
    """Run both directions on one bundle; returns (E, failures, number of accepted trees checked)."""
    automaton, tree = bundle.automaton, bundle.tree
    lifting = bundle.lifting or AVG
    failures = []
    table = eps_value_table(automaton, tree, lifting, solver_tol)
    value = table[(automaton.initial, tree.root)]

    built = build_witness(automaton, tree, lifting, solver_tol, table=table)
    report = verify_witness(automaton, tree, canonicalize(built.tree), value + tol, lifting, solver_tol)
    if not report.passed:
        failures.append(TrialFailure(trial, "witness", f"E={value:.12g}: {report}", bundle))

    rng = random.Random(bundle.seed)
    choices = [None] + [random_choice(automaton, rng) for _ in range(samples)]
    for choice in choices:
        other = accepted_tree(automaton, automaton.initial, choice)
        dist = bd(other, tree, lifting, solver_tol)
        if value > dist + tol:
            failures.append(
                TrialFailure(trial, "accepted-tree", f"E={value:.12g} > bd={dist:.12g} for choice {choice}", bundle)
            )
    return value, failures, len(choices)


def check_theorem(
    config: GeneratorConfig | None = None,
    trials: int = 100,
    liftings=DEFAULT_LIFTINGS,
    samples: int = 3,
    tol: float = 1e-6,
    solver_tol: float | None = None,
) -> TheoremReport:
    config = config or GeneratorConfig()
    report = TheoremReport()
    for i in range(trials):
        lifting = config.lifting or liftings[i % len(liftings)]
        sub = replace(config, seed=trial_seed(config.seed, i), lifting=lifting)
        bundle = generate_instance(sub)
        value, failures, checked = check_instance(bundle, i, samples, tol, solver_tol)
        report.trials += 1
        report.checked_accepted_trees += checked
        report.failures.extend(failures)
        report.values.append((i, str(lifting), value))
    return report
