"""Acceptance, bisimulation distance and epsilon-acceptance for regular binary trees."""

from .acceptance import accepted_tree, accepts, winning_region
from .bisim import bd, bd_wins, bisimilar, distance_table
from .core import (
    AVG,
    MAX,
    Alphabet,
    Branch,
    InvalidInput,
    Leaf,
    Lifting,
    RegularTree,
    TreeAutomaton,
    canonicalize,
    substitute,
    subtree,
    unfold,
    validate,
    weighted,
)
from .epsgame import eps_accepts, eps_value, eps_value_table
from .fixpoint import NoConvergence, Verdict
from .measures import error_mass, leaf_mass
from .witness import build_witness, verify_witness, witness_tree

__version__ = "0.1.0"

__all__ = [
    "AVG",
    "MAX",
    "Alphabet",
    "Branch",
    "InvalidInput",
    "Leaf",
    "Lifting",
    "NoConvergence",
    "RegularTree",
    "TreeAutomaton",
    "Verdict",
    "accepted_tree",
    "accepts",
    "bd",
    "bd_wins",
    "bisimilar",
    "build_witness",
    "canonicalize",
    "distance_table",
    "eps_accepts",
    "eps_value",
    "eps_value_table",
    "error_mass",
    "leaf_mass",
    "substitute",
    "subtree",
    "unfold",
    "validate",
    "verify_witness",
    "weighted",
    "winning_region",
    "witness_tree",
]
