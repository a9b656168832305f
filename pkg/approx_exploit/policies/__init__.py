"""
Policy Layer Package
"""

from .chumps import CHUMP_RULES, make_chump, perturb, tabulate
from .policy import (
    FIXED_RULES,
    FixedRulePolicy,
    Policy,
    TabularPolicy,
    UniformPolicy,
    action_probabilities,
    uniform,
)
from .policy_io import load, policy_digest, save, serialize

__all__ = [
    "CHUMP_RULES",
    "FIXED_RULES",
    "FixedRulePolicy",
    "Policy",
    "TabularPolicy",
    "UniformPolicy",
    "action_probabilities",
    "load",
    "make_chump",
    "perturb",
    "policy_digest",
    "save",
    "serialize",
    "tabulate",
    "uniform",
]
