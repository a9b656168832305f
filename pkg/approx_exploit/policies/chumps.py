"""
Fixed-rule policies, tabulation, and perturbation of tabular policies into
deliberately exploitable targets.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import ConfigurationError
from ..games import Game, InfoStateKey, infostate_catalog
from .policy import FIXED_RULES, FixedRulePolicy, Policy, TabularPolicy, UniformPolicy

CHUMP_RULES = FIXED_RULES + ("uniform_random",)


def make_chump(rule_id: str, game: Game, player: int | None = None) -> Policy:
    """Build one of the chump policies: always_fold, always_call, first_legal, uniform_random."""
    if rule_id in ("uniform_random", "uniform"):
        return UniformPolicy(game, player)
    if rule_id not in CHUMP_RULES:
        raise ConfigurationError(
            f"Unknown chump rule '{rule_id}'. Must be one of: {', '.join(CHUMP_RULES)}"
        )
    return FixedRulePolicy(game, player, rule_id)


def tabulate(policy: Policy, game: Game, player: int) -> TabularPolicy:
    """Materialize ``policy`` at every infostate of ``player``."""
    table = {
        key: policy.action_probabilities(InfoStateKey(player, key), legal)
        for key, legal in infostate_catalog(game, player).items()
    }
    return TabularPolicy(game, player, table)


def perturb(policy: TabularPolicy, epsilon: float, seed: int) -> TabularPolicy:
    """
    Mix every entry with a random point on the simplex.

    Entries are visited in sorted key order so the result is a function of
    (policy, epsilon, seed) only.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ConfigurationError(f"epsilon must lie in [0, 1], got {epsilon}")
    if not isinstance(policy, TabularPolicy):
        raise ConfigurationError(f"perturb needs a tabular policy, got {policy.kind}")
    rng = np.random.default_rng(seed)
    table = {}
    for key in sorted(policy.table):
        probs = policy.table[key]
        noise = rng.dirichlet(np.ones(len(probs)))
        mixed = (1.0 - epsilon) * probs + epsilon * noise
        table[key] = probs if epsilon == 0.0 else mixed / mixed.sum()
    return TabularPolicy(policy.game, policy.player, table)
