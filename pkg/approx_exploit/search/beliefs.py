"""
Exact posterior over the histories behind one information state.

Support enumeration replays the searcher's observation sequence from the root
and branches only over hidden chance and opponent choices, so the cost is the
size of the belief set rather than the size of the game.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass

import numpy as np

from ..config import Tolerances
from ..exceptions import ContractViolation
from ..games import CHANCE, PLAYERS, TERMINAL, TOKEN_SEPARATOR, History, InfoStateKey
from ..policies import Policy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BeliefDistribution:
    infostate: InfoStateKey
    support: tuple[History, ...]
    weights: np.ndarray
    # True when the opponent policy gives every consistent history zero
    # probability and the weights are chance-only
    degenerate: bool = False

    def __len__(self) -> int:
        return len(self.support)

    def as_rows(self) -> list[tuple[str, float]]:
        """(history, weight) pairs for the debug dump, most likely first."""
        order = sorted(range(len(self.support)), key=lambda k: (-self.weights[k], k))
        return [(repr(self.support[k]), float(self.weights[k])) for k in order]


def split_key(key: InfoStateKey) -> tuple[str, ...]:
    text = key.observation_string
    return tuple(text.split(TOKEN_SEPARATOR)) if text else ()


def posterior(key: InfoStateKey, pi_opponent: Policy) -> BeliefDistribution:
    """
    Histories where the searcher (``key.player``) is to act with observations
    equal to ``key``, weighted by chance reach times opponent policy reach.

    The searcher's own action probabilities are identical across the support
    under perfect recall and are left out.
    """
    searcher = key.player
    if searcher not in PLAYERS:
        raise ContractViolation(f"posterior needs a seat in {PLAYERS}, got {searcher}")
    game = pi_opponent.game
    opponent = 1 - searcher
    target = split_key(key)
    depth = len(target)

    support: list[History] = []
    policy_weights: list[float] = []
    chance_weights: list[float] = []

    def walk(h: History, w_policy: float, w_chance: float) -> None:
        observed = h.observations(searcher)
        if observed != target[: len(observed)]:
            return
        player = game.current_player(h)
        if player == TERMINAL:
            return
        if player == searcher and len(observed) == depth:
            support.append(h)
            policy_weights.append(w_policy)
            chance_weights.append(w_chance)
            return
        if player == CHANCE:
            for a, p in game.chance_outcomes(h):
                walk(game.apply_unchecked(h, CHANCE, a), w_policy * p, w_chance * p)
        elif player == opponent:
            legal = game.legal_actions(h)
            probs = pi_opponent.action_probabilities(game.infostate_key(h, opponent), legal)
            for a, p in zip(legal, probs):
                walk(game.apply_unchecked(h, opponent, a), w_policy * float(p), w_chance)
        elif len(observed) < depth:
            for a in game.legal_actions(h):
                walk(game.apply_unchecked(h, searcher, a), w_policy, w_chance)

    walk(game.new_initial_state(), 1.0, 1.0)

    if not support:
        raise ContractViolation(
            f"No history of {game.spec.game_id} matches infostate '{key.observation_string}' "
            f"for seat {searcher}"
        )
    weights = np.asarray(policy_weights, dtype=np.float64)
    degenerate = False
    if weights.sum() <= 0.0:
        weights = np.asarray(chance_weights, dtype=np.float64)
        degenerate = True
        logger.warning(
            f"Degenerate posterior at '{key.observation_string}' (seat {searcher}): "
            "falling back to chance-only weights"
        )
    # zero-weight histories are dropped from the support
    keep = np.flatnonzero(weights > 0.0)
    support = [support[k] for k in keep]
    weights = weights[keep] / weights[keep].sum()
    if abs(weights.sum() - 1.0) > Tolerances.BELIEF_SUM:
        raise ContractViolation(f"Posterior at '{key.observation_string}' does not normalize")
    weights.setflags(write=False)
    return BeliefDistribution(key, tuple(support), weights, degenerate)


def sample_history(belief: BeliefDistribution, rng: np.random.Generator) -> History:
    if len(belief.support) == 1:
        return belief.support[0]
    return belief.support[int(rng.choice(len(belief.support), p=belief.weights))]


class BeliefCache:
    """Per-episode posterior cache; readers run concurrently, insertion is exclusive."""

    def __init__(self, pi_opponent: Policy):
        self.pi_opponent = pi_opponent
        self._beliefs: dict[InfoStateKey, BeliefDistribution] = {}
        self._lock = threading.Lock()

    def get(self, key: InfoStateKey) -> BeliefDistribution:
        belief = self._beliefs.get(key)
        if belief is not None:
            return belief
        belief = posterior(key, self.pi_opponent)
        with self._lock:
            return self._beliefs.setdefault(key, belief)

    @property
    def degenerate_count(self) -> int:
        return sum(1 for b in self._beliefs.values() if b.degenerate)

    def __len__(self) -> int:
        return len(self._beliefs)
