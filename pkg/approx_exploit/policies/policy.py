"""
Policy representations.

A policy belongs to one seat and maps that seat's information-state keys to
distributions over legal actions. Policies are immutable after construction;
the only mutable part of a tabular policy is its miss counter, which is
surfaced in reports instead of silently defaulting.
"""

from __future__ import annotations

import logging
import threading
from abc import ABC, abstractmethod
from collections.abc import Mapping, Sequence

import numpy as np

from ..config import Tolerances
from ..exceptions import ConfigurationError, ContractViolation
from ..games import Game, InfoStateKey

logger = logging.getLogger(__name__)

FIXED_RULES = ("always_fold", "always_call", "first_legal")
POKER_ONLY_RULES = ("always_fold", "always_call")


def uniform(legal: Sequence[int]) -> np.ndarray:
    if not legal:
        raise ContractViolation("action_probabilities requires a non-empty legal action list")
    return np.full(len(legal), 1.0 / len(legal))


class Policy(ABC):
    """A (possibly stochastic) policy for one seat of one game."""

    kind: str = ""

    def __init__(self, game: Game, player: int | None):
        self.game = game
        self.player = player

    @abstractmethod
    def action_probabilities(self, key: InfoStateKey, legal: Sequence[int]) -> np.ndarray:
        """Distribution over exactly ``legal`` (same order) at ``key``."""

    @property
    def misses(self) -> int:
        return 0

    def describe(self) -> str:
        return self.kind

    def __repr__(self) -> str:
        return f"<{type(self).__name__}(game={self.game.spec.game_id}, player={self.player})>"


class UniformPolicy(Policy):
    """Uniform over legal actions at every infostate (the UniformRandom agent)."""

    kind = "uniform"

    def action_probabilities(self, key: InfoStateKey, legal: Sequence[int]) -> np.ndarray:
        return uniform(legal)

    def describe(self) -> str:
        return "uniform_random"


class FixedRulePolicy(Policy):
    """
    Deterministic chump policies.

    ``always_fold`` folds when fold is legal, otherwise calls/checks;
    ``always_call`` always calls/checks; ``first_legal`` plays the lowest action id.
    """

    kind = "fixed_rule"

    def __init__(self, game: Game, player: int | None, rule_id: str):
        if rule_id not in FIXED_RULES:
            raise ConfigurationError(
                f"Unknown rule '{rule_id}'. Must be one of: {', '.join(FIXED_RULES)}"
            )
        if rule_id in POKER_ONLY_RULES and not game.spec.poker_like:
            raise ConfigurationError(
                f"Rule '{rule_id}' needs a poker-like game, not {game.spec.game_id}"
            )
        super().__init__(game, player)
        self.rule_id = rule_id

    def _choose(self, key: InfoStateKey, legal: Sequence[int]) -> int:
        if self.rule_id == "first_legal":
            return min(legal)
        fold, call = self.game.fold_call_actions(key, list(legal))
        if self.rule_id == "always_fold" and fold is not None:
            return fold
        return call

    def action_probabilities(self, key: InfoStateKey, legal: Sequence[int]) -> np.ndarray:
        if not legal:
            raise ContractViolation("action_probabilities requires a non-empty legal action list")
        probs = np.zeros(len(legal))
        probs[list(legal).index(self._choose(key, legal))] = 1.0
        return probs

    def describe(self) -> str:
        return self.rule_id


class TabularPolicy(Policy):
    """
    Explicit table ``observation_string -> probability vector``.

    A lookup miss falls back to uniform and increments :attr:`misses`.
    """

    kind = "tabular"

    def __init__(self, game: Game, player: int | None, table: Mapping[str, Sequence[float]]):
        super().__init__(game, player)
        validated = {}
        for key, probs in table.items():
            arr = np.asarray(probs, dtype=np.float64)
            validate_distribution(arr, key)
            arr.setflags(write=False)
            validated[key] = arr
        self._table: dict[str, np.ndarray] = validated
        self._misses = 0
        self._miss_keys: set[str] = set()
        self._lock = threading.Lock()

    @property
    def table(self) -> Mapping[str, np.ndarray]:
        return self._table

    def __len__(self) -> int:
        return len(self._table)

    def action_probabilities(self, key: InfoStateKey, legal: Sequence[int]) -> np.ndarray:
        probs = self._table.get(key.observation_string)
        if probs is None:
            with self._lock:
                self._misses += 1
                first = key.observation_string not in self._miss_keys
                self._miss_keys.add(key.observation_string)
            if first:
                logger.debug(f"Tabular miss at '{key.observation_string}', playing uniform")
            return uniform(legal)
        if len(probs) != len(legal):
            raise ContractViolation(
                f"Policy entry '{key.observation_string}' has {len(probs)} probabilities "
                f"but {len(legal)} legal actions"
            )
        return probs

    @property
    def misses(self) -> int:
        return self._misses

    @property
    def miss_keys(self) -> frozenset[str]:
        return frozenset(self._miss_keys)

    def reset_misses(self) -> None:
        with self._lock:
            self._misses = 0
            self._miss_keys.clear()


def validate_distribution(probs: np.ndarray, key: str) -> None:
    if probs.ndim != 1 or probs.size == 0:
        raise ConfigurationError(f"Empty or malformed probability vector at key '{key}'")
    if not np.all(np.isfinite(probs)) or np.any(probs < 0):
        raise ConfigurationError(f"Negative or non-finite probability at key '{key}'")
    total = float(probs.sum())
    if abs(total - 1.0) > Tolerances.POLICY_SUM:
        raise ConfigurationError(f"Probabilities at key '{key}' sum to {total!r}, expected 1")


def action_probabilities(policy: Policy, key: InfoStateKey, legal: Sequence[int]) -> np.ndarray:
    return policy.action_probabilities(key, legal)
