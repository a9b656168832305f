"""A trained evaluator plus search, exposed through the Policy interface."""

from __future__ import annotations

import threading
from collections.abc import Sequence

import numpy as np

from ..exceptions import ContractViolation
from ..games import InfoStateKey
from ..policies import Policy
from .abr_search import SearchConfig, SearchDiagnostics, SearchTree, abr_action, key_seed


class SearchBackedPolicy(Policy):
    """
    Deterministic greedy ABR player.

    Each infostate is searched once with a fresh tree and an rng seeded from
    the infostate key, and the argmax-visit action is cached, so the policy is
    a fixed function of (evaluator, opponent model, config).
    """

    kind = "search_backed"

    def __init__(
        self,
        player: int,
        evaluator,
        opponent_model: Policy,
        config: SearchConfig,
        label: str = "abr",
    ):
        super().__init__(opponent_model.game, player)
        self.evaluator = evaluator
        self.opponent_model = opponent_model
        self.config = config
        self.label = label
        self.diagnostics = SearchDiagnostics()
        self._decisions: dict[str, int] = {}
        self._lock = threading.Lock()

    def decide(self, key: InfoStateKey) -> int:
        if key.player != self.player:
            raise ContractViolation(f"{self.label} plays seat {self.player}, asked about seat {key.player}")
        action = self._decisions.get(key.observation_string)
        if action is not None:
            return action
        tree = SearchTree(self.opponent_model, self.player)
        rng = np.random.default_rng(
            key_seed(self.config.seed, self.game.spec.game_id, self.player, key.observation_string)
        )
        result = abr_action(key, tree, self.opponent_model, self.evaluator, self.config, rng)
        with self._lock:
            self.diagnostics.merge(result.diagnostics)
            return self._decisions.setdefault(key.observation_string, result.action)

    def action_probabilities(self, key: InfoStateKey, legal: Sequence[int]) -> np.ndarray:
        action = self.decide(key)
        if action not in legal:
            raise ContractViolation(f"Searched action {action} is not legal at '{key.observation_string}'")
        probs = np.zeros(len(legal))
        probs[list(legal).index(action)] = 1.0
        return probs

    @property
    def decisions(self) -> dict[str, int]:
        return dict(self._decisions)

    def describe(self) -> str:
        return f"{self.label}[{getattr(self.evaluator, 'kind', '?')}]"
