"""
Kuhn poker.

Three-card deck (J, Q, K), ante 1, one betting round with a single bet of 1.
Actions: 0 = pass (check or fold), 1 = bet (bet or call).

Feature layout (11): seat one-hot (2) | private card one-hot (3) |
three betting slots, each one-hot over (pass, bet) (6).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import CHANCE, TERMINAL, Game, GameSpec, InfoStateKey, one_hot

PASS, BET = 0, 1
CARD_NAMES = ("J", "Q", "K")
_ACTION_TOKENS = ("p", "b")


@dataclass(frozen=True, slots=True)
class KuhnState:
    cards: tuple[int, ...] = ()
    bets: tuple[int, ...] = ()


class KuhnPoker(Game):
    spec = GameSpec(
        game_id="kuhn_poker",
        num_players=2,
        max_utility=2.0,
        min_utility=-2.0,
        max_game_length=5,
        num_distinct_actions=2,
        feature_size=11,
        perfect_information=False,
        poker_like=True,
    )

    def _initial_state(self) -> KuhnState:
        return KuhnState()

    def _current_player(self, state: KuhnState) -> int:
        if len(state.cards) < 2:
            return CHANCE
        if self._is_over(state.bets):
            return TERMINAL
        return len(state.bets) % 2

    @staticmethod
    def _is_over(bets: tuple[int, ...]) -> bool:
        if len(bets) < 2:
            return False
        return bets != (PASS, BET)

    def _legal_actions(self, state: KuhnState) -> list[int]:
        return [PASS, BET]

    def _chance_outcomes(self, state: KuhnState) -> list[tuple[int, float]]:
        remaining = [c for c in range(3) if c not in state.cards]
        p = 1.0 / len(remaining)
        return [(c, p) for c in remaining]

    def _next_state(self, state: KuhnState, action: int) -> KuhnState:
        if len(state.cards) < 2:
            return KuhnState(state.cards + (action,), state.bets)
        return KuhnState(state.cards, state.bets + (action,))

    def _returns(self, state: KuhnState) -> tuple[float, float]:
        bets = state.bets
        winner = 0 if state.cards[0] > state.cards[1] else 1
        if bets == (PASS, PASS):
            stake = 1.0
        elif bets == (BET, PASS):
            winner, stake = 0, 1.0
        elif bets == (PASS, BET, PASS):
            winner, stake = 1, 1.0
        else:
            stake = 2.0
        return (stake, -stake) if winner == 0 else (-stake, stake)

    def _observation(self, state: KuhnState, action: int, observer: int) -> str | None:
        if len(state.cards) < 2:
            return CARD_NAMES[action] if len(state.cards) == observer else None
        return _ACTION_TOKENS[action]

    def _features(self, state: KuhnState, observations: tuple[str, ...], player: int) -> np.ndarray:
        card = CARD_NAMES.index(observations[0]) if observations else None
        vec = one_hot(2, player) + one_hot(3, card)
        for slot in range(3):
            vec += one_hot(2, state.bets[slot] if slot < len(state.bets) else None)
        return np.asarray(vec, dtype=np.float64)

    def fold_call_actions(self, key: InfoStateKey, legal: list[int]) -> tuple[int | None, int]:
        facing_bet = key.observation_string.endswith(_ACTION_TOKENS[BET])
        return (PASS, BET) if facing_bet else (None, PASS)

    def action_to_string(self, player: int, action: int) -> str:
        if player == CHANCE:
            return f"deal:{CARD_NAMES[action]}"
        return ("pass", "bet")[action]
