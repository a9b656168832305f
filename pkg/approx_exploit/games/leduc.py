"""
Leduc poker.

Six-card deck (J, Q, K in two suits), ante 1, two betting rounds with raise
sizes 2 then 4 and at most two raises per round. One public card is dealt
between the rounds. A pair with the public card beats any non-pair; otherwise
the higher rank wins and equal ranks split the pot.

Actions: 0 = fold (legal only when facing a raise), 1 = call/check, 2 = raise.
Card ids 0..5: rank = id // 2, suit = id % 2.

Feature layout (30): seat one-hot (2) | private card one-hot (6) |
public card one-hot (6) | round-1 action slots (4 x [call, raise]) |
round-2 action slots (4 x [call, raise]).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import CHANCE, TERMINAL, Game, GameSpec, InfoStateKey, one_hot

FOLD, CALL, RAISE = 0, 1, 2
NUM_CARDS = 6
ANTE = 1
RAISE_SIZES = (2, 4)
MAX_RAISES = 2
SLOTS_PER_ROUND = 4

_RANKS = ("J", "Q", "K")
_SUITS = ("s", "h")
_ACTION_TOKENS = ("f", "c", "r")


def card_name(card: int) -> str:
    return f"{_RANKS[card // 2]}{_SUITS[card % 2]}"


@dataclass(frozen=True, slots=True)
class LeducState:
    private: tuple[int, ...] = ()
    public: int | None = None
    round_actions: tuple[tuple[int, ...], ...] = ((),)
    contributions: tuple[int, int] = (ANTE, ANTE)
    folded: int | None = None

    @property
    def round(self) -> int:
        return len(self.round_actions) - 1

    @property
    def current(self) -> tuple[int, ...]:
        return self.round_actions[-1]


def _round_over(actions: tuple[int, ...]) -> bool:
    if len(actions) < 2:
        return False
    return actions[-1] == CALL


class LeducPoker(Game):
    spec = GameSpec(
        game_id="leduc_poker",
        num_players=2,
        max_utility=13.0,
        min_utility=-13.0,
        max_game_length=11,
        num_distinct_actions=3,
        feature_size=30,
        perfect_information=False,
        poker_like=True,
    )

    def _initial_state(self) -> LeducState:
        return LeducState()

    def _current_player(self, state: LeducState) -> int:
        if state.folded is not None:
            return TERMINAL
        if len(state.private) < 2:
            return CHANCE
        if _round_over(state.current):
            if state.round == 0 and state.public is None:
                return CHANCE
            return TERMINAL
        return len(state.current) % 2

    def _legal_actions(self, state: LeducState) -> list[int]:
        player = len(state.current) % 2
        actions = []
        if state.contributions[1 - player] > state.contributions[player]:
            actions.append(FOLD)
        actions.append(CALL)
        if state.current.count(RAISE) < MAX_RAISES:
            actions.append(RAISE)
        return actions

    def _chance_outcomes(self, state: LeducState) -> list[tuple[int, float]]:
        remaining = [c for c in range(NUM_CARDS) if c not in state.private]
        p = 1.0 / len(remaining)
        return [(c, p) for c in remaining]

    def _next_state(self, state: LeducState, action: int) -> LeducState:
        if len(state.private) < 2:
            return LeducState(private=state.private + (action,))
        if state.public is None and _round_over(state.current):
            return LeducState(
                private=state.private,
                public=action,
                round_actions=state.round_actions + ((),),
                contributions=state.contributions,
            )
        player = len(state.current) % 2
        contributions = list(state.contributions)
        folded = None
        if action == FOLD:
            folded = player
        elif action == CALL:
            contributions[player] = contributions[1 - player]
        else:
            contributions[player] = contributions[1 - player] + RAISE_SIZES[state.round]
        rounds = state.round_actions[:-1] + (state.current + (action,),)
        return LeducState(
            private=state.private,
            public=state.public,
            round_actions=rounds,
            contributions=(contributions[0], contributions[1]),
            folded=folded,
        )

    def _returns(self, state: LeducState) -> tuple[float, float]:
        if state.folded is not None:
            loser = state.folded
            stake = float(state.contributions[loser])
            return (-stake, stake) if loser == 0 else (stake, -stake)
        winner = self._showdown_winner(state.private, state.public)
        stake = float(state.contributions[0])
        if winner is None:
            return (0.0, 0.0)
        return (stake, -stake) if winner == 0 else (-stake, stake)

    @staticmethod
    def _showdown_winner(private: tuple[int, ...], public: int | None) -> int | None:
        public_rank = public // 2 if public is not None else -1
        strength = []
        for card in private:
            rank = card // 2
            strength.append((1 if rank == public_rank else 0, rank))
        if strength[0] == strength[1]:
            return None
        return 0 if strength[0] > strength[1] else 1

    def _observation(self, state: LeducState, action: int, observer: int) -> str | None:
        if len(state.private) < 2:
            return card_name(action) if len(state.private) == observer else None
        if state.public is None and _round_over(state.current):
            return card_name(action)
        return _ACTION_TOKENS[action]

    def _features(self, state: LeducState, observations: tuple[str, ...], player: int) -> np.ndarray:
        private = state.private[player] if len(state.private) > player else None
        vec = one_hot(2, player) + one_hot(NUM_CARDS, private) + one_hot(NUM_CARDS, state.public)
        for rnd in range(2):
            actions = state.round_actions[rnd] if rnd < len(state.round_actions) else ()
            for slot in range(SLOTS_PER_ROUND):
                action = actions[slot] if slot < len(actions) else None
                # fold ends the game, so only call/raise occupy slots
                vec += one_hot(2, action - 1 if action in (CALL, RAISE) else None)
        return np.asarray(vec, dtype=np.float64)

    def fold_call_actions(self, key: InfoStateKey, legal: list[int]) -> tuple[int | None, int]:
        return (FOLD if FOLD in legal else None, CALL)

    def action_to_string(self, player: int, action: int) -> str:
        if player == CHANCE:
            return f"deal:{card_name(action)}"
        return ("fold", "call", "raise")[action]
