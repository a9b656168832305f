"""
Liar's Dice, one six-sided die per player.

Each player privately rolls one die. Players alternate raising a bid
(quantity, face) over the two dice in play, or call "liar" on the previous bid.
The highest face is wild. If the challenged bid holds the bidder wins,
otherwise the challenger wins; the payoff is +/-1.

Actions: bid index = (quantity - 1) * 6 + (face - 1) for quantity in {1, 2},
face in {1..6}; 12 = liar.

Feature layout (20): seat one-hot (2) | own die one-hot (6) | bids made (12).
Bids strictly increase, so the set of bids determines their order and bidders.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import CHANCE, TERMINAL, Game, GameSpec, one_hot

NUM_FACES = 6
NUM_DICE = 2
NUM_BIDS = NUM_FACES * NUM_DICE
LIAR = NUM_BIDS
WILD_FACE = NUM_FACES


def bid_quantity_face(bid: int) -> tuple[int, int]:
    return bid // NUM_FACES + 1, bid % NUM_FACES + 1


@dataclass(frozen=True, slots=True)
class LiarsDiceState:
    dice: tuple[int, ...] = ()
    bids: tuple[int, ...] = ()
    challenged: bool = False


class LiarsDice(Game):
    spec = GameSpec(
        game_id="liars_dice",
        num_players=2,
        max_utility=1.0,
        min_utility=-1.0,
        max_game_length=2 + NUM_BIDS + 1,
        num_distinct_actions=NUM_BIDS + 1,
        feature_size=2 + NUM_FACES + NUM_BIDS,
        perfect_information=False,
        poker_like=False,
    )

    def _initial_state(self) -> LiarsDiceState:
        return LiarsDiceState()

    def _current_player(self, state: LiarsDiceState) -> int:
        if len(state.dice) < 2:
            return CHANCE
        if state.challenged:
            return TERMINAL
        return len(state.bids) % 2

    def _legal_actions(self, state: LiarsDiceState) -> list[int]:
        start = state.bids[-1] + 1 if state.bids else 0
        actions = list(range(start, NUM_BIDS))
        if state.bids:
            actions.append(LIAR)
        return actions

    def _chance_outcomes(self, state: LiarsDiceState) -> list[tuple[int, float]]:
        p = 1.0 / NUM_FACES
        return [(face, p) for face in range(1, NUM_FACES + 1)]

    def _next_state(self, state: LiarsDiceState, action: int) -> LiarsDiceState:
        if len(state.dice) < 2:
            return LiarsDiceState(dice=state.dice + (action,))
        if action == LIAR:
            return LiarsDiceState(state.dice, state.bids, challenged=True)
        return LiarsDiceState(state.dice, state.bids + (action,))

    def _returns(self, state: LiarsDiceState) -> tuple[float, float]:
        quantity, face = bid_quantity_face(state.bids[-1])
        matches = sum(1 for d in state.dice if d == face or d == WILD_FACE)
        bidder = (len(state.bids) - 1) % 2
        winner = bidder if matches >= quantity else 1 - bidder
        return (1.0, -1.0) if winner == 0 else (-1.0, 1.0)

    def _observation(self, state: LiarsDiceState, action: int, observer: int) -> str | None:
        if len(state.dice) < 2:
            return f"d{action}" if len(state.dice) == observer else None
        return self._action_token(action)

    @staticmethod
    def _action_token(action: int) -> str:
        if action == LIAR:
            return "L"
        quantity, face = bid_quantity_face(action)
        return f"{quantity}x{face}"

    def _features(
        self, state: LiarsDiceState, observations: tuple[str, ...], player: int
    ) -> np.ndarray:
        die = state.dice[player] - 1 if len(state.dice) > player else None
        bids = [0.0] * NUM_BIDS
        for b in state.bids:
            bids[b] = 1.0
        vec = one_hot(2, player) + one_hot(NUM_FACES, die) + bids
        return np.asarray(vec, dtype=np.float64)

    def action_to_string(self, player: int, action: int) -> str:
        if player == CHANCE:
            return f"roll:{action}"
        if action == LIAR:
            return "liar"
        quantity, face = bid_quantity_face(action)
        return f"bid:{quantity}x{face}"
