"""
Tic-Tac-Toe.

Cells 0..8 row-major; seat 0 plays x and moves first. Win +1, loss -1, draw 0.
Keys are the move sequence (the history); features are the board.

Feature layout (27): planes (empty, x, o) x 9 cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import TERMINAL, Game, GameSpec

LINES = (
    (0, 1, 2), (3, 4, 5), (6, 7, 8),
    (0, 3, 6), (1, 4, 7), (2, 5, 8),
    (0, 4, 8), (2, 4, 6),
)
EMPTY = -1


@dataclass(frozen=True, slots=True)
class BoardState:
    board: tuple[int, ...] = (EMPTY,) * 9
    to_move: int = 0
    winner: int | None = None
    moves: int = 0


def line_winner(board: tuple[int, ...], lines) -> int | None:
    for a, b, c in lines:
        if board[a] != EMPTY and board[a] == board[b] == board[c]:
            return board[a]
    return None


class TicTacToe(Game):
    spec = GameSpec(
        game_id="tic_tac_toe",
        num_players=2,
        max_utility=1.0,
        min_utility=-1.0,
        max_game_length=9,
        num_distinct_actions=9,
        feature_size=27,
        perfect_information=True,
        poker_like=False,
    )

    def _initial_state(self) -> BoardState:
        return BoardState()

    def _current_player(self, state: BoardState) -> int:
        if state.winner is not None or state.moves == 9:
            return TERMINAL
        return state.to_move

    def _legal_actions(self, state: BoardState) -> list[int]:
        return [i for i, cell in enumerate(state.board) if cell == EMPTY]

    def _chance_outcomes(self, state: BoardState) -> list[tuple[int, float]]:
        return []

    def _next_state(self, state: BoardState, action: int) -> BoardState:
        board = list(state.board)
        board[action] = state.to_move
        board_t = tuple(board)
        return BoardState(board_t, 1 - state.to_move, line_winner(board_t, LINES), state.moves + 1)

    def _returns(self, state: BoardState) -> tuple[float, float]:
        if state.winner is None:
            return (0.0, 0.0)
        return (1.0, -1.0) if state.winner == 0 else (-1.0, 1.0)

    def _observation(self, state: BoardState, action: int, observer: int) -> str | None:
        return str(action)

    def _features(self, state: BoardState, observations: tuple[str, ...], player: int) -> np.ndarray:
        board = np.asarray(state.board)
        return np.concatenate([board == EMPTY, board == 0, board == 1]).astype(np.float64)

    def action_to_string(self, player: int, action: int) -> str:
        return f"{'xo'[player]}({action // 3},{action % 3})"
