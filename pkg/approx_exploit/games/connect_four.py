"""
Connect Four on the standard 6x7 board.

Actions are columns 0..6; seat 0 moves first. Win +1, loss -1, full-board draw 0.
Keys are the move sequence; features are the board.

Feature layout (126): planes (empty, seat 0, seat 1) x 42 cells, row-major from the bottom row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import TERMINAL, Game, GameSpec
from .tic_tac_toe import EMPTY

ROWS, COLS = 6, 7


def _build_lines() -> tuple[tuple[int, int, int, int], ...]:
    lines = []
    for r in range(ROWS):
        for c in range(COLS):
            for dr, dc in ((0, 1), (1, 0), (1, 1), (1, -1)):
                cells = [(r + k * dr, c + k * dc) for k in range(4)]
                if all(0 <= rr < ROWS and 0 <= cc < COLS for rr, cc in cells):
                    lines.append(tuple(rr * COLS + cc for rr, cc in cells))
    return tuple(lines)


LINES = _build_lines()
# lines through each cell, so a move only checks its own lines
LINES_BY_CELL = tuple(tuple(line for line in LINES if cell in line) for cell in range(ROWS * COLS))


@dataclass(frozen=True, slots=True)
class ConnectFourState:
    board: tuple[int, ...] = (EMPTY,) * (ROWS * COLS)
    heights: tuple[int, ...] = (0,) * COLS
    to_move: int = 0
    winner: int | None = None
    moves: int = 0


class ConnectFour(Game):
    spec = GameSpec(
        game_id="connect_four",
        num_players=2,
        max_utility=1.0,
        min_utility=-1.0,
        max_game_length=ROWS * COLS,
        num_distinct_actions=COLS,
        feature_size=3 * ROWS * COLS,
        perfect_information=True,
        poker_like=False,
        traversable=False,
    )

    def _initial_state(self) -> ConnectFourState:
        return ConnectFourState()

    def _current_player(self, state: ConnectFourState) -> int:
        if state.winner is not None or state.moves == ROWS * COLS:
            return TERMINAL
        return state.to_move

    def _legal_actions(self, state: ConnectFourState) -> list[int]:
        return [c for c in range(COLS) if state.heights[c] < ROWS]

    def _chance_outcomes(self, state: ConnectFourState) -> list[tuple[int, float]]:
        return []

    def _next_state(self, state: ConnectFourState, action: int) -> ConnectFourState:
        cell = state.heights[action] * COLS + action
        board = list(state.board)
        board[cell] = state.to_move
        heights = list(state.heights)
        heights[action] += 1
        board_t = tuple(board)
        winner = None
        for a, b, c, d in LINES_BY_CELL[cell]:
            if board_t[a] == board_t[b] == board_t[c] == board_t[d] == state.to_move:
                winner = state.to_move
                break
        return ConnectFourState(board_t, tuple(heights), 1 - state.to_move, winner, state.moves + 1)

    def _returns(self, state: ConnectFourState) -> tuple[float, float]:
        if state.winner is None:
            return (0.0, 0.0)
        return (1.0, -1.0) if state.winner == 0 else (-1.0, 1.0)

    def _observation(self, state: ConnectFourState, action: int, observer: int) -> str | None:
        return str(action)

    def _features(
        self, state: ConnectFourState, observations: tuple[str, ...], player: int
    ) -> np.ndarray:
        board = np.asarray(state.board)
        return np.concatenate([board == EMPTY, board == 0, board == 1]).astype(np.float64)

    def action_to_string(self, player: int, action: int) -> str:
        return f"col{action}"
