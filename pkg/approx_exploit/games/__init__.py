"""
Game Layer Package

Registry of the built-in games plus functional helpers over histories.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import ConfigurationError
from .base import CHANCE, PLAYERS, TERMINAL, TOKEN_SEPARATOR, Game, GameSpec, History, InfoStateKey
from .connect_four import ConnectFour
from .kuhn import KuhnPoker
from .leduc import LeducPoker
from .liars_dice import LiarsDice
from .tic_tac_toe import TicTacToe
from .tree import GameTree, get_game_tree, infostate_catalog

_REGISTRY: dict[str, type[Game]] = {
    "kuhn_poker": KuhnPoker,
    "leduc_poker": LeducPoker,
    "liars_dice": LiarsDice,
    "tic_tac_toe": TicTacToe,
    "connect_four": ConnectFour,
}
_INSTANCES: dict[str, Game] = {}

GAME_IDS = tuple(_REGISTRY)


def load_game(game_id: str) -> Game:
    """Return the shared instance of a built-in game (games are stateless)."""
    if game_id not in _REGISTRY:
        raise ConfigurationError(
            f"Unknown game id '{game_id}'. Must be one of: {', '.join(GAME_IDS)}"
        )
    if game_id not in _INSTANCES:
        _INSTANCES[game_id] = _REGISTRY[game_id]()
    return _INSTANCES[game_id]


def new_game(game_id: str) -> tuple[GameSpec, History]:
    game = load_game(game_id)
    return game.spec, game.new_initial_state()


def legal_actions(h: History) -> list[int]:
    return h.game.legal_actions(h)


def apply(h: History, action: int) -> History:
    return h.game.apply(h, action)


def is_terminal(h: History) -> bool:
    return h.game.is_terminal(h)


def returns(h: History) -> tuple[float, float]:
    return h.game.returns(h)


def chance_outcomes(h: History) -> list[tuple[int, float]]:
    return h.game.chance_outcomes(h)


def infostate_key(h: History, player: int) -> InfoStateKey:
    return h.game.infostate_key(h, player)


def infostate_tensor(h: History, player: int) -> np.ndarray:
    return h.game.infostate_tensor(h, player)


__all__ = [
    "CHANCE",
    "GAME_IDS",
    "PLAYERS",
    "TERMINAL",
    "TOKEN_SEPARATOR",
    "Game",
    "GameSpec",
    "GameTree",
    "History",
    "InfoStateKey",
    "apply",
    "chance_outcomes",
    "get_game_tree",
    "infostate_catalog",
    "infostate_key",
    "infostate_tensor",
    "is_terminal",
    "legal_actions",
    "load_game",
    "new_game",
    "returns",
]
