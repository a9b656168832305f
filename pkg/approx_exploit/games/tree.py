"""
Compiled game trees.

Every history of a traversable game is enumerated once into an index-based
node table. Nodes are stored in pre-order, so iterating the table backwards
visits children before parents. Exact evaluation, CFR+ and the infostate
catalog work on this table instead of re-applying actions.
"""

from __future__ import annotations

import logging
import threading
import time
from functools import lru_cache

from ..exceptions import ConfigurationError
from .base import CHANCE, PLAYERS, TERMINAL, Game, History

logger = logging.getLogger(__name__)


class TreeNode:
    __slots__ = ("player", "key", "legal", "children", "chance_probs", "returns", "parent", "action")

    def __init__(self, player: int, parent: int, action: int):
        self.player = player
        self.key: str | None = None
        self.legal: tuple[int, ...] = ()
        self.children: tuple[int, ...] = ()
        self.chance_probs: tuple[float, ...] = ()
        self.returns: tuple[float, float] | None = None
        self.parent = parent
        self.action = action


class GameTree:
    """Full extensive-form tree of a game, with infostate membership per seat."""

    def __init__(self, game: Game):
        if not game.spec.traversable:
            raise ConfigurationError(
                f"{game.spec.game_id} is too large to traverse; use a sampled protocol"
            )
        self.game = game
        self.nodes: list[TreeNode] = []
        # infostates[p][key] -> node indices where seat p acts with that key
        self.infostates: tuple[dict[str, list[int]], dict[str, list[int]]] = ({}, {})
        self._legal_by_key: tuple[dict[str, tuple[int, ...]], dict[str, tuple[int, ...]]] = ({}, {})

        start = time.perf_counter()
        self._expand(game.new_initial_state(), parent=-1, action=-1)
        logger.info(
            f"Built {game.spec.game_id} tree: {len(self.nodes)} histories, "
            f"{self.num_infostates(0)}+{self.num_infostates(1)} infostates "
            f"in {time.perf_counter() - start:.2f}s"
        )

    def _expand(self, h: History, parent: int, action: int) -> int:
        game = self.game
        player = game.current_player(h)
        node = TreeNode(player, parent, action)
        index = len(self.nodes)
        self.nodes.append(node)

        if player == TERMINAL:
            node.returns = game.returns(h)
            return index

        if player == CHANCE:
            outcomes = game.chance_outcomes(h)
            node.legal = tuple(a for a, _ in outcomes)
            node.chance_probs = tuple(p for _, p in outcomes)
        else:
            node.legal = tuple(game.legal_actions(h))
            node.key = game.infostate_key(h, player).observation_string
            self.infostates[player].setdefault(node.key, []).append(index)
            self._legal_by_key[player].setdefault(node.key, node.legal)

        node.children = tuple(
            self._expand(game.apply_unchecked(h, player, a), index, a) for a in node.legal
        )
        return index

    # ── queries ───────────────────────────────────────────────────────────────

    def num_infostates(self, player: int) -> int:
        return len(self.infostates[player])

    @property
    def num_histories(self) -> int:
        return len(self.nodes)

    @property
    def num_terminals(self) -> int:
        return sum(1 for n in self.nodes if n.player == TERMINAL)

    def legal_actions(self, player: int, key: str) -> tuple[int, ...]:
        return self._legal_by_key[player][key]

    def catalog(self, player: int) -> dict[str, tuple[int, ...]]:
        """Ordered mapping key -> legal actions for every infostate of ``player``."""
        return {k: self._legal_by_key[player][k] for k in sorted(self._legal_by_key[player])}

    def action_path(self, index: int) -> tuple[int, ...]:
        path = []
        while index > 0:
            node = self.nodes[index]
            path.append(node.action)
            index = node.parent
        return tuple(reversed(path))

    def history(self, index: int) -> History:
        return self.game.replay(self.action_path(index))


_tree_lock = threading.Lock()


@lru_cache(maxsize=None)
def _cached_tree(game_id: str) -> GameTree:
    from . import load_game

    return GameTree(load_game(game_id))


def get_game_tree(game: Game | str) -> GameTree:
    """Return the (cached) compiled tree of a traversable game."""
    game_id = game if isinstance(game, str) else game.spec.game_id
    with _tree_lock:
        return _cached_tree(game_id)


def infostate_catalog(game: Game | str, player: int) -> dict[str, tuple[int, ...]]:
    if player not in PLAYERS:
        raise ConfigurationError(f"player must be one of {PLAYERS}, got {player}")
    return get_game_tree(game).catalog(player)
