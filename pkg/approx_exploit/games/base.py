"""
Game Layer (Layer 1)
====================
Extensive-form game abstraction shared by the built-in games.

Seats are numbered 0 and 1 (the first and second player); chance is ``CHANCE``.
A :class:`History` is an immutable value: the action sequence from the root
plus a cached game-specific state and the per-player observation sequences
that information-state keys are built from.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np

from ..exceptions import ContractViolation

CHANCE = -1
TERMINAL = -2
PLAYERS = (0, 1)

# separator between observation tokens inside a key; tokens never contain it
TOKEN_SEPARATOR = "|"


@dataclass(frozen=True)
class GameSpec:
    """Static description of a game."""

    game_id: str
    num_players: int
    max_utility: float
    min_utility: float
    max_game_length: int
    num_distinct_actions: int
    feature_size: int
    perfect_information: bool
    poker_like: bool
    traversable: bool = True


class InfoStateKey(NamedTuple):
    """A player's information state: the canonical text of their observation sequence."""

    player: int
    observation_string: str

    def __str__(self) -> str:
        return self.observation_string


class History:
    """
    A ground state reached from the root by ``actions``.

    Histories compare and hash by game id and action sequence, so replaying the
    same actions yields an equal value.
    """

    __slots__ = ("game", "actions", "_state", "_observations")

    def __init__(
        self,
        game: Game,
        actions: tuple[tuple[int, int], ...],
        state: Any,
        observations: tuple[tuple[str, ...], tuple[str, ...]],
    ):
        self.game = game
        self.actions = actions
        self._state = state
        self._observations = observations

    @property
    def action_ids(self) -> tuple[int, ...]:
        return tuple(a for _, a in self.actions)

    @property
    def state(self) -> Any:
        return self._state

    def observations(self, player: int) -> tuple[str, ...]:
        return self._observations[player]

    def current_player(self) -> int:
        return self.game.current_player(self)

    def is_terminal(self) -> bool:
        return self.game.is_terminal(self)

    def is_chance_node(self) -> bool:
        return self.game.current_player(self) == CHANCE

    def legal_actions(self) -> list[int]:
        return self.game.legal_actions(self)

    def child(self, action: int) -> History:
        return self.game.apply(self, action)

    def returns(self) -> tuple[float, float]:
        return self.game.returns(self)

    def __len__(self) -> int:
        return len(self.actions)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, History):
            return NotImplemented
        return self.game.spec.game_id == other.game.spec.game_id and self.actions == other.actions

    def __hash__(self) -> int:
        return hash((self.game.spec.game_id, self.actions))

    def __repr__(self) -> str:
        moves = " ".join(self.game.action_to_string(p, a) for p, a in self.actions)
        return f"<History({self.game.spec.game_id}: {moves or 'root'})>"


class Game(ABC):
    """
    Base class for the built-in games.

    Subclasses implement the ``_``-prefixed state transition hooks on their own
    immutable state objects; the public methods enforce the contracts.
    """

    spec: GameSpec

    # ── hooks implemented by each game ────────────────────────────────────────

    @abstractmethod
    def _initial_state(self) -> Any: ...

    @abstractmethod
    def _current_player(self, state: Any) -> int:
        """Seat to act, ``CHANCE``, or ``TERMINAL``."""

    @abstractmethod
    def _legal_actions(self, state: Any) -> list[int]: ...

    @abstractmethod
    def _chance_outcomes(self, state: Any) -> list[tuple[int, float]]: ...

    @abstractmethod
    def _next_state(self, state: Any, action: int) -> Any: ...

    @abstractmethod
    def _returns(self, state: Any) -> tuple[float, float]: ...

    @abstractmethod
    def _observation(self, state: Any, action: int, observer: int) -> str | None:
        """Token ``observer`` receives when ``action`` is taken at ``state`` (None: nothing seen)."""

    @abstractmethod
    def _features(self, state: Any, observations: tuple[str, ...], player: int) -> np.ndarray: ...

    @abstractmethod
    def action_to_string(self, player: int, action: int) -> str: ...

    # ── fold/call semantics for fixed-rule policies (poker-like games only) ──

    def fold_call_actions(self, key: InfoStateKey, legal: list[int]) -> tuple[int | None, int]:
        """Return (fold action if legal, call/check action) at ``key``."""
        raise ContractViolation(f"{self.spec.game_id} has no fold/call actions")

    # ── public API ────────────────────────────────────────────────────────────

    def new_initial_state(self) -> History:
        return History(self, (), self._initial_state(), ((), ()))

    def current_player(self, h: History) -> int:
        return self._current_player(h.state)

    def is_terminal(self, h: History) -> bool:
        return self._current_player(h.state) == TERMINAL

    def legal_actions(self, h: History) -> list[int]:
        if self.is_terminal(h):
            raise ContractViolation(f"legal_actions called on terminal history {h!r}")
        if self._current_player(h.state) == CHANCE:
            return [a for a, _ in self._chance_outcomes(h.state)]
        return self._legal_actions(h.state)

    def chance_outcomes(self, h: History) -> list[tuple[int, float]]:
        if self._current_player(h.state) != CHANCE:
            raise ContractViolation(f"chance_outcomes called on non-chance history {h!r}")
        return self._chance_outcomes(h.state)

    def apply(self, h: History, action: int) -> History:
        player = self._current_player(h.state)
        if player == TERMINAL:
            raise ContractViolation(f"apply called on terminal history {h!r}")
        if action not in self.legal_actions(h):
            raise ContractViolation(
                f"illegal action {action} at {h!r}; legal: {self.legal_actions(h)}"
            )
        return self.apply_unchecked(h, player, action)

    def apply_unchecked(self, h: History, player: int, action: int) -> History:
        """Apply a known-legal ``action`` by ``player``; used by the inner loops."""
        state = h.state
        observations = tuple(
            obs + (token,) if (token := self._observation(state, action, observer)) else obs
            for observer, obs in enumerate(h._observations)
        )
        return History(
            self,
            h.actions + ((player, action),),
            self._next_state(state, action),
            observations,  # type: ignore[arg-type]
        )

    def returns(self, h: History) -> tuple[float, float]:
        if not self.is_terminal(h):
            raise ContractViolation(f"returns called on non-terminal history {h!r}")
        return self._returns(h.state)

    def infostate_key(self, h: History, player: int) -> InfoStateKey:
        if player not in PLAYERS:
            raise ContractViolation(f"infostate_key requires a seat in {PLAYERS}, got {player}")
        return InfoStateKey(player, TOKEN_SEPARATOR.join(h.observations(player)))

    def infostate_tensor(self, h: History, player: int) -> np.ndarray:
        if player not in PLAYERS:
            raise ContractViolation(f"infostate_tensor requires a seat in {PLAYERS}, got {player}")
        features = self._features(h.state, h.observations(player), player)
        return features

    def replay(self, action_ids: list[int] | tuple[int, ...]) -> History:
        """Rebuild a history from its action ids, validating each step."""
        h = self.new_initial_state()
        for a in action_ids:
            h = self.apply(h, a)
        return h

    def __repr__(self) -> str:
        return f"<Game({self.spec.game_id})>"


def one_hot(size: int, index: int | None) -> list[float]:
    vec = [0.0] * size
    if index is not None:
        vec[index] = 1.0
    return vec
