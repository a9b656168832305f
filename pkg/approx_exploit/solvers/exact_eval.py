"""
Exact evaluation: expected values, best responses and NashConv by full traversal.

No sampling happens here; every other module is tested against these numbers.
"""

from __future__ import annotations

import logging
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from ..config import Tolerances
from ..exceptions import ContractViolation
from ..games import CHANCE, PLAYERS, TERMINAL, Game, History, InfoStateKey, get_game_tree
from ..policies import Policy, TabularPolicy

logger = logging.getLogger(__name__)

# deep enough for the longest traversable game with headroom
sys.setrecursionlimit(max(sys.getrecursionlimit(), 10_000))


@dataclass
class BestResponseResult:
    responder: int
    br_value: float
    br_policy: TabularPolicy
    delta: float | None = None
    reachable_infostates: int = 0


@dataclass
class ExploitabilityReport:
    game_id: str
    per_player_br_values: tuple[float, float]
    nashconv: float
    exploitability: float
    game_value_estimate: float | None = None
    per_player_deltas: tuple[float, float] | None = None
    policy_digests: tuple[str, str] | None = None
    policy_misses: tuple[int, int] = (0, 0)
    wall_clock_seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


class _ProbabilityCache:
    """Per-invocation memo of policy lookups keyed by (seat, observation string)."""

    def __init__(self, policies: dict[int, Policy]):
        self.policies = policies
        self._cache: dict[tuple[int, str], list[float]] = {}

    def __call__(self, player: int, key: str, legal: tuple[int, ...] | list[int]) -> list[float]:
        cache_key = (player, key)
        probs = self._cache.get(cache_key)
        if probs is None:
            probs = self.policies[player].action_probabilities(InfoStateKey(player, key), legal)
            probs = [float(p) for p in probs]
            self._cache[cache_key] = probs
        return probs


def _check_game(pi_1: Policy, pi_2: Policy) -> Game:
    if pi_1.game.spec.game_id != pi_2.game.spec.game_id:
        raise ContractViolation(
            f"Policies belong to different games: {pi_1.game.spec.game_id} vs {pi_2.game.spec.game_id}"
        )
    return pi_1.game


# ── expected value ────────────────────────────────────────────────────────────


def expected_value(pi_1: Policy, pi_2: Policy) -> tuple[float, float]:
    """
    Exact expected returns of the joint policy (seat 0 plays ``pi_1``).

    Branches with zero reach are pruned, so deterministic profiles in
    perfect-information games cost a single line.
    """
    game = _check_game(pi_1, pi_2)
    probs = _ProbabilityCache({0: pi_1, 1: pi_2})

    def walk(h: History) -> float:
        player = game.current_player(h)
        if player == TERMINAL:
            return game.returns(h)[0]
        if player == CHANCE:
            return sum(
                p * walk(game.apply_unchecked(h, CHANCE, a)) for a, p in game.chance_outcomes(h)
            )
        legal = game.legal_actions(h)
        dist = probs(player, game.infostate_key(h, player).observation_string, legal)
        return sum(
            p * walk(game.apply_unchecked(h, player, a)) for a, p in zip(legal, dist) if p > 0.0
        )

    v1 = walk(game.new_initial_state())
    return v1, -v1


def seat_averaged_value(
    agent_a: tuple[Policy, Policy], agent_b: tuple[Policy, Policy]
) -> float:
    """Value for agent A averaged over both seat arrangements."""
    a_first = expected_value(agent_a[0], agent_b[1])[0]
    a_second = expected_value(agent_b[0], agent_a[1])[1]
    return 0.5 * (a_first + a_second)


# ── best response ─────────────────────────────────────────────────────────────


def best_response(
    pi_opponent: Policy, responder: int, game_value: float | None = None
) -> BestResponseResult:
    """
    Exact best response of seat ``responder`` against ``pi_opponent``.

    Forward pass: opponent-and-chance reach of every history. Backward pass:
    at each responder infostate pick the action maximizing the reach-weighted
    child values; ties go to the lowest action id, and infostates with zero
    reach therefore pick their lowest action.
    """
    if responder not in PLAYERS:
        raise ContractViolation(f"responder must be one of {PLAYERS}, got {responder}")
    game = pi_opponent.game
    tree = get_game_tree(game)
    nodes = tree.nodes
    opponent = 1 - responder
    probs = _ProbabilityCache({opponent: pi_opponent})

    # forward pass (pre-order: parents precede children)
    reach = np.zeros(len(nodes))
    reach[0] = 1.0
    for index, node in enumerate(nodes):
        r = reach[index]
        if node.player == TERMINAL or r == 0.0:
            continue
        if node.player == CHANCE:
            for child, p in zip(node.children, node.chance_probs):
                reach[child] = r * p
        elif node.player == opponent:
            for child, p in zip(node.children, probs(opponent, node.key, node.legal)):
                reach[child] = r * p
        else:
            for child in node.children:
                reach[child] = r

    values: dict[int, float] = {}
    best: dict[str, int] = {}

    def best_action(key: str) -> int:
        action_index = best.get(key)
        if action_index is not None:
            return action_index
        members = tree.infostates[responder][key]
        q = np.zeros(len(nodes[members[0]].legal))
        for m in members:
            if reach[m] == 0.0:
                continue
            for k, child in enumerate(nodes[m].children):
                q[k] += reach[m] * node_value(child)
        action_index = int(np.argmax(q))  # first maximum = lowest action id
        best[key] = action_index
        return action_index

    def node_value(index: int) -> float:
        cached = values.get(index)
        if cached is not None:
            return cached
        node = nodes[index]
        if node.player == TERMINAL:
            v = node.returns[responder]
        elif node.player == CHANCE:
            v = sum(p * node_value(c) for c, p in zip(node.children, node.chance_probs))
        elif node.player == opponent:
            v = sum(
                p * node_value(c)
                for c, p in zip(node.children, probs(opponent, node.key, node.legal))
                if p > 0.0
            )
        else:
            v = node_value(node.children[best_action(node.key)])
        values[index] = v
        return v

    br_value = node_value(0)

    table = {}
    for key, members in tree.infostates[responder].items():
        chosen = best_action(key)
        one_hot = np.zeros(len(nodes[members[0]].legal))
        one_hot[chosen] = 1.0
        table[key] = one_hot
    reachable = sum(
        1 for members in tree.infostates[responder].values() if any(reach[m] > 0 for m in members)
    )

    delta = None
    if game_value is not None:
        own_value = game_value if responder == 0 else -game_value
        delta = br_value - own_value
    return BestResponseResult(
        responder=responder,
        br_value=float(br_value),
        br_policy=TabularPolicy(game, responder, table),
        delta=delta,
        reachable_infostates=reachable,
    )


def nash_conv(
    pi_1: Policy, pi_2: Policy, game_value: float | None = None
) -> ExploitabilityReport:
    """NashConv = sum over seats of the best-response value against the other seat's policy."""
    game = _check_game(pi_1, pi_2)
    start = time.perf_counter()
    br_first = best_response(pi_2, responder=0, game_value=game_value)
    br_second = best_response(pi_1, responder=1, game_value=game_value)
    values = (br_first.br_value, br_second.br_value)
    total = values[0] + values[1]
    if total < Tolerances.NASHCONV_FLOOR:
        raise ContractViolation(f"NashConv came out negative ({total!r}); traversal is broken")

    deltas = None
    if game_value is not None:
        deltas = (float(br_first.delta), float(br_second.delta))
    elapsed = time.perf_counter() - start
    logger.info(
        f"NashConv({game.spec.game_id}) = {total:.6g} "
        f"(br values {values[0]:.6g}, {values[1]:.6g}) in {elapsed:.2f}s"
    )
    return ExploitabilityReport(
        game_id=game.spec.game_id,
        per_player_br_values=values,
        nashconv=total,
        exploitability=total / 2.0,
        game_value_estimate=game_value,
        per_player_deltas=deltas,
        policy_misses=(pi_1.misses, pi_2.misses),
        wall_clock_seconds=elapsed,
    )
