"""
CFR+ baseline solver.

Alternating updates with regrets clamped after every player's traversal.
Strategy averaging is linear in the iteration: a seat's current strategy is
added to its sums during the other seat's traversal, after its own regret
update. Tree walks are exact over the compiled game tree; there is no sampling.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from ..exceptions import ConfigurationError, ContractViolation
from ..games import CHANCE, PLAYERS, TERMINAL, Game, get_game_tree
from ..policies import TabularPolicy, save
from .exact_eval import expected_value, nash_conv

logger = logging.getLogger(__name__)


@dataclass
class CfrState:
    """Cumulative clamped regrets and linearly weighted strategy sums per seat."""

    game_id: str
    iteration: int = 0
    regrets: tuple[dict[str, list[float]], dict[str, list[float]]] = field(
        default_factory=lambda: ({}, {})
    )
    strategy_sums: tuple[dict[str, list[float]], dict[str, list[float]]] = field(
        default_factory=lambda: ({}, {})
    )

    @classmethod
    def new(cls, game: Game) -> CfrState:
        tree = get_game_tree(game)
        state = cls(game_id=game.spec.game_id)
        for p in PLAYERS:
            for key, legal in tree.catalog(p).items():
                state.regrets[p][key] = [0.0] * len(legal)
                state.strategy_sums[p][key] = [0.0] * len(legal)
        return state


def regret_matching(regrets: list[float]) -> list[float]:
    positive = [r if r > 0.0 else 0.0 for r in regrets]
    total = sum(positive)
    if total <= 0.0:
        return [1.0 / len(regrets)] * len(regrets)
    return [r / total for r in positive]


def _current_strategies(state: CfrState) -> tuple[dict[str, list[float]], dict[str, list[float]]]:
    return tuple(  # type: ignore[return-value]
        {key: regret_matching(r) for key, r in state.regrets[p].items()} for p in PLAYERS
    )


def _update_player(state: CfrState, game: Game, player: int) -> None:
    """
    Update ``player``'s clamped regrets with one exact traversal.

    The same walk adds the opponent's current strategy, which already reflects
    the opponent's latest regret update, into the opponent's strategy sums with
    weight ``iteration``.
    """
    tree = get_game_tree(game)
    nodes = tree.nodes
    strategies = _current_strategies(state)
    weight = float(state.iteration)
    sums = state.strategy_sums[1 - player]
    deltas = {key: [0.0] * len(r) for key, r in state.regrets[player].items()}

    def walk(index: int, reach_opponent: float, reach_chance: float) -> float:
        node = nodes[index]
        p = node.player
        if p == TERMINAL:
            return node.returns[player]
        if reach_opponent == 0.0 or reach_chance == 0.0:
            return 0.0
        if p == CHANCE:
            return sum(
                prob * walk(child, reach_opponent, reach_chance * prob)
                for child, prob in zip(node.children, node.chance_probs)
            )
        sigma = strategies[p][node.key]
        if p != player:
            acc = sums[node.key]
            for k, s in enumerate(sigma):
                acc[k] += weight * reach_opponent * reach_chance * s
            return sum(
                s * walk(child, reach_opponent * s, reach_chance)
                for child, s in zip(node.children, sigma)
            )
        values = [walk(child, reach_opponent, reach_chance) for child in node.children]
        v = sum(s * x for s, x in zip(sigma, values))
        delta = deltas[node.key]
        counterfactual_reach = reach_opponent * reach_chance
        for k, x in enumerate(values):
            delta[k] += counterfactual_reach * (x - v)
        return v

    walk(0, 1.0, 1.0)

    for key, regrets in state.regrets[player].items():
        delta = deltas[key]
        for k in range(len(regrets)):
            regrets[k] = max(regrets[k] + delta[k], 0.0)

    if logger.isEnabledFor(logging.DEBUG):
        for key, regrets in state.regrets[player].items():
            if any(r < 0.0 for r in regrets):
                raise ContractViolation(f"Negative clamped regret at '{key}' (seat {player})")


def cfr_plus_iterate(state: CfrState, game: Game) -> CfrState:
    """Run one alternating-update iteration in place and return ``state``."""
    if state.game_id != game.spec.game_id:
        raise ContractViolation(f"CfrState is for {state.game_id}, not {game.spec.game_id}")
    state.iteration += 1
    for player in PLAYERS:
        _update_player(state, game, player)
    return state


def average_policy(state: CfrState, game: Game) -> tuple[TabularPolicy, TabularPolicy]:
    """Normalized strategy sums per seat; never-visited infostates play uniform."""
    if state.iteration < 1:
        raise ContractViolation("average_policy needs at least one iteration")
    policies = []
    for p in PLAYERS:
        table = {}
        for key, acc in state.strategy_sums[p].items():
            total = sum(acc)
            if total > 0.0:
                table[key] = [x / total for x in acc]
            else:
                table[key] = [1.0 / len(acc)] * len(acc)
        policies.append(TabularPolicy(game, p, table))
    return policies[0], policies[1]


# ── driver ────────────────────────────────────────────────────────────────────


@dataclass
class CfrRun:
    state: CfrState
    policies: tuple[TabularPolicy, TabularPolicy]
    checkpoints: pd.DataFrame
    game_value_estimate: float
    wall_clock_seconds: float


def run_cfr_plus(
    game: Game,
    iterations: int,
    checkpoint_iterations: tuple[int, ...] | list[int] = (),
    output_dir: str | Path | None = None,
) -> CfrRun:
    """
    Run CFR+ for ``iterations`` and measure NashConv at each checkpoint.

    When ``output_dir`` is given, the average policy of every checkpoint and of
    the final iteration is written in the policy file format.
    """
    if iterations < 1:
        raise ConfigurationError(f"iterations must be >= 1, got {iterations}")
    start = time.perf_counter()
    state = CfrState.new(game)
    marks = sorted({t for t in checkpoint_iterations if 1 <= t <= iterations} | {iterations})
    rows = []
    for _ in range(iterations):
        cfr_plus_iterate(state, game)
        if state.iteration in marks:
            profile = average_policy(state, game)
            report = nash_conv(*profile)
            rows.append(
                {
                    "iteration": state.iteration,
                    "nashconv": report.nashconv,
                    "exploitability": report.exploitability,
                    "seconds": time.perf_counter() - start,
                }
            )
            logger.info(
                f"CFR+ {game.spec.game_id} iteration {state.iteration}: "
                f"exploitability {report.exploitability:.3e}"
            )
            if output_dir is not None:
                write_profile(profile, output_dir, tag=f"iter{state.iteration}")

    policies = average_policy(state, game)
    return CfrRun(
        state=state,
        policies=policies,
        checkpoints=pd.DataFrame(rows, columns=["iteration", "nashconv", "exploitability", "seconds"]),
        game_value_estimate=expected_value(*policies)[0],
        wall_clock_seconds=time.perf_counter() - start,
    )


def write_profile(
    profile: tuple[TabularPolicy, TabularPolicy], output_dir: str | Path, tag: str
) -> list[Path]:
    output_dir = Path(output_dir)
    game_id = profile[0].game.spec.game_id
    return [
        save(policy, output_dir / f"cfr_plus_{game_id}_{tag}_seat{policy.player}.policy")
        for policy in profile
    ]
