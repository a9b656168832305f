"""
Head-to-head matches.

Games alternate seats (agent A in seat 0 on even games, seat 1 on odd games)
and the two games of each pair share a chance seed. Results are aggregated in
game order, so the report does not depend on how games were scheduled.
"""

from __future__ import annotations

import hashlib
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from ..config import ReportConstants
from ..exceptions import ConfigurationError
from ..games import CHANCE, TERMINAL, Game
from ..policies import Policy
from ..search.abr_search import sample_action

logger = logging.getLogger(__name__)


@dataclass
class MatchReport:
    game_id: str
    agent_a: str
    agent_b: str
    num_games: int
    mean_a: float
    mean_b: float
    ci_half_width: float
    seat_alternation: bool
    # agent A's mean return with A in seat 0 / seat 1
    per_seat_means: tuple[float, float | None]
    log_digest: str
    wall_clock_seconds: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def ci_contains_zero(self) -> bool:
        return abs(self.mean_a) <= self.ci_half_width


def play_game(
    game: Game, policies: tuple[Policy, Policy], rng: np.random.Generator
) -> tuple[tuple[float, float], tuple[int, ...]]:
    """Play one game between seat policies; returns (returns, action ids)."""
    h = game.new_initial_state()
    while True:
        player = game.current_player(h)
        if player == TERMINAL:
            return game.returns(h), h.action_ids
        if player == CHANCE:
            outcomes = game.chance_outcomes(h)
            action = sample_action([a for a, _ in outcomes], [p for _, p in outcomes], rng)
        else:
            legal = game.legal_actions(h)
            probs = policies[player].action_probabilities(game.infostate_key(h, player), legal)
            action = sample_action(legal, probs, rng)
        h = game.apply_unchecked(h, player, action)


def play_match(
    game: Game,
    agent_a: tuple[Policy, Policy],
    agent_b: tuple[Policy, Policy],
    num_games: int = ReportConstants.DEFAULT_MATCH_GAMES,
    seed: int = 0,
    alternate: bool = True,
    workers: int = 1,
    names: tuple[str, str] = ("A", "B"),
) -> MatchReport:
    """``agent_a``/``agent_b`` hold each agent's policy for seat 0 and seat 1."""
    if num_games < 2:
        raise ConfigurationError(f"A match needs at least 2 games, got {num_games}")
    start = time.perf_counter()
    pairs = (num_games + 1) // 2 if alternate else num_games
    seeds = np.random.SeedSequence(seed).spawn(pairs)

    def run(index: int) -> tuple[int, float, tuple[int, ...]]:
        a_seat = index % 2 if alternate else 0
        seat_policies = (agent_a[0], agent_b[1]) if a_seat == 0 else (agent_b[0], agent_a[1])
        rng = np.random.default_rng(seeds[index // 2 if alternate else index])
        returns, actions = play_game(game, seat_policies, rng)
        return a_seat, returns[a_seat], actions

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(num_games)))
    else:
        results = [run(i) for i in range(num_games)]

    frame = pd.DataFrame(
        {"a_seat": [r[0] for r in results], "return_a": [r[1] for r in results]}
    )
    mean_a = float(frame["return_a"].mean())
    half_width = ReportConstants.CI_Z * float(frame["return_a"].std(ddof=1)) / math.sqrt(num_games)
    by_seat = frame.groupby("a_seat")["return_a"].mean()
    per_seat = (float(by_seat.get(0, float("nan"))), float(by_seat[1]) if 1 in by_seat.index else None)

    digest = hashlib.sha256()
    for index, (a_seat, value, actions) in enumerate(results):
        digest.update(f"{index},{a_seat},{value!r},{' '.join(map(str, actions))}\n".encode())

    report = MatchReport(
        game_id=game.spec.game_id,
        agent_a=names[0],
        agent_b=names[1],
        num_games=num_games,
        mean_a=mean_a,
        mean_b=-mean_a,
        ci_half_width=half_width,
        seat_alternation=alternate,
        per_seat_means=per_seat,
        log_digest=digest.hexdigest(),
        wall_clock_seconds=time.perf_counter() - start,
    )
    logger.info(
        f"Match {names[0]} vs {names[1]} ({game.spec.game_id}, {num_games} games): "
        f"{mean_a:+.4f} ± {half_width:.4f}"
    )
    return report
