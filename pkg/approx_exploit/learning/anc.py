"""
Approximate NashConv: NashConv with trained ABR exploiters in place of exact
best responses.

``exact`` protocol: each exploiter is frozen into a deterministic greedy
tabular policy over the infostates it can reach and evaluated exactly, so
ANC <= NashConv holds with no noise. ``sampled`` protocol: seeded games per
seat, mean and 95% confidence interval.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from ..config import ReportConstants
from ..exceptions import ConfigurationError, ContractViolation
from ..games import CHANCE, TERMINAL, Game, History
from ..policies import Policy, TabularPolicy
from ..search import SearchBackedPolicy, SearchConfig, SearchDiagnostics, play_episode
from ..solvers import expected_value, nash_conv

logger = logging.getLogger(__name__)

PROTOCOLS = ("exact", "sampled")


@dataclass(frozen=True)
class EvalProtocol:
    kind: str = "exact"
    num_games: int = ReportConstants.DEFAULT_SAMPLED_GAMES
    seed: int = 0

    def __post_init__(self):
        if self.kind not in PROTOCOLS:
            raise ConfigurationError(f"Unknown protocol '{self.kind}'. Must be one of: {', '.join(PROTOCOLS)}")
        if self.num_games < 2:
            raise ConfigurationError("The sampled protocol needs at least 2 games per seat")


@dataclass
class AncReport:
    game_id: str
    protocol: str
    anc: float
    per_seat_values: tuple[float, float]
    nashconv: float | None = None
    anc_percent: float | None = None
    ci_half_width: float | None = None
    per_seat_ci: tuple[float, float] | None = None
    num_games: int | None = None
    # seat -> {"win": f, "draw": f, "loss": f} for the exploiter (sampled only)
    outcomes: dict = field(default_factory=dict)
    frozen_infostates: tuple[int, int] | None = None
    policy_misses: tuple[int, int] = (0, 0)
    diagnostics: dict = field(default_factory=dict)
    wall_clock_seconds: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def freeze_greedy(
    game: Game, seat: int, pi_opponent: Policy, evaluator, config: SearchConfig
) -> tuple[TabularPolicy, SearchBackedPolicy]:
    """
    Enumerate every infostate of ``seat`` reachable under (greedy ABR,
    ``pi_opponent``, chance) and record the searched action one-hot.
    """
    player = SearchBackedPolicy(seat, evaluator, pi_opponent, config)
    table: dict[str, np.ndarray] = {}
    opponent = 1 - seat

    def walk(h: History) -> None:
        p = game.current_player(h)
        if p == TERMINAL:
            return
        if p == CHANCE:
            for a, prob in game.chance_outcomes(h):
                if prob > 0.0:
                    walk(game.apply_unchecked(h, CHANCE, a))
            return
        legal = game.legal_actions(h)
        if p == opponent:
            probs = pi_opponent.action_probabilities(game.infostate_key(h, opponent), legal)
            for a, prob in zip(legal, probs):
                if prob > 0.0:
                    walk(game.apply_unchecked(h, opponent, a))
            return
        key = game.infostate_key(h, seat)
        one_hot = player.action_probabilities(key, legal)
        table.setdefault(key.observation_string, one_hot)
        walk(game.apply_unchecked(h, seat, legal[int(np.argmax(one_hot))]))

    walk(game.new_initial_state())
    logger.info(f"Froze seat {seat} ABR over {len(table)} reachable infostates")
    return TabularPolicy(game, seat, table), player


def anc(
    pi_1: Policy,
    pi_2: Policy,
    trained_abr_1,
    trained_abr_2,
    eval_protocol: EvalProtocol,
    search_config: SearchConfig,
    with_nashconv: bool = True,
) -> AncReport:
    """
    ANC of the profile (``pi_1`` in seat 0, ``pi_2`` in seat 1).

    ``trained_abr_1`` exploits ``pi_1`` from seat 1 and ``trained_abr_2``
    exploits ``pi_2`` from seat 0; ANC is the sum of the exploiters' values.
    """
    game = pi_1.game
    if pi_2.game.spec.game_id != game.spec.game_id:
        raise ConfigurationError("ANC policies belong to different games")
    start = time.perf_counter()
    if eval_protocol.kind == "exact":
        report = _anc_exact(game, pi_1, pi_2, trained_abr_1, trained_abr_2, search_config)
    else:
        report = _anc_sampled(game, pi_1, pi_2, trained_abr_1, trained_abr_2, search_config, eval_protocol)

    if with_nashconv and game.spec.traversable:
        report.nashconv = nash_conv(pi_1, pi_2).nashconv
        if report.nashconv > 0:
            report.anc_percent = 100.0 * report.anc / report.nashconv
    report.wall_clock_seconds = time.perf_counter() - start
    if (
        report.protocol == "exact"
        and report.nashconv is not None
        and report.anc > report.nashconv + 1e-9
    ):
        raise ContractViolation(
            f"ANC {report.anc!r} exceeds NashConv {report.nashconv!r} under the exact protocol"
        )
    logger.info(f"ANC({game.spec.game_id}, {report.protocol}) = {report.anc:.6g}")
    return report


def _anc_exact(game, pi_1, pi_2, trained_abr_1, trained_abr_2, config) -> AncReport:
    if not game.spec.traversable:
        raise ConfigurationError(
            f"The exact ANC protocol cannot enumerate {game.spec.game_id}; use the sampled protocol"
        )
    frozen_0, searcher_0 = freeze_greedy(game, 0, pi_2, trained_abr_2, config)
    frozen_1, searcher_1 = freeze_greedy(game, 1, pi_1, trained_abr_1, config)
    v0 = expected_value(frozen_0, pi_2)[0]
    v1 = expected_value(pi_1, frozen_1)[1]
    diagnostics = SearchDiagnostics()
    diagnostics.merge(searcher_0.diagnostics)
    diagnostics.merge(searcher_1.diagnostics)
    return AncReport(
        game_id=game.spec.game_id,
        protocol="exact",
        anc=v0 + v1,
        per_seat_values=(v0, v1),
        frozen_infostates=(len(frozen_0), len(frozen_1)),
        policy_misses=(frozen_0.misses, frozen_1.misses),
        diagnostics=diagnostics.to_dict(),
    )


def _anc_sampled(game, pi_1, pi_2, trained_abr_1, trained_abr_2, config, protocol: EvalProtocol) -> AncReport:
    matchups = ((0, pi_2, trained_abr_2), (1, pi_1, trained_abr_1))
    means, variances, outcomes = [], [], {}
    diagnostics = SearchDiagnostics()
    for seat, opponent_policy, evaluator in matchups:
        seeds = np.random.SeedSequence([protocol.seed, seat]).spawn(protocol.num_games)
        returns = np.empty(protocol.num_games)
        for k, s in enumerate(seeds):
            result = play_episode(
                seat, opponent_policy, evaluator, config, np.random.default_rng(s), training=False
            )
            returns[k] = result.episode_return
            diagnostics.merge(result.diagnostics)
        means.append(float(returns.mean()))
        variances.append(float(returns.var(ddof=1)) / protocol.num_games)
        outcomes[seat] = {
            "win": float(np.mean(returns > 0)),
            "draw": float(np.mean(returns == 0)),
            "loss": float(np.mean(returns < 0)),
        }
    z = ReportConstants.CI_Z
    return AncReport(
        game_id=game.spec.game_id,
        protocol="sampled",
        anc=means[0] + means[1],
        per_seat_values=(means[0], means[1]),
        ci_half_width=z * math.sqrt(variances[0] + variances[1]),
        per_seat_ci=(z * math.sqrt(variances[0]), z * math.sqrt(variances[1])),
        num_games=protocol.num_games,
        outcomes=outcomes,
        diagnostics=diagnostics.to_dict(),
    )
