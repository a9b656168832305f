"""
Policy sources.

A source string names where a seat's policy comes from:

* ``uniform`` / ``uniform_random``
* a fixed rule: ``always_fold``, ``always_call``, ``first_legal``
* ``cfr:<iterations>`` (also ``cfr<iterations>``): the CFR+ average policy
* ``perturb:<epsilon>:<seed>:<source>``: a tabulated source mixed with noise
* ``abr:<checkpoint>``: a trained evaluator playing with search
* anything else: a policy file
"""

from __future__ import annotations

import logging
import re
from functools import lru_cache
from pathlib import Path

from ..exceptions import ConfigurationError
from ..games import Game, load_game
from ..learning import load_checkpoint
from ..policies import FIXED_RULES, FixedRulePolicy, Policy, TabularPolicy, UniformPolicy, load, perturb, tabulate
from ..search import SearchBackedPolicy, SearchConfig
from ..solvers import run_cfr_plus

logger = logging.getLogger(__name__)

_CFR_PATTERN = re.compile(r"^cfr[:{]?(\d+)\}?$")
BUILTIN_SOURCES = ("uniform", "uniform_random") + FIXED_RULES


def is_file_source(source: str) -> bool:
    return not (
        source in BUILTIN_SOURCES
        or _CFR_PATTERN.match(source)
        or source.startswith("abr:")
        or source.startswith("perturb:")
    )


@lru_cache(maxsize=8)
def _solved_tables(game_id: str, iterations: int) -> tuple[dict, ...]:
    logger.info(f"Solving {game_id} with {iterations} CFR+ iterations")
    run = run_cfr_plus(load_game(game_id), iterations)
    return tuple(dict(policy.table) for policy in run.policies)


def cfr_profile(game: Game, iterations: int) -> tuple[TabularPolicy, TabularPolicy]:
    """CFR+ average profile; the solve is cached, each call gets fresh policies."""
    tables = _solved_tables(game.spec.game_id, iterations)
    return TabularPolicy(game, 0, tables[0]), TabularPolicy(game, 1, tables[1])


def build_policy(
    source: str,
    game: Game,
    seat: int,
    search_config: SearchConfig | None = None,
    opponent_model: Policy | None = None,
) -> Policy:
    """Resolve ``source`` into the policy seat ``seat`` plays."""
    source = source.strip()
    if source in ("uniform", "uniform_random"):
        return UniformPolicy(game, seat)
    if source in FIXED_RULES:
        return FixedRulePolicy(game, seat, source)
    if match := _CFR_PATTERN.match(source):
        iterations = int(match.group(1))
        if iterations < 1:
            raise ConfigurationError(f"CFR+ source needs >= 1 iteration: '{source}'")
        return cfr_profile(game, iterations)[seat]
    if source.startswith("perturb:"):
        try:
            _, epsilon, seed, inner = source.split(":", 3)
            epsilon_value, seed_value = float(epsilon), int(seed)
        except ValueError as e:
            raise ConfigurationError(
                f"Perturbed source must look like perturb:<epsilon>:<seed>:<source>, got '{source}'"
            ) from e
        base = build_policy(inner, game, seat, search_config, opponent_model)
        if not isinstance(base, TabularPolicy):
            base = tabulate(base, game, seat)
        return perturb(base, epsilon_value, seed_value)
    if source.startswith("abr:"):
        checkpoint = load_checkpoint(source[len("abr:"):], game)
        if checkpoint.seat != seat:
            raise ConfigurationError(
                f"Checkpoint {checkpoint.path} was trained for seat {checkpoint.seat}, not {seat}"
            )
        model = opponent_model or UniformPolicy(game, 1 - seat)
        return SearchBackedPolicy(seat, checkpoint.evaluator, model, search_config or SearchConfig())

    path = Path(source)
    if not path.exists():
        raise ConfigurationError(
            f"Unknown policy source '{source}': not a builtin ({', '.join(BUILTIN_SOURCES)}), "
            "cfr:<n>, perturb:..., abr:<checkpoint> or an existing file"
        )
    policy = load(path, game)
    if policy.player is not None and policy.player != seat:
        raise ConfigurationError(f"Policy file {path} is for seat {policy.player}, not seat {seat}")
    if policy.player is None:
        policy.player = seat
    return policy


def build_profile(
    p1: str, p2: str, game: Game, search_config: SearchConfig | None = None
) -> tuple[Policy, Policy]:
    """
    Policies for seat 0 (``p1``) and seat 1 (``p2``).

    A search-backed seat uses the other seat's policy as its belief model,
    or uniform when that seat is search-backed too.
    """
    sources = (p1, p2)
    policies: list[Policy | None] = [None, None]
    for seat in (0, 1):
        if not sources[seat].strip().startswith("abr:"):
            policies[seat] = build_policy(sources[seat], game, seat, search_config)
    for seat in (0, 1):
        if policies[seat] is None:
            other = policies[1 - seat]
            model = None if isinstance(other, SearchBackedPolicy) else other
            policies[seat] = build_policy(sources[seat], game, seat, search_config, opponent_model=model)
    return policies[0], policies[1]  # type: ignore[return-value]
