"""
Command-line harness.

Subcommands: ``exact``, ``cfr``, ``abr-train``, ``abr-eval``, ``match``,
``games`` and ``belief``. Each accepts ``--config`` (a JSON experiment
document); flags given on the command line override fields of the document.

Exit codes: 0 success, 1 invariant/contract failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from datetime import datetime, timezone
from functools import wraps
from pathlib import Path

import pandas as pd

from .config import PACKAGE_VERSION, ExitCodes, Settings
from .exceptions import ApproxExploitError, ConfigurationError, ContractViolation, EvaluatorError
from .games import GAME_IDS, InfoStateKey, get_game_tree, load_game
from .harness import build_policy, build_profile, build_report, play_match, write_report
from .learning import anc, load_checkpoint, train_abr
from .policies import UniformPolicy, policy_digest
from .search import posterior
from .solvers import expected_value, nash_conv, run_cfr_plus, write_profile
from .validation import ExperimentConfig, load_experiment_config

logger = logging.getLogger("approx_exploit.cli")


def with_exit_codes(f):
    """Map the exception hierarchy onto the documented exit codes."""

    @wraps(f)
    def decorated_function(*args, **kwargs) -> int:
        try:
            result = f(*args, **kwargs)
            return ExitCodes.OK if result is None else result
        except ConfigurationError as e:
            logger.error(f"Configuration error in {f.__name__}: {e}")
            return ExitCodes.CONFIGURATION_ERROR
        except (ContractViolation, EvaluatorError, AssertionError) as e:
            logger.error(f"Invariant failure in {f.__name__}: {e}")
            return ExitCodes.INVARIANT_FAILURE
        except ApproxExploitError as e:
            logger.error(f"Error in {f.__name__}: {e}")
            return ExitCodes.INVARIANT_FAILURE

    return decorated_function


# ── config assembly ───────────────────────────────────────────────────────────


def _overrides(args: argparse.Namespace) -> dict:
    seats = {"p1": getattr(args, "p1", None), "p2": getattr(args, "p2", None)}
    checkpoints = {
        "seat0": getattr(args, "checkpoint_seat0", None),
        "seat1": getattr(args, "checkpoint_seat1", None),
    }
    search = {
        "num_simulations": getattr(args, "simulations", None),
        "uct_c": getattr(args, "uct_c", None),
        "virtual_loss": getattr(args, "virtual_loss", None),
        "num_threads": getattr(args, "threads", None),
    }
    budget = {
        "episodes": getattr(args, "episodes", None),
        "seconds": getattr(args, "seconds", None),
        "num_actors": getattr(args, "actors", None),
        "checkpoint_every": getattr(args, "checkpoint_every", None),
    }
    protocol = {"kind": getattr(args, "protocol", None), "num_games": getattr(args, "games", None)}
    seats_arg = getattr(args, "seats", None)
    checkpoints_arg = getattr(args, "cfr_checkpoints", None)
    return {
        "game_id": getattr(args, "game", None),
        "seats": seats,
        "checkpoints": checkpoints,
        "search": search,
        "budget": budget if any(v is not None for v in budget.values()) else None,
        "protocol": protocol,
        "evaluator_kind": getattr(args, "evaluator", None),
        "train_seats": [int(s) for s in seats_arg.split(",")] if seats_arg else None,
        "cfr_iterations": getattr(args, "iterations", None),
        "cfr_checkpoints": [int(t) for t in checkpoints_arg.split(",")] if checkpoints_arg else None,
        "match_games": getattr(args, "match_games", None),
        "seat_alternation": False if getattr(args, "no_alternate", False) else None,
        "workers": getattr(args, "workers", None),
        "output_dir": getattr(args, "output_dir", None),
        "resume_from": getattr(args, "resume", None),
        "seed": getattr(args, "seed", None),
    }


def _config(args: argparse.Namespace) -> ExperimentConfig:
    return load_experiment_config(getattr(args, "config", None), _overrides(args))


def _report_path(args: argparse.Namespace, config: ExperimentConfig, name: str) -> Path:
    return Path(args.output) if getattr(args, "output", None) else Path(config.output_dir) / name


def _emit(kind: str, payload: dict, config: ExperimentConfig, args, name: str, started: datetime, t0: float) -> Path:
    report = build_report(
        kind,
        payload,
        config.model_dump(mode="json"),
        config.seed,
        started_at=started,
        wall_clock_seconds=time.perf_counter() - t0,
    )
    return write_report(report, _report_path(args, config, name))


# ── subcommands ───────────────────────────────────────────────────────────────


@with_exit_codes
def cmd_exact(args: argparse.Namespace) -> int:
    started, t0 = datetime.now(timezone.utc), time.perf_counter()
    config = _config(args)
    config.require_seed()
    game = load_game(config.game_id)
    pi_1, pi_2 = build_profile(config.seats["p1"], config.seats["p2"], game)

    game_value = args.game_value
    if game_value is None and all(s.startswith("cfr") for s in config.seats.values()):
        game_value = expected_value(pi_1, pi_2)[0]
    report = nash_conv(pi_1, pi_2, game_value=game_value)
    report.policy_digests = (policy_digest(pi_1), policy_digest(pi_2))

    path = _emit("exact", report.to_dict(), config, args, f"exact_{game.spec.game_id}.json", started, t0)
    print(f"NashConv = {report.nashconv:.6f}  exploitability = {report.exploitability:.6f}")
    if report.per_player_deltas is not None:
        print(f"delta_1 = {report.per_player_deltas[0]:.6f}  delta_2 = {report.per_player_deltas[1]:.6f}")
    else:
        values = report.per_player_br_values
        print(f"br_value_1 = {values[0]:.6f}  br_value_2 = {values[1]:.6f}")
    if report.policy_misses != (0, 0):
        print(f"tabular misses: {report.policy_misses}")
    print(f"report: {path}")
    return ExitCodes.OK


@with_exit_codes
def cmd_cfr(args: argparse.Namespace) -> int:
    started, t0 = datetime.now(timezone.utc), time.perf_counter()
    config = _config(args)
    config.require_seed()
    game = load_game(config.game_id)
    out = Path(config.output_dir)
    run = run_cfr_plus(game, config.cfr_iterations, config.cfr_checkpoints, output_dir=out)
    files = write_profile(run.policies, out, tag="final")
    payload = {
        "game_id": game.spec.game_id,
        "iterations": config.cfr_iterations,
        "game_value_estimate": run.game_value_estimate,
        "checkpoints": run.checkpoints.drop(columns=["seconds"]).to_dict("records"),
        "policy_files": [str(f) for f in files],
        "policy_digests": [policy_digest(p) for p in run.policies],
    }
    path = _emit("cfr", payload, config, args, f"cfr_{game.spec.game_id}.json", started, t0)
    print(run.checkpoints.to_string(index=False))
    print(f"policies: {', '.join(str(f) for f in files)}")
    print(f"report: {path}")
    return ExitCodes.OK


@with_exit_codes
def cmd_abr_train(args: argparse.Namespace) -> int:
    started, t0 = datetime.now(timezone.utc), time.perf_counter()
    config = _config(args)
    seed = config.require_seed()
    budget = config.require_budget().to_budget()
    game = load_game(config.game_id)
    pi_1, pi_2 = build_profile(config.seats["p1"], config.seats["p2"], game)
    search_config = config.search.to_config(seed)
    if config.resume_from is not None and len(config.train_seats) != 1:
        raise ConfigurationError("--resume continues a single seat; pass --seats 0 or --seats 1")

    results = {}
    for seat in config.train_seats:
        opponent = pi_2 if seat == 0 else pi_1
        result = train_abr(
            game,
            seat,
            opponent,
            config.evaluator_kind,
            budget,
            search_config,
            fa_config=config.fa.to_config(),
            seed=seed,
            output_dir=config.output_dir,
            resume_from=config.resume_from,
        )
        results[f"seat{seat}"] = {
            "episodes": result.episodes,
            "steps": result.steps,
            "final_checkpoint": str(result.checkpoints[-1]) if result.checkpoints else None,
            "curve": result.curve.to_dict("records"),
            "diagnostics": result.diagnostics.to_dict(),
        }
        last = result.curve.iloc[-1]
        print(f"seat {seat}: {result.episodes} episodes, mean return {last['mean_return']:.4f}")
    payload = {"game_id": game.spec.game_id, "evaluator_kind": config.evaluator_kind, "seats": results}
    path = _emit("abr-train", payload, config, args, f"abr_train_{game.spec.game_id}.json", started, t0)
    print(f"report: {path}")
    return ExitCodes.OK


@with_exit_codes
def cmd_abr_eval(args: argparse.Namespace) -> int:
    started, t0 = datetime.now(timezone.utc), time.perf_counter()
    config = _config(args)
    seed = config.require_seed()
    game = load_game(config.game_id)
    if set(config.checkpoints) != {"seat0", "seat1"}:
        raise ConfigurationError("abr-eval needs a checkpoint for each seat (--checkpoint-seat0/1)")
    protocol = config.protocol.to_protocol(seed)
    if protocol.kind == "exact" and not game.spec.traversable:
        raise ConfigurationError(
            f"The exact protocol cannot enumerate {game.spec.game_id}; use --protocol sampled"
        )
    pi_1, pi_2 = build_profile(config.seats["p1"], config.seats["p2"], game)
    exploiters = {}
    for name, path in config.checkpoints.items():
        checkpoint = load_checkpoint(path, game)
        if f"seat{checkpoint.seat}" != name:
            raise ConfigurationError(f"Checkpoint {path} was trained for seat {checkpoint.seat}, not {name}")
        exploiters[name] = checkpoint.evaluator

    # seat-1 exploiter targets pi_1, seat-0 exploiter targets pi_2
    report = anc(
        pi_1,
        pi_2,
        exploiters["seat1"],
        exploiters["seat0"],
        protocol,
        config.search.to_config(seed),
        with_nashconv=not args.skip_nashconv,
    )
    payload = report.to_dict()
    payload["evaluator_kinds"] = [exploiters["seat0"].kind, exploiters["seat1"].kind]
    path = _emit("abr-eval", payload, config, args, f"abr_eval_{game.spec.game_id}.json", started, t0)
    line = f"ANC = {report.anc:.6f} ({report.protocol})"
    if report.ci_half_width is not None:
        line += f" ± {report.ci_half_width:.6f}"
    if report.anc_percent is not None:
        line += f"  NashConv = {report.nashconv:.6f}  ANC% = {report.anc_percent:.2f}"
    print(line)
    print(f"report: {path}")
    return ExitCodes.OK


@with_exit_codes
def cmd_match(args: argparse.Namespace) -> int:
    started, t0 = datetime.now(timezone.utc), time.perf_counter()
    config = _config(args)
    seed = config.require_seed()
    game = load_game(config.game_id)
    search_config = config.search.to_config(seed)
    agent_a, agent_b = args.agent_a, args.agent_b
    # agent A in seat 0 faces agent B in seat 1 and vice versa
    a0, b1 = build_profile(agent_a, agent_b, game, search_config)
    b0, a1 = build_profile(agent_b, agent_a, game, search_config)
    report = play_match(
        game,
        (a0, a1),
        (b0, b1),
        num_games=config.match_games,
        seed=seed,
        alternate=config.seat_alternation,
        workers=config.workers,
        names=(agent_a, agent_b),
    )
    path = _emit("match", report.to_dict(), config, args, f"match_{game.spec.game_id}.json", started, t0)
    print(f"{agent_a} vs {agent_b}: {report.mean_a:+.4f} ± {report.ci_half_width:.4f} over {report.num_games} games")
    print(f"report: {path}")
    return ExitCodes.OK


@with_exit_codes
def cmd_games(args: argparse.Namespace) -> int:
    rows = []
    for game_id in GAME_IDS:
        spec = load_game(game_id).spec
        row = {
            "game_id": game_id,
            "max_utility": spec.max_utility,
            "feature_size": spec.feature_size,
            "num_actions": spec.num_distinct_actions,
        }
        if spec.traversable and (args.all or game_id != "tic_tac_toe"):
            tree = get_game_tree(game_id)
            row.update(
                infostates_p1=tree.num_infostates(0),
                infostates_p2=tree.num_infostates(1),
                histories=tree.num_histories,
            )
        else:
            row.update(infostates_p1="n/a", infostates_p2="n/a", histories="n/a")
        rows.append(row)
    print(pd.DataFrame(rows).to_string(index=False))
    return ExitCodes.OK


@with_exit_codes
def cmd_belief(args: argparse.Namespace) -> int:
    game = load_game(args.game)
    seat = args.seat
    if seat not in (0, 1):
        raise ConfigurationError(f"--seat must be 0 or 1, got {seat}")
    opponent = build_policy(args.opponent, game, 1 - seat) if args.opponent else UniformPolicy(game, 1 - seat)
    belief = posterior(InfoStateKey(seat, args.key), opponent)
    frame = pd.DataFrame(belief.as_rows(), columns=["history", "weight"])
    print(f"infostate '{args.key}' (seat {seat}) vs {opponent.describe()}: {len(belief)} histories")
    if belief.degenerate:
        print("degenerate posterior: chance-only weights")
    print(frame.to_string(index=False))
    return ExitCodes.OK


# ── parser ────────────────────────────────────────────────────────────────────


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON experiment config; flags override its fields")
    p.add_argument("--game", choices=GAME_IDS, help="game id")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--output-dir", help=f"output directory (default {Settings.OUTPUT_DIR})")
    p.add_argument("--output", help="report path (default <output-dir>/<command>_<game>.json)")


def _add_profile(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p1", help="policy source for seat 0")
    p.add_argument("--p2", help="policy source for seat 1")


def _add_search(p: argparse.ArgumentParser) -> None:
    p.add_argument("--simulations", type=int, help="simulations per decision")
    p.add_argument("--uct-c", type=float, help="PUCT exploration constant")
    p.add_argument("--virtual-loss", type=int, help="virtual loss per in-flight simulation")
    p.add_argument("--threads", type=int, help="simulation threads per search")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="approx-exploit",
        description="Exact and approximate exploitability of policies in two-player zero-sum games.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {PACKAGE_VERSION}")
    parser.add_argument("--log-level", default=Settings.LOG_LEVEL, help="logging level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact NashConv of a policy profile")
    _add_common(p)
    _add_profile(p)
    p.add_argument("--game-value", type=float, help="known game value for seat 0 (enables deltas)")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("cfr", help="solve a game with CFR+ and write the average policies")
    _add_common(p)
    p.add_argument("--iterations", type=int, help="CFR+ iterations")
    p.add_argument("--cfr-checkpoints", help="comma-separated iterations to measure, e.g. 10,100,1000")
    p.set_defaults(func=cmd_cfr)

    p = sub.add_parser("abr-train", help="train ABR exploiters against a profile")
    _add_common(p)
    _add_profile(p)
    _add_search(p)
    p.add_argument("--evaluator", choices=("tabular", "fa"), help="evaluator kind")
    p.add_argument("--seats", help="comma-separated exploiter seats (default 0,1)")
    p.add_argument("--episodes", type=int, help="episode budget per seat")
    p.add_argument("--seconds", type=float, help="wall-clock budget per seat")
    p.add_argument("--actors", type=int, help="actor threads")
    p.add_argument("--checkpoint-every", type=int, help="episodes between checkpoints")
    p.add_argument("--resume", help="checkpoint to continue from")
    p.set_defaults(func=cmd_abr_train)

    p = sub.add_parser("abr-eval", help="ANC of a profile from trained exploiters")
    _add_common(p)
    _add_profile(p)
    _add_search(p)
    p.add_argument("--checkpoint-seat0", help="exploiter checkpoint playing seat 0")
    p.add_argument("--checkpoint-seat1", help="exploiter checkpoint playing seat 1")
    p.add_argument("--protocol", choices=("exact", "sampled"), help="evaluation protocol")
    p.add_argument("--games", type=int, help="games per seat for the sampled protocol")
    p.add_argument("--skip-nashconv", action="store_true", help="do not compute exact NashConv")
    p.set_defaults(func=cmd_abr_eval)

    p = sub.add_parser("match", help="head-to-head match between two agents")
    _add_common(p)
    _add_search(p)
    p.add_argument("--agent-a", required=True, help="policy source of the row agent")
    p.add_argument("--agent-b", required=True, help="policy source of the column agent")
    p.add_argument("--match-games", type=int, help="number of games (default 1024)")
    p.add_argument("--no-alternate", action="store_true", help="keep agent A in seat 0")
    p.add_argument("--workers", type=int, help="games played in parallel")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("games", help="list built-in games with their sizes")
    p.add_argument("--all", action="store_true", help="also traverse tic_tac_toe (slow)")
    p.set_defaults(func=cmd_games)

    p = sub.add_parser("belief", help="print the posterior behind one infostate")
    p.add_argument("--game", choices=GAME_IDS, required=True)
    p.add_argument("--seat", type=int, required=True, help="searching seat (0 or 1)")
    p.add_argument("--key", required=True, help="observation string, e.g. 'Kh|r'")
    p.add_argument("--opponent", help="opponent policy source (default uniform)")
    p.set_defaults(func=cmd_belief)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format=Settings.LOG_FORMAT,
        datefmt=Settings.LOG_DATEFMT,
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
