"""
Evaluator checkpoints.

* Network evaluators: ``.npz`` archive holding the format version, game id,
  seat, the FAConfig as JSON, learner step, episode count and the parameter
  tensors in declared layer order (``tensor_000``, ``tensor_001``...).
* Tabular evaluators: the policy file format with kind ``tabular_evaluator``
  and two extra columns per row, the value mean and the observation count.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..config import ReportConstants, Tolerances
from ..exceptions import ConfigurationError, PolicyFormatError
from ..games import Game
from ..policies.policy_io import check_header, format_probability, format_vector, parse_vector, read_table, write_table
from .evaluators import Evaluator, MLPEvaluator, TabularEvaluator
from .network import FAConfig, MLPParams

logger = logging.getLogger(__name__)

TABULAR_SUFFIX = ".table"
NETWORK_SUFFIX = ".npz"


@dataclass
class Checkpoint:
    evaluator: Evaluator
    seat: int
    step: int
    episodes: int
    path: Path


def checkpoint_suffix(evaluator: Evaluator) -> str:
    return NETWORK_SUFFIX if isinstance(evaluator, MLPEvaluator) else TABULAR_SUFFIX


def save_checkpoint(
    evaluator: Evaluator, path: str | Path, seat: int, step: int, episodes: int
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(evaluator, MLPEvaluator):
        tensors = {f"tensor_{k:03d}": t for k, t in enumerate(evaluator.params.tensors())}
        with path.open("wb") as fh:
            np.savez(
                fh,
                format_version=np.int64(ReportConstants.CHECKPOINT_FORMAT_VERSION),
                game_id=np.str_(evaluator.spec.game_id),
                seat=np.int64(seat),
                fa_config=np.str_(json.dumps(asdict(evaluator.config), sort_keys=True)),
                step=np.int64(step),
                episodes=np.int64(episodes),
                **tensors,
            )
    elif isinstance(evaluator, TabularEvaluator):
        header = {
            "format_version": ReportConstants.CHECKPOINT_FORMAT_VERSION,
            "game_id": evaluator.spec.game_id,
            "player": seat,
            "kind": "tabular_evaluator",
            "step": step,
            "episodes": episodes,
        }
        table = dict(evaluator.table)
        rows = (
            (key, format_vector(table[key][2]), format_probability(table[key][1]), str(table[key][0]))
            for key in sorted(table)
        )
        path.write_text(write_table(header, rows), encoding="utf-8", newline="\n")
    else:
        raise ConfigurationError(f"Cannot checkpoint a {type(evaluator).__name__}")
    logger.info(f"Saved {evaluator.kind} checkpoint (step {step}, {episodes} episodes) to {path}")
    return path


def load_checkpoint(path: str | Path, game: Game) -> Checkpoint:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"Checkpoint not found: {path}")
    if path.suffix == NETWORK_SUFFIX:
        return _load_network(path, game)
    return _load_tabular(path, game)


def _load_network(path: Path, game: Game) -> Checkpoint:
    try:
        with np.load(path, allow_pickle=False) as data:
            version = int(data["format_version"])
            if version != ReportConstants.CHECKPOINT_FORMAT_VERSION:
                raise PolicyFormatError(f"{path}: checkpoint format_version {version} is not supported")
            file_game = str(data["game_id"])
            if file_game != game.spec.game_id:
                raise PolicyFormatError(f"{path}: checkpoint is for '{file_game}', not '{game.spec.game_id}'")
            config = FAConfig(**json.loads(str(data["fa_config"])))
            names = sorted(n for n in data.files if n.startswith("tensor_"))
            params = MLPParams.from_tensors([data[n].astype(np.float64) for n in names])
            seat, step, episodes = int(data["seat"]), int(data["step"]), int(data["episodes"])
    except (KeyError, ValueError, OSError) as e:
        raise PolicyFormatError(f"{path}: malformed network checkpoint ({e})") from e
    evaluator = MLPEvaluator(game.spec, config, params=params)
    evaluator.step = step
    return Checkpoint(evaluator, seat, step, episodes, path)


def _load_tabular(path: Path, game: Game) -> Checkpoint:
    header, rows = read_table(path)
    check_header(header, path, game, ReportConstants.CHECKPOINT_FORMAT_VERSION)
    if header.get("kind") != "tabular_evaluator":
        raise PolicyFormatError(f"{path}: not a tabular evaluator checkpoint")
    evaluator = TabularEvaluator(game.spec)
    for cols in rows:
        if len(cols) != 4:
            raise PolicyFormatError(f"{path}: expected 4 columns at key '{cols[0]}'")
        key = cols[0]
        prior = parse_vector(cols[1], path, key)
        try:
            value, count = float(cols[2]), int(cols[3])
        except ValueError as e:
            raise PolicyFormatError(f"{path}: bad value/count at key '{key}'") from e
        if abs(prior.sum() - 1.0) > Tolerances.PRIOR_SUM or not -1.0 <= value <= 1.0:
            raise PolicyFormatError(f"{path}: invalid prior or value at key '{key}'")
        evaluator.table[key] = [count, value, prior]
    try:
        seat, step, episodes = int(header["player"]), int(header["step"]), int(header["episodes"])
    except (KeyError, ValueError) as e:
        raise PolicyFormatError(f"{path}: missing or invalid player/step/episodes header") from e
    return Checkpoint(evaluator, seat, step, episodes, path)
