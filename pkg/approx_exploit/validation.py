"""
Experiment Configuration Schemas
================================
Pydantic schemas for experiment config documents and CLI overrides.

Precedence: CLI flag > config file > defaults.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import NetworkDefaults, ReportConstants, SearchDefaults, Settings
from .exceptions import ConfigurationError
from .games import GAME_IDS
from .harness.agents import is_file_source
from .learning import EvalProtocol, FAConfig, TrainingBudget
from .search import SearchConfig


class SearchConfigModel(BaseModel):
    """IS-MCTS settings"""

    model_config = ConfigDict(extra="forbid")

    num_simulations: Annotated[int, Field(ge=1)] = SearchDefaults.NUM_SIMULATIONS
    uct_c: Annotated[float, Field(gt=0)] = SearchDefaults.UCT_C
    virtual_loss: Annotated[int, Field(ge=0)] = SearchDefaults.VIRTUAL_LOSS
    num_threads: Annotated[int, Field(ge=1)] = Settings.NUM_THREADS
    temperature_moves: Annotated[int, Field(ge=0)] = SearchDefaults.TEMPERATURE_MOVES

    def to_config(self, seed: int) -> SearchConfig:
        return SearchConfig(seed=seed, **self.model_dump())


class FAConfigModel(BaseModel):
    """Evaluator network and learner settings"""

    model_config = ConfigDict(extra="forbid")

    num_layers: Annotated[int, Field(gt=0)] = NetworkDefaults.NUM_LAYERS
    hidden_units: Annotated[int, Field(gt=0)] = NetworkDefaults.HIDDEN_UNITS
    learning_rate: Annotated[float, Field(gt=0)] = NetworkDefaults.LEARNING_RATE
    l2_coefficient: Annotated[float, Field(ge=0)] = NetworkDefaults.L2_COEFFICIENT
    batch_size: Annotated[int, Field(gt=0)] = NetworkDefaults.BATCH_SIZE
    min_buffer_to_learn: Annotated[int, Field(gt=0)] = NetworkDefaults.MIN_BUFFER_TO_LEARN
    actor_batch: Annotated[int, Field(gt=0)] = NetworkDefaults.ACTOR_BATCH

    def to_config(self) -> FAConfig:
        return FAConfig(**self.model_dump())


class TrainingBudgetModel(BaseModel):
    """Episode and/or wall-clock budget for ABR training"""

    model_config = ConfigDict(extra="forbid")

    episodes: Optional[Annotated[int, Field(ge=1)]] = None
    seconds: Optional[Annotated[float, Field(gt=0)]] = None
    num_actors: Annotated[int, Field(ge=1)] = 1
    checkpoint_every: Annotated[int, Field(ge=1)] = NetworkDefaults.CHECKPOINT_EVERY_EPISODES
    replay_capacity: Annotated[int, Field(ge=1)] = NetworkDefaults.REPLAY_CAPACITY

    @model_validator(mode="after")
    def budget_present(self):
        if self.episodes is None and self.seconds is None:
            raise ValueError("Training budget needs episodes or seconds")
        return self

    def to_budget(self) -> TrainingBudget:
        return TrainingBudget(**self.model_dump())


class EvalProtocolModel(BaseModel):
    """ANC evaluation protocol"""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["exact", "sampled"] = "exact"
    num_games: Annotated[int, Field(ge=2)] = ReportConstants.DEFAULT_SAMPLED_GAMES

    def to_protocol(self, seed: int) -> EvalProtocol:
        return EvalProtocol(kind=self.kind, num_games=self.num_games, seed=seed)


class ExperimentConfig(BaseModel):
    """One experiment: game, seat policy sources, search/learning settings, seed"""

    model_config = ConfigDict(extra="forbid")

    game_id: str
    # seat policy sources: "p1" plays seat 0, "p2" seat 1
    seats: dict[Literal["p1", "p2"], str] = Field(
        default_factory=lambda: {"p1": "uniform", "p2": "uniform"}
    )
    # trained exploiter checkpoints by seat ("seat0", "seat1")
    checkpoints: dict[Literal["seat0", "seat1"], str] = Field(default_factory=dict)
    train_seats: list[Literal[0, 1]] = Field(default_factory=lambda: [0, 1])
    evaluator_kind: Literal["tabular", "fa"] = "tabular"
    search: SearchConfigModel = Field(default_factory=SearchConfigModel)
    fa: FAConfigModel = Field(default_factory=FAConfigModel)
    budget: Optional[TrainingBudgetModel] = None
    protocol: EvalProtocolModel = Field(default_factory=EvalProtocolModel)
    cfr_iterations: Annotated[int, Field(ge=1)] = 1000
    cfr_checkpoints: list[Annotated[int, Field(ge=1)]] = Field(default_factory=lambda: [10, 100, 1000])
    match_games: Annotated[int, Field(ge=2)] = ReportConstants.DEFAULT_MATCH_GAMES
    seat_alternation: bool = True
    workers: Annotated[int, Field(ge=1)] = 1
    output_dir: str = Settings.OUTPUT_DIR
    resume_from: Optional[str] = None
    seed: Optional[int] = None

    @field_validator("game_id")
    @classmethod
    def known_game(cls, v):
        if v not in GAME_IDS:
            raise ValueError(f"Unknown game id '{v}'. Must be one of: {', '.join(GAME_IDS)}")
        return v

    @field_validator("seats")
    @classmethod
    def policy_files_exist(cls, v):
        for name, source in v.items():
            source = source.strip()
            target = source[len("abr:"):] if source.startswith("abr:") else source
            if (source.startswith("abr:") or is_file_source(source)) and not Path(target).exists():
                raise ValueError(f"Policy source for {name} does not exist: {target}")
        # a seat left out of the document plays uniform
        return {"p1": "uniform", "p2": "uniform", **v}

    @field_validator("checkpoints")
    @classmethod
    def checkpoints_exist(cls, v):
        for name, path in v.items():
            if not Path(path).exists():
                raise ValueError(f"Checkpoint for {name} does not exist: {path}")
        return v

    @field_validator("resume_from")
    @classmethod
    def resume_exists(cls, v):
        if v is not None and not Path(v).exists():
            raise ValueError(f"Checkpoint to resume from does not exist: {v}")
        return v

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigurationError("This command needs a master seed (--seed or \"seed\" in the config)")
        return self.seed

    def require_budget(self) -> TrainingBudgetModel:
        if self.budget is None:
            raise ConfigurationError("Training needs a budget (--episodes/--seconds or \"budget\")")
        return self.budget


def _sanitize_for_json(obj):
    """Convert an object to a JSON-serializable form. Handles Pydantic error dicts
    whose ctx may contain exception objects (e.g. ValueError)."""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, (list, tuple)):
        return [_sanitize_for_json(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _sanitize_for_json(v) for k, v in obj.items()}
    return str(obj)


def validate_config(data: dict):
    """
    Validate an experiment config document

    Returns:
        Tuple of (config, errors)
        If valid: (config, None)
        If invalid: (None, errors) - errors are JSON-serializable
    """
    try:
        return ExperimentConfig(**data), None
    except Exception as e:
        if hasattr(e, "errors"):
            return None, _sanitize_for_json(e.errors())
        return None, [{"msg": str(e)}]


def _merge(base: dict, overrides: dict) -> dict:
    merged = dict(base)
    for name, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(name), dict):
            merged[name] = _merge(merged[name], value)
        elif isinstance(value, dict):
            merged[name] = _merge({}, value)
        else:
            merged[name] = value
    return merged


def load_experiment_config(path: str | Path | None, overrides: dict | None = None) -> ExperimentConfig:
    """Read the JSON document at ``path`` (if any), apply CLI ``overrides`` and validate."""
    data: dict = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"Config file not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"{path}: invalid JSON ({e})") from e
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path}: the config must be a JSON object")
    config, errors = validate_config(_merge(data, overrides or {}))
    if errors:
        details = "; ".join(
            f"{'.'.join(str(p) for p in err.get('loc', ())) or 'config'}: {err.get('msg')}"
            for err in errors
        )
        raise ConfigurationError(f"Invalid experiment config: {details}")
    return config
