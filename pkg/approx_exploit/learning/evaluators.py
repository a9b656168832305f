"""
Evaluators: the (prior, value) oracle that guides the search.

Two kinds are provided. The tabular evaluator keeps running means per
information state; the function-approximation evaluator wraps an
:class:`~approx_exploit.learning.network.MLPParams` snapshot that the learner
replaces atomically after every gradient step.
"""

from __future__ import annotations

import logging
import threading
from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..config import Tolerances
from ..exceptions import ConfigurationError, EvaluatorError
from ..games import GameSpec
from .network import FAConfig, LossParts, MLPParams, check_finite, forward, loss_and_gradients, sgd_step

logger = logging.getLogger(__name__)

EVALUATOR_KINDS = ("tabular", "fa")


@dataclass(frozen=True)
class EvaluatorOutput:
    prior: np.ndarray
    value: float

    def validate(self, legal: Sequence[int]) -> None:
        if len(self.prior) != len(legal):
            raise EvaluatorError(f"Evaluator returned {len(self.prior)} priors for {len(legal)} actions")
        if not np.all(np.isfinite(self.prior)) or np.any(self.prior < 0):
            raise EvaluatorError("Evaluator returned negative or non-finite priors")
        if abs(float(self.prior.sum()) - 1.0) > Tolerances.PRIOR_SUM:
            raise EvaluatorError(f"Evaluator priors sum to {float(self.prior.sum())!r}")
        if not -1.0 <= self.value <= 1.0:
            raise EvaluatorError(f"Evaluator value {self.value!r} outside [-1, 1]")


@dataclass(frozen=True)
class TrainingExample:
    key: str
    features: np.ndarray
    legal: tuple[int, ...]
    target_policy: np.ndarray
    target_return: float


class Evaluator(ABC):
    kind: str = ""

    def __init__(self, spec: GameSpec):
        self.spec = spec

    @abstractmethod
    def evaluate(self, features: np.ndarray, key: str, legal: Sequence[int]) -> EvaluatorOutput: ...

    @abstractmethod
    def learn(self, batch: Sequence[TrainingExample]) -> LossParts | None:
        """Consume a batch; returns the loss decomposition when one exists."""


# ── tabular ───────────────────────────────────────────────────────────────────


class TabularEvaluator(Evaluator):
    """Running-mean value and prior per key; (uniform, 0) on a miss."""

    kind = "tabular"

    def __init__(self, spec: GameSpec):
        super().__init__(spec)
        # key -> [count, value_mean, prior_mean]
        self.table: dict[str, list] = {}
        self._lock = threading.Lock()

    def evaluate(self, features: np.ndarray, key: str, legal: Sequence[int]) -> EvaluatorOutput:
        entry = self.table.get(key)
        if entry is None or len(entry[2]) != len(legal):
            return EvaluatorOutput(np.full(len(legal), 1.0 / len(legal)), 0.0)
        prior = entry[2]
        return EvaluatorOutput(prior / prior.sum(), float(entry[1]))

    def learn(self, batch: Sequence[TrainingExample]) -> None:
        with self._lock:
            tabular_update(self.table, batch)
        return None


def tabular_update(table: dict[str, list], batch: Sequence[TrainingExample]) -> None:
    """Fold each example into the running means of its key."""
    for ex in batch:
        entry = table.get(ex.key)
        target = np.asarray(ex.target_policy, dtype=np.float64)
        if entry is None:
            table[ex.key] = [1, float(ex.target_return), target.copy()]
            continue
        count = entry[0] + 1
        value = entry[1] + (ex.target_return - entry[1]) / count
        prior = entry[2] + (target - entry[2]) / count
        table[ex.key] = [count, value, prior / prior.sum()]


# ── function approximation ────────────────────────────────────────────────────


class MLPEvaluator(Evaluator):
    kind = "fa"

    def __init__(self, spec: GameSpec, config: FAConfig, params: MLPParams | None = None, seed: int = 0):
        super().__init__(spec)
        self.config = config
        if params is None:
            params = MLPParams.initialize(spec.feature_size, spec.num_distinct_actions, config, seed)
        if params.input_size != spec.feature_size or params.num_actions != spec.num_distinct_actions:
            raise ConfigurationError(
                f"Network shape {params.input_size}->{params.num_actions} does not fit "
                f"{spec.game_id} ({spec.feature_size}->{spec.num_distinct_actions})"
            )
        self._params = params
        self.step = 0

    @property
    def params(self) -> MLPParams:
        return self._params

    def publish(self, params: MLPParams) -> None:
        self._params = params

    def evaluate(self, features: np.ndarray, key: str, legal: Sequence[int]) -> EvaluatorOutput:
        mask = np.zeros((1, self.spec.num_distinct_actions), dtype=bool)
        mask[0, list(legal)] = True
        probs, values, _ = forward(self._params, np.asarray(features)[None, :], mask)
        prior = probs[0, list(legal)]
        return EvaluatorOutput(prior / prior.sum(), float(values[0]))

    def learn(self, batch: Sequence[TrainingExample]) -> LossParts:
        params, parts = train_step(self._params, batch, self.config, self.spec.num_distinct_actions)
        self.step += 1
        self.publish(params)
        return parts


def stack_batch(
    batch: Sequence[TrainingExample], num_actions: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Dense arrays (features, mask, target policy, target value) for a batch."""
    size = len(batch)
    features = np.stack([ex.features for ex in batch])
    mask = np.zeros((size, num_actions), dtype=bool)
    policy = np.zeros((size, num_actions))
    for row, ex in enumerate(batch):
        mask[row, list(ex.legal)] = True
        policy[row, list(ex.legal)] = ex.target_policy
    values = np.array([ex.target_return for ex in batch], dtype=np.float64)
    return features, mask, policy, values


def train_step(
    params: MLPParams, batch: Sequence[TrainingExample], config: FAConfig, num_actions: int
) -> tuple[MLPParams, LossParts]:
    """One gradient-descent step at ``config.learning_rate``; returns new params and the loss parts."""
    if not batch:
        raise ConfigurationError("train_step needs a non-empty batch")
    features, mask, policy, values = stack_batch(batch, num_actions)
    parts, grads = loss_and_gradients(params, features, mask, policy, values, config.l2_coefficient)
    check_finite(parts)
    return sgd_step(params, grads, config.learning_rate), parts


def make_evaluator(
    kind: str, spec: GameSpec, config: FAConfig | None = None, seed: int = 0
) -> Evaluator:
    if kind == "tabular":
        return TabularEvaluator(spec)
    if kind == "fa":
        return MLPEvaluator(spec, config or FAConfig(), seed=seed)
    raise ConfigurationError(
        f"Unknown evaluator kind '{kind}'. Must be one of: {', '.join(EVALUATOR_KINDS)}"
    )


def evaluate(evaluator: Evaluator, features: np.ndarray, key: str, legal: Sequence[int]) -> EvaluatorOutput:
    if not legal:
        raise ConfigurationError("evaluate needs a non-empty legal action list")
    return evaluator.evaluate(features, key, legal)
