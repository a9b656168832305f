"""
Dense policy/value network with hand-written backpropagation.

Architecture: ``num_layers`` ReLU layers of ``hidden_units`` each, then a
policy head (one logit per distinct action id, masked softmax over the legal
ones) and a scalar value head squashed with tanh into [-1, 1].

Loss per batch (means over examples)::

    (z - v)^2  -  sum_a pi(a) log p(a)  +  c * ||theta||^2

minimized by plain gradient descent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import NetworkDefaults
from ..exceptions import ConfigurationError, EvaluatorError


@dataclass(frozen=True)
class FAConfig:
    num_layers: int = NetworkDefaults.NUM_LAYERS
    hidden_units: int = NetworkDefaults.HIDDEN_UNITS
    learning_rate: float = NetworkDefaults.LEARNING_RATE
    l2_coefficient: float = NetworkDefaults.L2_COEFFICIENT
    batch_size: int = NetworkDefaults.BATCH_SIZE
    min_buffer_to_learn: int = NetworkDefaults.MIN_BUFFER_TO_LEARN
    actor_batch: int = NetworkDefaults.ACTOR_BATCH

    def __post_init__(self):
        for name in ("num_layers", "hidden_units", "batch_size", "min_buffer_to_learn", "actor_batch"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"FAConfig.{name} must be positive")
        if self.learning_rate <= 0:
            raise ConfigurationError("FAConfig.learning_rate must be positive")
        if self.l2_coefficient < 0:
            raise ConfigurationError("FAConfig.l2_coefficient must be non-negative")


@dataclass(frozen=True)
class LossParts:
    mse: float
    ce: float
    l2: float

    @property
    def total(self) -> float:
        return self.mse + self.ce + self.l2


class MLPParams:
    """
    Parameter tensors in declared order: hidden layers, policy head, value head.

    Instances are treated as immutable snapshots; :func:`train_step` returns a
    new one.
    """

    __slots__ = ("weights", "biases")

    def __init__(self, weights: list[np.ndarray], biases: list[np.ndarray]):
        if len(weights) != len(biases) or len(weights) < 3:
            raise ConfigurationError("MLPParams needs matching weights/biases for >= 1 hidden layer")
        self.weights = weights
        self.biases = biases

    @classmethod
    def initialize(
        cls, input_size: int, num_actions: int, config: FAConfig, seed: int
    ) -> MLPParams:
        rng = np.random.default_rng(seed)
        sizes = [input_size] + [config.hidden_units] * config.num_layers
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        hidden = sizes[-1]
        weights.append(rng.normal(0.0, np.sqrt(1.0 / hidden), size=(hidden, num_actions)))
        biases.append(np.zeros(num_actions))
        weights.append(rng.normal(0.0, np.sqrt(1.0 / hidden), size=(hidden, 1)))
        biases.append(np.zeros(1))
        return cls(weights, biases)

    @property
    def num_hidden(self) -> int:
        return len(self.weights) - 2

    @property
    def input_size(self) -> int:
        return self.weights[0].shape[0]

    @property
    def num_actions(self) -> int:
        return self.weights[-2].shape[1]

    def tensors(self) -> list[np.ndarray]:
        """Flat list W0, b0, W1, b1, ... in declared layer order."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    @classmethod
    def from_tensors(cls, tensors: list[np.ndarray]) -> MLPParams:
        return cls(list(tensors[0::2]), list(tensors[1::2]))

    def copy(self) -> MLPParams:
        return MLPParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def squared_norm(self) -> float:
        return float(sum(np.sum(t * t) for t in self.tensors()))


def masked_softmax(logits: np.ndarray, mask: np.ndarray) -> np.ndarray:
    masked = np.where(mask, logits, -np.inf)
    masked = masked - masked.max(axis=-1, keepdims=True)
    exp = np.where(mask, np.exp(masked), 0.0)
    return exp / exp.sum(axis=-1, keepdims=True)


def forward(
    params: MLPParams, features: np.ndarray, mask: np.ndarray
) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """Return (probabilities, values, activations) for a batch."""
    activations = [features]
    h = features
    for w, b in zip(params.weights[:-2], params.biases[:-2]):
        h = np.maximum(h @ w + b, 0.0)
        activations.append(h)
    logits = h @ params.weights[-2] + params.biases[-2]
    values = np.tanh((h @ params.weights[-1] + params.biases[-1])[:, 0])
    return masked_softmax(logits, mask), values, activations


def loss_and_gradients(
    params: MLPParams,
    features: np.ndarray,
    mask: np.ndarray,
    target_policy: np.ndarray,
    target_value: np.ndarray,
    l2_coefficient: float,
) -> tuple[LossParts, list[np.ndarray]]:
    """Batch loss parts and gradients (same layout as :meth:`MLPParams.tensors`)."""
    batch = features.shape[0]
    probs, values, activations = forward(params, features, mask)

    log_probs = np.log(np.where(mask, probs, 1.0))
    mse = float(np.mean((target_value - values) ** 2))
    ce = float(-np.sum(np.where(mask, target_policy * log_probs, 0.0)) / batch)
    l2 = l2_coefficient * params.squared_norm()

    d_logits = np.where(mask, probs - target_policy, 0.0) / batch
    d_value = (2.0 / batch) * (values - target_value) * (1.0 - values**2)

    h = activations[-1]
    grads_w = [None] * len(params.weights)
    grads_b = [None] * len(params.biases)
    grads_w[-2] = h.T @ d_logits
    grads_b[-2] = d_logits.sum(axis=0)
    grads_w[-1] = h.T @ d_value[:, None]
    grads_b[-1] = np.array([d_value.sum()])

    d_h = d_logits @ params.weights[-2].T + d_value[:, None] @ params.weights[-1].T
    for layer in range(params.num_hidden - 1, -1, -1):
        d_z = d_h * (activations[layer + 1] > 0.0)
        grads_w[layer] = activations[layer].T @ d_z
        grads_b[layer] = d_z.sum(axis=0)
        d_h = d_z @ params.weights[layer].T

    grads = []
    for gw, gb, w, b in zip(grads_w, grads_b, params.weights, params.biases):
        grads.extend((gw + 2.0 * l2_coefficient * w, gb + 2.0 * l2_coefficient * b))
    return LossParts(mse, ce, l2), grads


def numerical_gradients(
    params: MLPParams,
    features: np.ndarray,
    mask: np.ndarray,
    target_policy: np.ndarray,
    target_value: np.ndarray,
    l2_coefficient: float,
    step: float = 1e-5,
) -> list[np.ndarray]:
    """Central finite differences of the total loss, for gradient checks."""

    def total(p: MLPParams) -> float:
        parts, _ = loss_and_gradients(p, features, mask, target_policy, target_value, l2_coefficient)
        return parts.total

    shifted = params.copy()
    tensors = shifted.tensors()
    grads = []
    for t in tensors:
        g = np.zeros_like(t)
        for idx in np.ndindex(t.shape):
            original = t[idx]
            t[idx] = original + step
            up = total(shifted)
            t[idx] = original - step
            down = total(shifted)
            t[idx] = original
            g[idx] = (up - down) / (2.0 * step)
        grads.append(g)
    return grads


def sgd_step(params: MLPParams, grads: list[np.ndarray], learning_rate: float) -> MLPParams:
    tensors = [t - learning_rate * g for t, g in zip(params.tensors(), grads)]
    return MLPParams.from_tensors(tensors)


def check_finite(parts: LossParts) -> None:
    if not np.isfinite([parts.mse, parts.ce, parts.l2]).all():
        raise EvaluatorError(
            f"Non-finite loss: mse={parts.mse}, ce={parts.ce}, l2={parts.l2}"
        )
