"""
Tests for evaluators, the policy/value network, replay and checkpoints.
"""

import numpy as np
import pytest

from approx_exploit.exceptions import ConfigurationError, EvaluatorError, PolicyFormatError
from approx_exploit.learning import (
    FAConfig,
    LossParts,
    MLPEvaluator,
    MLPParams,
    ReplayBuffer,
    TabularEvaluator,
    TrainingExample,
    load_checkpoint,
    make_evaluator,
    save_checkpoint,
    train_step,
)
from approx_exploit.learning.network import (
    check_finite,
    forward,
    loss_and_gradients,
    masked_softmax,
    numerical_gradients,
)


def toy_batch(rng, size=4, features=5, actions=3):
    x = rng.normal(size=(size, features))
    mask = np.ones((size, actions), dtype=bool)
    mask[0, 2] = False
    mask[2, 0] = False
    policy = np.where(mask, rng.random((size, actions)), 0.0)
    policy /= policy.sum(axis=1, keepdims=True)
    values = rng.uniform(-1, 1, size=size)
    return x, mask, policy, values


def example(key, legal, policy, z, features=None):
    features = features if features is not None else np.zeros(11)
    return TrainingExample(key, features, tuple(legal), np.asarray(policy, dtype=np.float64), z)


class TestNetwork:
    """Tests for the dense policy/value network"""

    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(0)
        config = FAConfig(num_layers=2, hidden_units=16)
        params = MLPParams.initialize(5, 3, config, seed=1)
        x, mask, policy, values = toy_batch(rng)
        _, analytic = loss_and_gradients(params, x, mask, policy, values, 1e-3)
        numeric = numerical_gradients(params, x, mask, policy, values, 1e-3)
        for a, n in zip(analytic, numeric):
            np.testing.assert_allclose(a, n, rtol=1e-4, atol=1e-7)

    def test_masked_softmax(self):
        logits = np.array([[1.0, 50.0, 2.0]])
        mask = np.array([[True, False, True]])
        probs = masked_softmax(logits, mask)
        assert probs[0, 1] == 0.0
        assert probs.sum() == pytest.approx(1.0)

    def test_forward_ranges(self):
        rng = np.random.default_rng(2)
        params = MLPParams.initialize(5, 3, FAConfig(num_layers=3, hidden_units=8), seed=0)
        x, mask, _, _ = toy_batch(rng)
        probs, values, activations = forward(params, x, mask)
        assert probs.shape == (4, 3)
        assert np.all(np.abs(values) <= 1.0)
        assert len(activations) == params.num_hidden + 1
        np.testing.assert_allclose(probs.sum(axis=1), 1.0)

    def test_l2_covers_all_parameters(self):
        params = MLPParams.initialize(5, 3, FAConfig(num_layers=1, hidden_units=4), seed=0)
        rng = np.random.default_rng(3)
        x, mask, policy, values = toy_batch(rng)
        parts, _ = loss_and_gradients(params, x, mask, policy, values, 0.5)
        assert parts.l2 == pytest.approx(0.5 * params.squared_norm())

    def test_training_reduces_loss(self):
        rng = np.random.default_rng(4)
        config = FAConfig(num_layers=2, hidden_units=16, learning_rate=0.05, l2_coefficient=1e-5)
        params = MLPParams.initialize(11, 2, config, seed=4)
        batch = [
            example(f"k{i}", (0, 1), [0.9, 0.1] if i % 2 else [0.2, 0.8], 0.5 if i % 2 else -0.5,
                    rng.normal(size=11))
            for i in range(8)
        ]
        first = None
        for _ in range(200):
            params, parts = train_step(params, batch, config, num_actions=2)
            first = first or parts
        assert parts.total < first.total

    def test_non_finite_loss_raises(self):
        with pytest.raises(EvaluatorError, match="Non-finite"):
            check_finite(LossParts(float("nan"), 0.0, 0.0))

    def test_params_round_trip_through_tensors(self):
        params = MLPParams.initialize(5, 3, FAConfig(num_layers=2, hidden_units=4), seed=0)
        rebuilt = MLPParams.from_tensors(params.tensors())
        for a, b in zip(params.tensors(), rebuilt.tensors()):
            np.testing.assert_array_equal(a, b)

    def test_config_validation(self):
        with pytest.raises(ConfigurationError):
            FAConfig(num_layers=0)
        with pytest.raises(ConfigurationError):
            FAConfig(learning_rate=0.0)


class TestTabularEvaluator:
    def test_miss_is_uniform_zero(self, kuhn):
        output = TabularEvaluator(kuhn.spec).evaluate(np.zeros(11), "K", [0, 1])
        np.testing.assert_allclose(output.prior, [0.5, 0.5])
        assert output.value == 0.0

    def test_running_means(self, kuhn):
        evaluator = TabularEvaluator(kuhn.spec)
        evaluator.learn([example("K", (0, 1), [1.0, 0.0], 1.0)])
        evaluator.learn([example("K", (0, 1), [0.0, 1.0], 0.0)])
        output = evaluator.evaluate(np.zeros(11), "K", [0, 1])
        np.testing.assert_allclose(output.prior, [0.5, 0.5])
        assert output.value == pytest.approx(0.5)
        assert evaluator.table["K"][0] == 2


class TestMLPEvaluator:
    def test_prior_over_legal_actions(self, leduc):
        evaluator = MLPEvaluator(leduc.spec, FAConfig(num_layers=2, hidden_units=8), seed=0)
        h = leduc.replay([4, 0])
        output = evaluator.evaluate(leduc.infostate_tensor(h, 0), "Ks", [1, 2])
        assert output.prior.shape == (2,)
        output.validate([1, 2])

    def test_learn_publishes_new_params(self, kuhn):
        evaluator = MLPEvaluator(kuhn.spec, FAConfig(num_layers=1, hidden_units=8, learning_rate=0.01))
        before = evaluator.params
        parts = evaluator.learn([example("K", (0, 1), [0.3, 0.7], 0.5, np.ones(11))])
        assert evaluator.params is not before
        assert evaluator.step == 1
        assert parts.total > 0

    def test_shape_must_fit_game(self, kuhn, leduc):
        params = MLPParams.initialize(11, 2, FAConfig(num_layers=1, hidden_units=4), seed=0)
        with pytest.raises(ConfigurationError, match="does not fit"):
            MLPEvaluator(leduc.spec, FAConfig(num_layers=1, hidden_units=4), params=params)

    def test_unknown_kind(self, kuhn):
        with pytest.raises(ConfigurationError, match="Unknown evaluator kind"):
            make_evaluator("forest", kuhn.spec)


class TestReplayBuffer:
    def test_fifo_eviction(self):
        buffer = ReplayBuffer(capacity=3)
        buffer.extend(example(str(i), (0, 1), [0.5, 0.5], 0.0) for i in range(5))
        assert len(buffer) == 3
        assert buffer.total_added == 5
        keys = {ex.key for ex in buffer.sample(50, np.random.default_rng(0))}
        assert keys <= {"2", "3", "4"}

    def test_empty_sample(self):
        with pytest.raises(ConfigurationError):
            ReplayBuffer(4).sample(1, np.random.default_rng(0))


class TestCheckpoints:
    """Tests for evaluator checkpoints"""

    def test_tabular_round_trip(self, kuhn, tmp_path):
        evaluator = TabularEvaluator(kuhn.spec)
        evaluator.learn([example("K|p", (0, 1), [0.25, 0.75], -0.5), example("J", (0, 1), [1.0, 0.0], 1.0)])
        path = save_checkpoint(evaluator, tmp_path / "seat1.table", seat=1, step=2, episodes=7)
        checkpoint = load_checkpoint(path, kuhn)
        assert (checkpoint.seat, checkpoint.step, checkpoint.episodes) == (1, 2, 7)
        loaded = checkpoint.evaluator
        for key in ("K|p", "J"):
            a = evaluator.evaluate(None, key, [0, 1])
            b = loaded.evaluate(None, key, [0, 1])
            np.testing.assert_array_equal(a.prior, b.prior)
            assert a.value == b.value

    def test_network_round_trip(self, leduc, tmp_path):
        evaluator = MLPEvaluator(leduc.spec, FAConfig(num_layers=2, hidden_units=8), seed=5)
        path = save_checkpoint(evaluator, tmp_path / "seat0.npz", seat=0, step=3, episodes=10)
        checkpoint = load_checkpoint(path, leduc)
        assert checkpoint.evaluator.config == evaluator.config
        assert checkpoint.evaluator.step == 3
        for a, b in zip(evaluator.params.tensors(), checkpoint.evaluator.params.tensors()):
            np.testing.assert_array_equal(a, b)

    def test_wrong_game(self, kuhn, leduc, tmp_path):
        path = save_checkpoint(TabularEvaluator(kuhn.spec), tmp_path / "k.table", seat=0, step=0, episodes=0)
        with pytest.raises(PolicyFormatError, match="kuhn_poker"):
            load_checkpoint(path, leduc)

    def test_missing(self, kuhn, tmp_path):
        with pytest.raises(ConfigurationError, match="not found"):
            load_checkpoint(tmp_path / "none.npz", kuhn)
