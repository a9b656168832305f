"""
Runtime ceilings for the expensive operations.

These tests measure wall clock on a single core and ensure the exact
traversals, the search and the CFR+ baseline stay within usable budgets.
"""

import time

import numpy as np
import pytest

from approx_exploit.games import InfoStateKey
from approx_exploit.learning import FAConfig, MLPParams, TabularEvaluator
from approx_exploit.learning.network import numerical_gradients
from approx_exploit.policies import UniformPolicy
from approx_exploit.search import SearchConfig, SearchTree, abr_action
from approx_exploit.solvers import nash_conv, run_cfr_plus


@pytest.mark.performance
class TestRuntimeCeilings:
    """Wall-clock ceilings"""

    def test_leduc_nashconv(self, leduc_uniform):
        start = time.time()
        nash_conv(*leduc_uniform)
        elapsed = time.time() - start
        assert elapsed < 30, f"Leduc NashConv took {elapsed:.1f}s, expected < 30s"

    def test_leduc_search_decision(self, leduc):
        opponent = UniformPolicy(leduc, 0)
        tree = SearchTree(opponent, 1)
        config = SearchConfig(num_simulations=800, num_threads=1, seed=0)

        start = time.time()
        result = abr_action(InfoStateKey(1, "Qh|c"), tree, opponent, TabularEvaluator(leduc.spec), config)
        elapsed = time.time() - start

        assert result.diagnostics.simulations == 800
        assert result.diagnostics.simulations_per_second > 0
        assert elapsed < 60, f"800 simulations took {elapsed:.1f}s, expected < 60s"

    def test_gradient_check(self):
        config = FAConfig(num_layers=2, hidden_units=16)
        params = MLPParams.initialize(30, 3, config, seed=0)
        rng = np.random.default_rng(0)
        mask = np.ones((8, 3), dtype=bool)
        policy = np.full((8, 3), 1.0 / 3.0)

        start = time.time()
        numerical_gradients(params, rng.normal(size=(8, 30)), mask, policy, rng.uniform(-1, 1, 8), 1e-4)
        elapsed = time.time() - start
        assert elapsed < 60, f"Finite-difference gradients took {elapsed:.1f}s, expected < 60s"

    @pytest.mark.slow
    def test_leduc_cfr_plus(self, leduc):
        start = time.time()
        run = run_cfr_plus(leduc, 1000)
        elapsed = time.time() - start
        assert run.checkpoints["exploitability"].iloc[-1] <= 1e-3
        assert elapsed < 600, f"1000 CFR+ iterations took {elapsed:.0f}s, expected < 600s"
