"""
Pytest fixtures and configuration for tests.
"""

import pytest

from approx_exploit.games import load_game
from approx_exploit.learning import TabularEvaluator
from approx_exploit.policies import UniformPolicy
from approx_exploit.search import SearchConfig
from approx_exploit.solvers import run_cfr_plus


@pytest.fixture
def kuhn():
    """Kuhn poker fixture"""
    return load_game("kuhn_poker")


@pytest.fixture
def leduc():
    """Leduc poker fixture"""
    return load_game("leduc_poker")


@pytest.fixture
def liars_dice():
    return load_game("liars_dice")


@pytest.fixture
def tic_tac_toe():
    return load_game("tic_tac_toe")


@pytest.fixture
def kuhn_uniform(kuhn):
    """Uniform profile (seat 0, seat 1) in Kuhn poker"""
    return UniformPolicy(kuhn, 0), UniformPolicy(kuhn, 1)


@pytest.fixture
def leduc_uniform(leduc):
    return UniformPolicy(leduc, 0), UniformPolicy(leduc, 1)


@pytest.fixture(scope="session")
def kuhn_cfr_run():
    """CFR+ run on Kuhn, shared across the session"""
    return run_cfr_plus(load_game("kuhn_poker"), 2000, checkpoint_iterations=(10, 100, 1000))


@pytest.fixture
def small_search():
    """Single-threaded search small enough for unit tests"""
    return SearchConfig(num_simulations=64, uct_c=2.6, virtual_loss=1, num_threads=1, seed=7)


@pytest.fixture
def kuhn_tabular(kuhn):
    return TabularEvaluator(kuhn.spec)
