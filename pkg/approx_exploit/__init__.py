"""
Exploitability measurement for two-player zero-sum games.

Exact best response and NashConv on enumerable games, an IS-MCTS approximate
best response (ABR) with learned evaluators for the rest, and the approximate
NashConv (ANC) lower bound built from it. The ``approx-exploit`` command in
``approx_exploit.cli`` drives experiments from JSON configs.
"""

from .config import PACKAGE_VERSION, Settings
from .exceptions import (
    ApproxExploitError,
    ConfigurationError,
    ContractViolation,
    EvaluatorError,
    PolicyFormatError,
)
from .games import GAME_IDS, load_game
from .learning import anc, train_abr
from .search import abr_action, posterior
from .solvers import best_response, nash_conv, run_cfr_plus

__version__ = PACKAGE_VERSION

__all__ = [
    "GAME_IDS",
    "ApproxExploitError",
    "ConfigurationError",
    "ContractViolation",
    "EvaluatorError",
    "PolicyFormatError",
    "Settings",
    "abr_action",
    "anc",
    "best_response",
    "load_game",
    "nash_conv",
    "posterior",
    "run_cfr_plus",
    "train_abr",
]
