"""
Solvers Package

Exact best response / NashConv and the CFR+ baseline.
"""

from .cfr_plus import (
    CfrRun,
    CfrState,
    average_policy,
    cfr_plus_iterate,
    regret_matching,
    run_cfr_plus,
    write_profile,
)
from .exact_eval import (
    BestResponseResult,
    ExploitabilityReport,
    best_response,
    expected_value,
    nash_conv,
    seat_averaged_value,
)

__all__ = [
    "BestResponseResult",
    "CfrRun",
    "CfrState",
    "ExploitabilityReport",
    "average_policy",
    "best_response",
    "cfr_plus_iterate",
    "expected_value",
    "nash_conv",
    "regret_matching",
    "run_cfr_plus",
    "seat_averaged_value",
    "write_profile",
]
