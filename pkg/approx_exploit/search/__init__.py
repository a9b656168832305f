"""
Search Package

Exact beliefs and the IS-MCTS approximate best response.
"""

from .abr_policy import SearchBackedPolicy
from .abr_search import (
    EpisodeRecord,
    EpisodeResult,
    SearchConfig,
    SearchDiagnostics,
    SearchNode,
    SearchResult,
    SearchTree,
    SimulationStep,
    abr_action,
    choose_action,
    key_seed,
    play_episode,
    run_simulation,
    update_search_tree,
)
from .beliefs import BeliefCache, BeliefDistribution, posterior, sample_history

__all__ = [
    "BeliefCache",
    "BeliefDistribution",
    "EpisodeRecord",
    "EpisodeResult",
    "SearchBackedPolicy",
    "SearchConfig",
    "SearchDiagnostics",
    "SearchNode",
    "SearchResult",
    "SearchTree",
    "SimulationStep",
    "abr_action",
    "choose_action",
    "key_seed",
    "play_episode",
    "posterior",
    "run_simulation",
    "sample_history",
    "update_search_tree",
]
