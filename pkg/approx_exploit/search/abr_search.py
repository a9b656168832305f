"""
Approximate best response search.

IS-MCTS over the searcher's information states. Every simulation draws a
ground history from the exact posterior of the root infostate, then walks it:
searcher nodes select by PUCT, opponent and chance nodes are sampled from
their known policies (the opponent is part of the environment, so it never
gets tree nodes). Leaves are scored by the evaluator, whose values in [-1, 1]
are rescaled to game units here.
"""

from __future__ import annotations

import hashlib
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..config import SearchDefaults
from ..exceptions import ConfigurationError, ContractViolation, EvaluatorError
from ..games import CHANCE, PLAYERS, TERMINAL, History, InfoStateKey
from ..policies import Policy
from .beliefs import BeliefCache, sample_history

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConfig:
    num_simulations: int = SearchDefaults.NUM_SIMULATIONS
    uct_c: float = SearchDefaults.UCT_C
    virtual_loss: int = SearchDefaults.VIRTUAL_LOSS
    num_threads: int = SearchDefaults.NUM_THREADS
    temperature_moves: int = SearchDefaults.TEMPERATURE_MOVES
    seed: int = 0

    def __post_init__(self):
        if self.num_simulations < 1:
            raise ConfigurationError(f"num_simulations must be >= 1, got {self.num_simulations}")
        if self.uct_c <= 0:
            raise ConfigurationError(f"uct_c must be > 0, got {self.uct_c}")
        if self.virtual_loss < 0:
            raise ConfigurationError(f"virtual_loss must be >= 0, got {self.virtual_loss}")
        if self.num_threads < 1:
            raise ConfigurationError(f"num_threads must be >= 1, got {self.num_threads}")
        if self.temperature_moves < 0:
            raise ConfigurationError(f"temperature_moves must be >= 0, got {self.temperature_moves}")


@dataclass
class SearchDiagnostics:
    simulations: int = 0
    seconds: float = 0.0
    degenerate_posteriors: int = 0
    tree_size: int = 0
    evaluator_calls: int = 0

    @property
    def simulations_per_second(self) -> float:
        return self.simulations / self.seconds if self.seconds > 0 else 0.0

    def merge(self, other: SearchDiagnostics) -> None:
        self.simulations += other.simulations
        self.seconds += other.seconds
        self.degenerate_posteriors += other.degenerate_posteriors
        self.tree_size = max(self.tree_size, other.tree_size)
        self.evaluator_calls += other.evaluator_calls

    def to_dict(self) -> dict:
        return {
            "simulations": self.simulations,
            "seconds": self.seconds,
            "simulations_per_second": self.simulations_per_second,
            "degenerate_posteriors": self.degenerate_posteriors,
            "tree_size": self.tree_size,
            "evaluator_calls": self.evaluator_calls,
        }


class SearchNode:
    """
    Edge statistics of one searcher infostate.

    Real statistics (``visits``, ``total_value``) and in-flight virtual losses
    (``virtual_losses``) are kept apart; selection sees the effective values
    N + vl*k and W - vl*max_utility*k.
    """

    __slots__ = ("key", "legal", "prior", "visits", "total_value", "virtual_losses", "lock")

    def __init__(self, key: str, legal: tuple[int, ...], prior: np.ndarray):
        self.key = key
        self.legal = legal
        self.prior = prior
        self.visits = np.zeros(len(legal), dtype=np.int64)
        self.total_value = np.zeros(len(legal), dtype=np.float64)
        self.virtual_losses = np.zeros(len(legal), dtype=np.int64)
        self.lock = threading.Lock()

    def effective(self, virtual_loss: int, max_utility: float) -> tuple[np.ndarray, np.ndarray]:
        n = self.visits + virtual_loss * self.virtual_losses
        w = self.total_value - virtual_loss * max_utility * self.virtual_losses
        return n, w

    def puct_scores(self, uct_c: float, virtual_loss: int, max_utility: float) -> np.ndarray:
        n, w = self.effective(virtual_loss, max_utility)
        q = np.divide(w, n, out=np.zeros(len(n)), where=n > 0)
        return q + uct_c * self.prior * np.sqrt(n.sum()) / (1.0 + n)

    def select(self, uct_c: float, virtual_loss: int, max_utility: float) -> int:
        """Pick the PUCT argmax (lowest action id on ties) and mark it in flight."""
        with self.lock:
            index = int(np.argmax(self.puct_scores(uct_c, virtual_loss, max_utility)))
            self.virtual_losses[index] += 1
            return index

    def backup(self, index: int, value: float) -> None:
        with self.lock:
            self.virtual_losses[index] -= 1
            self.visits[index] += 1
            self.total_value[index] += value

    def mean_values(self) -> np.ndarray:
        return np.divide(
            self.total_value, self.visits, out=np.zeros(len(self.visits)), where=self.visits > 0
        )

    def visit_policy(self) -> np.ndarray:
        with self.lock:
            total = self.visits.sum()
            if total == 0:
                raise ContractViolation(f"No completed simulations at '{self.key}'")
            return self.visits / total


class SimulationStep(NamedTuple):
    key: str
    action: int
    index: int


class SearchTree:
    """Per-episode search statistics of one searcher seat, keyed by infostate."""

    def __init__(self, pi_opponent: Policy, searcher: int):
        if searcher not in PLAYERS:
            raise ContractViolation(f"searcher must be one of {PLAYERS}, got {searcher}")
        self.game = pi_opponent.game
        self.pi_opponent = pi_opponent
        self.searcher = searcher
        self.max_utility = float(self.game.spec.max_utility)
        self.nodes: dict[str, SearchNode] = {}
        self.beliefs = BeliefCache(pi_opponent)
        self.evaluator_calls = 0
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, key: str) -> bool:
        return key in self.nodes

    def get(self, key: str) -> SearchNode | None:
        return self.nodes.get(key)

    def expand(self, h: History, key: str, evaluator) -> tuple[SearchNode, float]:
        """Create the node for ``key`` from evaluator priors; returns (node, value in game units)."""
        legal = tuple(self.game.legal_actions(h))
        features = self.game.infostate_tensor(h, self.searcher)
        try:
            output = evaluator.evaluate(features, key, legal)
        except EvaluatorError:
            raise
        except Exception as e:
            raise EvaluatorError(f"Evaluator failed at '{key}': {e}") from e
        output.validate(legal)
        node = SearchNode(key, legal, np.asarray(output.prior, dtype=np.float64))
        with self._lock:
            self.evaluator_calls += 1
            node = self.nodes.setdefault(key, node)
        return node, output.value * self.max_utility


def key_seed(*parts: object) -> int:
    """Stable 64-bit seed from arbitrary parts (used for per-infostate searches)."""
    digest = hashlib.sha256("\x1f".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def sample_action(legal, probs, rng: np.random.Generator) -> int:
    return int(legal[int(rng.choice(len(legal), p=np.asarray(probs, dtype=np.float64)))])


# ── Algorithm pieces ──────────────────────────────────────────────────────────


def run_simulation(
    h: History,
    tree: SearchTree,
    pi_opponent: Policy,
    evaluator,
    config: SearchConfig,
    rng: np.random.Generator,
) -> tuple[list[SimulationStep], float]:
    """
    Walk from ``h`` until a terminal or an unexpanded searcher infostate.

    Virtual losses are applied along the returned trajectory; the caller must
    hand it to :func:`update_search_tree`.
    """
    game = tree.game
    searcher = tree.searcher
    opponent = 1 - searcher
    trajectory: list[SimulationStep] = []
    while True:
        player = game.current_player(h)
        if player == TERMINAL:
            return trajectory, game.returns(h)[searcher]
        if player == CHANCE:
            outcomes = game.chance_outcomes(h)
            action = sample_action([a for a, _ in outcomes], [p for _, p in outcomes], rng)
        elif player == opponent:
            legal = game.legal_actions(h)
            probs = pi_opponent.action_probabilities(game.infostate_key(h, opponent), legal)
            action = sample_action(legal, probs, rng)
        else:
            key = game.infostate_key(h, searcher).observation_string
            node = tree.get(key)
            if node is None:
                _, value = tree.expand(h, key, evaluator)
                return trajectory, value
            index = node.select(config.uct_c, config.virtual_loss, tree.max_utility)
            action = node.legal[index]
            trajectory.append(SimulationStep(key, action, index))
        h = game.apply_unchecked(h, player, action)


def update_search_tree(tree: SearchTree, trajectory: list[SimulationStep], value: float) -> None:
    """Revert each step's virtual loss and back up ``value`` (searcher's perspective)."""
    for step in trajectory:
        tree.nodes[step.key].backup(step.index, value)


def _simulate_once(
    key: InfoStateKey, tree: SearchTree, evaluator, config: SearchConfig, rng: np.random.Generator
) -> None:
    h = sample_history(tree.beliefs.get(key), rng)
    trajectory, value = run_simulation(h, tree, tree.pi_opponent, evaluator, config, rng)
    update_search_tree(tree, trajectory, value)


def choose_action(
    node: SearchNode, sample: bool, rng: np.random.Generator | None
) -> int:
    """Visit-proportional sampling when ``sample``, else argmax (lowest action id on ties)."""
    policy = node.visit_policy()
    if sample:
        if rng is None:
            raise ContractViolation("visit-proportional action choice needs an rng")
        return sample_action(node.legal, policy, rng)
    return node.legal[int(np.argmax(node.visits))]


class SearchResult(NamedTuple):
    action: int
    visit_policy: np.ndarray
    diagnostics: SearchDiagnostics


def abr_action(
    key: InfoStateKey,
    tree: SearchTree,
    pi_opponent: Policy,
    evaluator,
    config: SearchConfig,
    rng: np.random.Generator | None = None,
    sample: bool = False,
) -> SearchResult:
    """
    Run ``config.num_simulations`` simulations from ``key`` and pick an action.

    The root is expanded with evaluator priors first, so every simulation
    makes a selection at the root. With ``num_threads > 1`` the simulations
    run concurrently on the shared tree, kept apart by virtual loss.
    """
    if key.player != tree.searcher:
        raise ContractViolation(f"abr_action: key belongs to seat {key.player}, tree to {tree.searcher}")
    if pi_opponent is not tree.pi_opponent:
        raise ContractViolation("abr_action: opponent policy differs from the tree's belief model")
    if rng is None:
        rng = np.random.default_rng(key_seed(config.seed, tree.game.spec.game_id, key))
    start = time.perf_counter()
    calls_before = tree.evaluator_calls

    belief = tree.beliefs.get(key)
    root = tree.get(key.observation_string)
    if root is None:
        h = belief.support[0]
        if tree.game.is_terminal(h):
            raise ContractViolation(f"abr_action called at a terminal infostate '{key}'")
        root, _ = tree.expand(h, key.observation_string, evaluator)

    if config.num_threads == 1:
        for _ in range(config.num_simulations):
            _simulate_once(key, tree, evaluator, config, rng)
    else:
        _run_threaded(key, tree, evaluator, config, rng)

    policy = root.visit_policy()
    action = choose_action(root, sample, rng)
    diagnostics = SearchDiagnostics(
        simulations=config.num_simulations,
        seconds=time.perf_counter() - start,
        degenerate_posteriors=int(belief.degenerate),
        tree_size=len(tree),
        evaluator_calls=tree.evaluator_calls - calls_before,
    )
    logger.debug(
        f"abr_action '{key.observation_string}': action {action}, "
        f"{diagnostics.simulations_per_second:.0f} sims/s, tree {diagnostics.tree_size}"
    )
    return SearchResult(action, policy, diagnostics)


def _run_threaded(
    key: InfoStateKey, tree: SearchTree, evaluator, config: SearchConfig, rng: np.random.Generator
) -> None:
    counts = [config.num_simulations // config.num_threads] * config.num_threads
    for k in range(config.num_simulations % config.num_threads):
        counts[k] += 1
    seeds = np.random.SeedSequence(int(rng.integers(2**63))).spawn(config.num_threads)

    def worker(count: int, seed: np.random.SeedSequence) -> None:
        local = np.random.default_rng(seed)
        for _ in range(count):
            _simulate_once(key, tree, evaluator, config, local)

    with ThreadPoolExecutor(max_workers=config.num_threads) as pool:
        for future in [pool.submit(worker, c, s) for c, s in zip(counts, seeds)]:
            future.result()


# ── episodes ──────────────────────────────────────────────────────────────────


class EpisodeRecord(NamedTuple):
    key: str
    features: np.ndarray
    legal: tuple[int, ...]
    visit_policy: np.ndarray


@dataclass
class EpisodeResult:
    seat: int
    records: list[EpisodeRecord]
    episode_return: float
    diagnostics: SearchDiagnostics = field(default_factory=SearchDiagnostics)


def play_episode(
    seat: int,
    pi_opponent: Policy,
    evaluator,
    config: SearchConfig,
    rng: np.random.Generator,
    training: bool = True,
) -> EpisodeResult:
    """
    Play one game with the searcher in ``seat`` against ``pi_opponent``.

    The search tree persists for the whole episode. In training episodes the
    first ``temperature_moves`` searcher decisions are sampled from the visit
    counts; everything else is argmax.
    """
    if seat not in PLAYERS:
        raise ContractViolation(f"seat must be one of {PLAYERS}, got {seat}")
    game = pi_opponent.game
    opponent = 1 - seat
    tree = SearchTree(pi_opponent, seat)
    diagnostics = SearchDiagnostics()
    records: list[EpisodeRecord] = []
    h = game.new_initial_state()
    while True:
        player = game.current_player(h)
        if player == TERMINAL:
            break
        if player == CHANCE:
            outcomes = game.chance_outcomes(h)
            action = sample_action([a for a, _ in outcomes], [p for _, p in outcomes], rng)
        elif player == opponent:
            legal = game.legal_actions(h)
            probs = pi_opponent.action_probabilities(game.infostate_key(h, opponent), legal)
            action = sample_action(legal, probs, rng)
        else:
            key = game.infostate_key(h, seat)
            sample = training and len(records) < config.temperature_moves
            result = abr_action(key, tree, pi_opponent, evaluator, config, rng, sample=sample)
            records.append(
                EpisodeRecord(
                    key.observation_string,
                    game.infostate_tensor(h, seat),
                    tuple(game.legal_actions(h)),
                    result.visit_policy,
                )
            )
            diagnostics.merge(result.diagnostics)
            action = result.action
        h = game.apply_unchecked(h, player, action)
    return EpisodeResult(seat, records, game.returns(h)[seat], diagnostics)
