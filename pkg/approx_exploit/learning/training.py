"""
ABR training: actors play search episodes against the fixed opponent, a
single learner folds the resulting examples into the evaluator.

With one actor everything runs on the calling thread in episode order, which
makes a seeded run reproducible. With several actors, episodes are produced
on worker threads and handed to the learner through a bounded queue; actors
block when it is full.
"""

from __future__ import annotations

import logging
import math
import queue
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from ..config import NetworkDefaults, ReportConstants
from ..exceptions import ConfigurationError
from ..games import Game
from ..policies import Policy
from ..search import EpisodeResult, SearchConfig, SearchDiagnostics, play_episode
from .checkpoints import checkpoint_suffix, load_checkpoint, save_checkpoint
from .evaluators import Evaluator, MLPEvaluator, TrainingExample, make_evaluator
from .network import FAConfig, LossParts
from .replay import ReplayBuffer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainingBudget:
    """Stop after ``episodes`` episodes or ``seconds`` of wall clock, whichever comes first."""

    episodes: int | None = None
    seconds: float | None = None
    num_actors: int = 1
    checkpoint_every: int = NetworkDefaults.CHECKPOINT_EVERY_EPISODES
    replay_capacity: int = NetworkDefaults.REPLAY_CAPACITY
    queue_capacity: int = NetworkDefaults.QUEUE_CAPACITY

    def __post_init__(self):
        if self.episodes is None and self.seconds is None:
            raise ConfigurationError("Training budget needs an episode count or a wall-clock limit")
        if self.episodes is not None and self.episodes < 1:
            raise ConfigurationError(f"Budget episodes must be >= 1, got {self.episodes}")
        if self.seconds is not None and self.seconds <= 0:
            raise ConfigurationError(f"Budget seconds must be > 0, got {self.seconds}")
        if self.num_actors < 1 or self.checkpoint_every < 1 or self.queue_capacity < 1:
            raise ConfigurationError("num_actors, checkpoint_every and queue_capacity must be >= 1")


@dataclass
class TrainingResult:
    evaluator: Evaluator
    seat: int
    curve: pd.DataFrame
    checkpoints: list[Path]
    episodes: int
    steps: int
    diagnostics: SearchDiagnostics = field(default_factory=SearchDiagnostics)


def episode_examples(result: EpisodeResult, max_utility: float) -> list[TrainingExample]:
    """One example per searcher decision, all sharing the rescaled episode return."""
    z = result.episode_return / max_utility
    return [
        TrainingExample(r.key, r.features, r.legal, r.visit_policy, z) for r in result.records
    ]


def episode_rng(seed: int, seat: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, seat, index]))


class _Learner:
    """Owns evaluator mutation and the running curve window."""

    def __init__(
        self,
        evaluator: Evaluator,
        buffer: ReplayBuffer,
        fa_config: FAConfig,
        rng: np.random.Generator,
        max_utility: float,
        step: int = 0,
    ):
        self.evaluator = evaluator
        self.buffer = buffer
        self.fa_config = fa_config
        self.rng = rng
        self.max_utility = max_utility
        self.step = step
        self._returns: list[float] = []
        self._losses: list[LossParts] = []

    def consume(self, result: EpisodeResult) -> None:
        examples = episode_examples(result, self.max_utility)
        self._returns.append(result.episode_return)
        if not isinstance(self.evaluator, MLPEvaluator):
            self.evaluator.learn(examples)
            self.step += 1
            return
        self.buffer.extend(examples)
        if len(self.buffer) < self.fa_config.min_buffer_to_learn:
            return
        for _ in range(max(1, math.ceil(len(examples) / self.fa_config.actor_batch))):
            batch = self.buffer.sample(self.fa_config.batch_size, self.rng)
            self._losses.append(self.evaluator.learn(batch))
            self.step += 1

    def curve_row(self) -> dict:
        def mean_of(name: str) -> float:
            return float(np.mean([getattr(p, name) for p in self._losses])) if self._losses else float("nan")

        size = len(self.buffer) if isinstance(self.evaluator, MLPEvaluator) else len(self.evaluator.table)
        row = {
            "step": self.step,
            "mean_return": float(np.mean(self._returns)) if self._returns else float("nan"),
            "mse": mean_of("mse"),
            "ce": mean_of("ce"),
            "l2": mean_of("l2"),
            "buffer_size": size,
        }
        self._returns.clear()
        self._losses.clear()
        return row


def train_abr(
    game: Game,
    seat: int,
    pi_opponent: Policy,
    evaluator_kind: str,
    budget: TrainingBudget,
    search_config: SearchConfig,
    fa_config: FAConfig | None = None,
    seed: int = 0,
    output_dir: str | Path | None = None,
    resume_from: str | Path | None = None,
) -> TrainingResult:
    """
    Train an evaluator that makes the search exploit ``pi_opponent`` from ``seat``.

    ``resume_from`` continues a checkpoint: the learner step counter, episode
    index (and therefore the episode seed schedule) and the curve CSV in
    ``output_dir`` all carry on.
    """
    if pi_opponent.game.spec.game_id != game.spec.game_id:
        raise ConfigurationError("Opponent policy belongs to a different game")
    if pi_opponent.player is not None and pi_opponent.player != 1 - seat:
        raise ConfigurationError(
            f"Opponent policy is for seat {pi_opponent.player}, but the searcher sits in seat {seat}"
        )
    fa_config = fa_config or FAConfig()
    out = Path(output_dir) if output_dir is not None else None
    curve_path = out / f"curve_{game.spec.game_id}_seat{seat}.csv" if out is not None else None

    first_episode, step = 0, 0
    if resume_from is not None:
        checkpoint = load_checkpoint(resume_from, game)
        if checkpoint.seat != seat:
            raise ConfigurationError(f"Checkpoint {resume_from} is for seat {checkpoint.seat}, not {seat}")
        evaluator = checkpoint.evaluator
        if isinstance(evaluator, MLPEvaluator):
            evaluator.config = fa_config
        first_episode, step = checkpoint.episodes, checkpoint.step
        logger.info(f"Resuming from {resume_from} at episode {first_episode}, step {step}")
    else:
        evaluator = make_evaluator(evaluator_kind, game.spec, fa_config, seed=seed)

    rows: list[dict] = []
    if curve_path is not None and resume_from is not None and curve_path.exists():
        rows = pd.read_csv(curve_path).to_dict("records")

    learner = _Learner(
        evaluator,
        ReplayBuffer(budget.replay_capacity),
        fa_config,
        np.random.default_rng(np.random.SeedSequence([seed, seat, 2**31])),
        float(game.spec.max_utility),
        step=step,
    )
    diagnostics = SearchDiagnostics()
    checkpoints: list[Path] = []
    deadline = time.monotonic() + budget.seconds if budget.seconds is not None else math.inf
    last_episode = first_episode + budget.episodes if budget.episodes is not None else None
    episodes = first_episode

    def checkpoint() -> None:
        rows.append(learner.curve_row())
        logger.info(
            f"{game.spec.game_id} seat {seat}: episode {episodes}, step {learner.step}, "
            f"mean return {rows[-1]['mean_return']:.4f}"
        )
        if out is not None:
            name = f"abr_{game.spec.game_id}_seat{seat}_ep{episodes:07d}{checkpoint_suffix(evaluator)}"
            checkpoints.append(save_checkpoint(evaluator, out / name, seat, learner.step, episodes))
            pd.DataFrame(rows, columns=list(ReportConstants.CURVE_COLUMNS)).to_csv(curve_path, index=False)

    def on_episode(result: EpisodeResult) -> None:
        nonlocal episodes
        learner.consume(result)
        diagnostics.merge(result.diagnostics)
        episodes += 1
        if (episodes - first_episode) % budget.checkpoint_every == 0:
            checkpoint()

    def play(index: int) -> EpisodeResult:
        return play_episode(
            seat, pi_opponent, evaluator, search_config, episode_rng(seed, seat, index), training=True
        )

    if budget.num_actors == 1:
        index = first_episode
        while (last_episode is None or index < last_episode) and time.monotonic() < deadline:
            on_episode(play(index))
            index += 1
    else:
        _run_actor_learner(play, on_episode, budget, first_episode, last_episode, deadline)

    if not rows or (episodes - first_episode) % budget.checkpoint_every != 0:
        checkpoint()
    curve = pd.DataFrame(rows, columns=list(ReportConstants.CURVE_COLUMNS))
    return TrainingResult(evaluator, seat, curve, checkpoints, episodes, learner.step, diagnostics)


def _run_actor_learner(play, on_episode, budget: TrainingBudget, first: int, last: int | None, deadline: float) -> None:
    results: queue.Queue[EpisodeResult] = queue.Queue(maxsize=budget.queue_capacity)
    stop = threading.Event()
    lock = threading.Lock()
    next_index = [first]

    def claim() -> int | None:
        with lock:
            index = next_index[0]
            if stop.is_set() or (last is not None and index >= last) or time.monotonic() >= deadline:
                return None
            next_index[0] += 1
            return index

    def actor() -> None:
        while (index := claim()) is not None:
            result = play(index)
            while not stop.is_set():
                try:
                    results.put(result, timeout=0.1)
                    break
                except queue.Full:
                    continue

    with ThreadPoolExecutor(max_workers=budget.num_actors, thread_name_prefix="actor") as pool:
        actors = [pool.submit(actor) for _ in range(budget.num_actors)]
        consumed = 0
        try:
            while True:
                if last is not None and consumed >= last - first:
                    break
                if time.monotonic() >= deadline:
                    break
                try:
                    result = results.get(timeout=0.1)
                except queue.Empty:
                    if all(f.done() for f in actors) and results.empty():
                        break
                    continue
                on_episode(result)
                consumed += 1
        finally:
            stop.set()
        for f in actors:
            f.result()
