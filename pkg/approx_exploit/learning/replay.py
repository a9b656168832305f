"""Bounded FIFO replay buffer with uniform sampling."""

from __future__ import annotations

import threading
from collections import deque
from collections.abc import Iterable

import numpy as np

from ..config import NetworkDefaults
from ..exceptions import ConfigurationError
from .evaluators import TrainingExample


class ReplayBuffer:
    def __init__(self, capacity: int = NetworkDefaults.REPLAY_CAPACITY):
        if capacity < 1:
            raise ConfigurationError(f"Replay capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._items: deque[TrainingExample] = deque(maxlen=capacity)
        self._lock = threading.Lock()
        self.total_added = 0

    def __len__(self) -> int:
        return len(self._items)

    def add(self, example: TrainingExample) -> None:
        with self._lock:
            self._items.append(example)
            self.total_added += 1

    def extend(self, examples: Iterable[TrainingExample]) -> None:
        with self._lock:
            for ex in examples:
                self._items.append(ex)
                self.total_added += 1

    def sample(self, batch_size: int, rng: np.random.Generator) -> list[TrainingExample]:
        """``batch_size`` draws, uniform with replacement over the current contents."""
        with self._lock:
            if not self._items:
                raise ConfigurationError("Cannot sample from an empty replay buffer")
            picks = rng.integers(len(self._items), size=batch_size)
            return [self._items[int(k)] for k in picks]
