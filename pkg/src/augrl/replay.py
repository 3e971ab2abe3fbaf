"""FIFO replay storage for observed and augmented transitions.

Transitions are stored as flat float64 rows (see env.ROW_WIDTH) so that
batch sampling hands the learner ready-to-use column views instead of
object lists. Each slot remembers the global update count at insertion,
which is what the replay-age accounting reads.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .env import (
    COL_ACTION,
    COL_DONE,
    COL_NEXT_STATE,
    COL_REWARD,
    COL_STATE,
    COL_TIMESTEP,
    ROW_WIDTH,
    Transition,
)

logger = logging.getLogger(__name__)

_INITIAL_SLOTS = 1024


class ReplayEmptyError(RuntimeError):
    """Sampling was requested from a buffer with no elements."""


@dataclass
class TransitionBatch:
    """Columnar mini-batch; observed rows come first, then augmented."""

    rows: np.ndarray
    n_observed: int
    n_augmented: int

    def __len__(self) -> int:
        return self.rows.shape[0]

    @property
    def states(self) -> np.ndarray:
        return self.rows[:, COL_STATE]

    @property
    def actions(self) -> np.ndarray:
        return self.rows[:, COL_ACTION]

    @property
    def rewards(self) -> np.ndarray:
        return self.rows[:, COL_REWARD]

    @property
    def next_states(self) -> np.ndarray:
        return self.rows[:, COL_NEXT_STATE]

    @property
    def done(self) -> np.ndarray:
        return self.rows[:, COL_DONE]

    @property
    def timesteps(self) -> np.ndarray:
        return self.rows[:, COL_TIMESTEP]

    def to_transitions(self) -> list[Transition]:
        return [Transition.from_row(r) for r in self.rows]


class RingBuffer:
    """Strict-FIFO ring over transition rows with geometric preallocation."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = int(capacity)
        slots = min(self.capacity, _INITIAL_SLOTS)
        self._rows = np.empty((slots, ROW_WIDTH))
        self._birth = np.empty(slots, dtype=np.int64)
        self.size = 0
        self.insert_counter = 0

    @property
    def write_index(self) -> int:
        return self.insert_counter % self.capacity

    def _grow(self) -> None:
        new_slots = min(self.capacity, self._rows.shape[0] * 2)
        rows = np.empty((new_slots, ROW_WIDTH))
        rows[: self.size] = self._rows[: self.size]
        birth = np.empty(new_slots, dtype=np.int64)
        birth[: self.size] = self._birth[: self.size]
        self._rows = rows
        self._birth = birth

    def push_row(self, row: np.ndarray, current_update_count: int) -> None:
        idx = self.insert_counter % self.capacity
        if idx >= self._rows.shape[0]:
            self._grow()
        self._rows[idx] = row
        self._birth[idx] = current_update_count
        self.insert_counter += 1
        self.size = min(self.insert_counter, self.capacity)

    def push(self, t: Transition, current_update_count: int) -> None:
        self.push_row(t.to_row(), current_update_count)

    def sample_rows(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n == 0:
            return np.empty((0, ROW_WIDTH))
        if self.size == 0:
            raise ReplayEmptyError("cannot sample from an empty buffer")
        idx = rng.integers(0, self.size, size=n)
        return self._rows[idx]

    def sample(self, n: int, rng: np.random.Generator) -> TransitionBatch:
        """n uniform with-replacement draws over the current contents."""
        return TransitionBatch(self.sample_rows(n, rng), n_observed=n, n_augmented=0)

    def oldest_birth_update(self) -> int | None:
        if self.size == 0:
            return None
        if self.size < self.capacity:
            return int(self._birth[0])
        return int(self._birth[self.insert_counter % self.capacity])

    def contents_rows(self) -> np.ndarray:
        """All live rows in insertion order (oldest first); test/debug aid."""
        if self.size < self.capacity:
            return self._rows[: self.size].copy()
        start = self.insert_counter % self.capacity
        return np.concatenate([self._rows[start:self.size], self._rows[:start]])


class ReplayPair:
    """Observed + augmented buffers with the age-matching capacity rule.

    With m augmented pushes per observed push, giving the augmented buffer
    m times the observed capacity keeps the age of the two oldest elements
    equal, so neither data source is systematically staler.
    """

    def __init__(
        self,
        observed_capacity: int,
        m: int,
        alpha: float,
        augmented_capacity: int | None = None,
    ):
        if alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {alpha}")
        if m < 0:
            raise ValueError(f"m must be >= 0, got {m}")
        self.m = int(m)
        self.alpha = float(alpha)
        self.observed = RingBuffer(observed_capacity)
        if augmented_capacity is None:
            augmented_capacity = observed_capacity * max(1, self.m)
        self.augmented = RingBuffer(augmented_capacity)
        self._warned_empty_augmented = False


def combined_sample(pair: ReplayPair, b: int, rng: np.random.Generator) -> TransitionBatch:
    """b observed rows plus round(b * alpha) augmented rows, concatenated.

    The composition is identical on every call; if the augmented buffer has
    not received anything yet, the batch falls back to observed-only (this
    mirrors the updates that happen before the first augmentation).
    """
    n_aug = int(round(b * pair.alpha))
    obs_rows = pair.observed.sample_rows(b, rng)
    if n_aug == 0:
        return TransitionBatch(obs_rows, n_observed=b, n_augmented=0)
    if pair.augmented.size == 0:
        if not pair._warned_empty_augmented:
            logger.warning(
                "augmented buffer empty with alpha=%g; sampling observed-only",
                pair.alpha,
            )
            pair._warned_empty_augmented = True
        return TransitionBatch(obs_rows, n_observed=b, n_augmented=0)
    aug_rows = pair.augmented.sample_rows(n_aug, rng)
    return TransitionBatch(
        np.concatenate([obs_rows, aug_rows]), n_observed=b, n_augmented=n_aug
    )


def replay_age_report(pair: ReplayPair, current_update_count: int) -> tuple[int, int]:
    """Ages, in gradient updates, of the oldest element of each buffer."""

    def age(buf: RingBuffer) -> int:
        birth = buf.oldest_birth_update()
        if birth is None:
            return 0
        return current_update_count - birth

    return age(pair.observed), age(pair.augmented)
