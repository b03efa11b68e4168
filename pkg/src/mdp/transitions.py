"""Transition records, mini-batches and the replay / demonstration store."""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional

import numpy as np

from src.errors import InvalidBatchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Transition:
    s: int
    a: Optional[int]
    s_next: int
    absorbing_next: bool


@dataclass
class TransitionBatch:
    """Column view of transitions consumed by losses and critic updates.

    ``a`` is None for action-free (observation-only) batches.
    """

    s: np.ndarray
    a: Optional[np.ndarray]
    s_next: np.ndarray
    absorbing: np.ndarray

    def __len__(self) -> int:
        return len(self.s)

    @classmethod
    def from_transitions(cls, transitions: Iterable[Transition]) -> "TransitionBatch":
        records = list(transitions)
        has_actions = all(t.a is not None for t in records)
        return cls(
            s=np.array([t.s for t in records], dtype=np.int64),
            a=np.array([t.a for t in records], dtype=np.int64) if has_actions else None,
            s_next=np.array([t.s_next for t in records], dtype=np.int64),
            absorbing=np.array([t.absorbing_next for t in records], dtype=bool),
        )

    def with_actions(self, actions: np.ndarray) -> "TransitionBatch":
        return TransitionBatch(self.s, np.asarray(actions, dtype=np.int64), self.s_next, self.absorbing)

    def subset(self, mask: np.ndarray) -> "TransitionBatch":
        mask = np.asarray(mask, dtype=bool)
        return TransitionBatch(
            self.s[mask], None if self.a is None else self.a[mask], self.s_next[mask], self.absorbing[mask]
        )

    def require_actions(self) -> np.ndarray:
        if len(self) == 0:
            raise InvalidBatchError("batch is empty")
        if self.a is None:
            raise InvalidBatchError("batch carries no actions; label it with an inverse dynamics model first")
        return self.a


class TransitionSet:
    """Append-only transition store with optional ring-buffer capacity.

    Actions are always kept internally. When ``observed_actions`` is False the
    learner-visible views (``sample``, ``records``, JSON-lines output) drop
    them; ``scoring_batch`` still exposes them for IDM accuracy.
    A set loaded from an action-free file has ``actions_known`` False and
    refuses ``scoring_batch``.
    """

    def __init__(self, capacity: Optional[int] = None, observed_actions: bool = True):
        if capacity is not None and capacity <= 0:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.observed_actions = observed_actions
        self.actions_known = True
        allocated = capacity if capacity is not None else 1024
        self._s = np.zeros(allocated, dtype=np.int64)
        self._a = np.zeros(allocated, dtype=np.int64)
        self._s_next = np.zeros(allocated, dtype=np.int64)
        self._absorbing = np.zeros(allocated, dtype=bool)
        self._ptr = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def add(self, transition: Transition) -> None:
        if transition.a is None:
            raise InvalidBatchError("stored transitions must carry their true action")
        if self.capacity is None and self._size == len(self._s):
            self._grow()
        idx = self._ptr
        self._s[idx] = transition.s
        self._a[idx] = transition.a
        self._s_next[idx] = transition.s_next
        self._absorbing[idx] = bool(transition.absorbing_next)
        if self.capacity is None:
            self._ptr += 1
        else:
            self._ptr = (self._ptr + 1) % self.capacity
        self._size = min(self._size + 1, len(self._s))

    def _grow(self) -> None:
        for name in ("_s", "_a", "_s_next", "_absorbing"):
            column = getattr(self, name)
            setattr(self, name, np.concatenate([column, np.zeros_like(column)]))

    def extend(self, transitions: Iterable[Transition]) -> None:
        for transition in transitions:
            self.add(transition)

    def _chronological(self) -> np.ndarray:
        n = self._size
        if self.capacity is None or n < self.capacity:
            return np.arange(n)
        return (np.arange(n) + self._ptr) % n

    def _batch(self, index: np.ndarray, reveal: bool) -> TransitionBatch:
        show = reveal or self.observed_actions
        return TransitionBatch(
            s=self._s[index],
            a=self._a[index] if show else None,
            s_next=self._s_next[index],
            absorbing=self._absorbing[index],
        )

    def as_batch(self) -> TransitionBatch:
        return self._batch(self._chronological(), reveal=False)

    def scoring_batch(self) -> TransitionBatch:
        """All records with their true actions, for scoring only."""
        if not self.actions_known:
            raise InvalidBatchError("true actions are unknown: the set was loaded without an action field")
        return self._batch(self._chronological(), reveal=True)

    def sample(self, batch_size: int, rng: np.random.Generator) -> TransitionBatch:
        """Uniform sampling with replacement."""
        if len(self) == 0:
            raise InvalidBatchError("cannot sample from an empty transition set")
        index = rng.integers(0, len(self), size=batch_size)
        return self._batch(index, reveal=False)

    def records(self) -> List[Transition]:
        batch = self.as_batch()
        actions = batch.a if batch.a is not None else [None] * len(batch)
        return [
            Transition(int(s), None if a is None else int(a), int(sn), bool(ab))
            for s, a, sn, ab in zip(batch.s, actions, batch.s_next, batch.absorbing)
        ]

    def save_jsonl(self, path) -> Path:
        """Write one ``{"s", "a", "s_next", "absorbing"}`` object per line.

        The action field is omitted for observation-only sets.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            for t in self.records():
                record = {"s": t.s}
                if self.observed_actions:
                    record["a"] = t.a
                record.update({"s_next": t.s_next, "absorbing": t.absorbing_next})
                f.write(json.dumps(record) + "\n")
        logger.info(f"Wrote {len(self)} transitions to {path}")
        return path

    @classmethod
    def load_jsonl(cls, path, capacity: Optional[int] = None) -> "TransitionSet":
        """Read a JSON-lines file; files without actions load as observation-only."""
        rows = []
        with open(path, "r", encoding="utf-8") as f:
            for line_no, line in enumerate(f, 1):
                if not line.strip():
                    continue
                record = json.loads(line)
                unknown = set(record) - {"s", "a", "s_next", "absorbing"}
                if unknown:
                    raise InvalidBatchError(f"{path}:{line_no}: unknown fields {sorted(unknown)}")
                rows.append(record)

        observed = all("a" in r for r in rows)
        store = cls(capacity=capacity, observed_actions=observed)
        store.actions_known = observed
        for r in rows:
            # observation-only files carry no action; 0 is a placeholder hidden by actions_known
            store.add(Transition(int(r["s"]), int(r.get("a", 0)), int(r["s_next"]), bool(r["absorbing"])))
        return store
