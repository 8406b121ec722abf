"""Ring replay buffer for variable-size point-cloud transitions"""

import logging
import threading
from typing import Dict, List, Optional

import numpy as np

from src.errors import InvalidArgumentError, InvalidStateError
from src.geometry.sampling import SeedLike, as_generator
from src.models.cloud import PointCloud
from src.models.transition import Transition, TransitionBatch

logger = logging.getLogger(__name__)


class ReplayBuffer:
    """
    Fixed-capacity FIFO of transitions.

    Clouds are stored raw (ragged) and tokenized by the learner at sample
    time. push and sample may be called from different threads.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise InvalidArgumentError(f"replay capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._storage: List[Transition] = []
        self._next = 0
        self._lock = threading.Lock()

    def __len__(self) -> int:
        with self._lock:
            return len(self._storage)

    def push(self, transition: Transition):
        """Append a transition, evicting the oldest once full"""
        with self._lock:
            if len(self._storage) < self.capacity:
                self._storage.append(transition)
            else:
                self._storage[self._next] = transition
            self._next = (self._next + 1) % self.capacity

    def sample(self, batch_size: int, seed: SeedLike) -> TransitionBatch:
        """
        Draw batch_size transitions uniformly with replacement.

        Raises:
            InvalidStateError: If the buffer is empty
        """
        if batch_size < 1:
            raise InvalidArgumentError(f"batch_size must be >= 1, got {batch_size}")
        rng = as_generator(seed)
        with self._lock:
            if not self._storage:
                raise InvalidStateError("cannot sample from an empty replay buffer")
            indices = rng.integers(0, len(self._storage), size=batch_size)
            picked = [self._storage[i] for i in indices]
        return TransitionBatch.from_transitions(picked)

    def oldest_first(self) -> List[Transition]:
        with self._lock:
            if len(self._storage) < self.capacity:
                return list(self._storage)
            return self._storage[self._next:] + self._storage[:self._next]

    # -------------------------------------------------------- serialization

    def to_arrays(self) -> Dict[str, np.ndarray]:
        """Flatten the contents (in storage order) into named arrays"""
        with self._lock:
            items = list(self._storage)
            cursor = self._next
        arrays: Dict[str, np.ndarray] = {
            "meta": np.array([self.capacity, cursor, len(items)], dtype=np.int64)
        }
        if not items:
            return arrays

        for prefix, clouds in (("obs", [t.obs for t in items]), ("next_obs", [t.next_obs for t in items])):
            arrays[f"{prefix}.offsets"] = np.cumsum([0] + [c.num_points for c in clouds]).astype(np.int64)
            arrays[f"{prefix}.positions"] = np.concatenate([c.positions for c in clouds])
            if clouds[0].has_colors:
                arrays[f"{prefix}.colors"] = np.concatenate([c.colors for c in clouds])

        arrays["actions"] = np.stack([t.action for t in items])
        arrays["rewards"] = np.array([t.reward for t in items], dtype=np.float64)
        arrays["dones"] = np.array([t.done for t in items], dtype=np.uint8)
        if items[0].state is not None:
            arrays["states"] = np.stack([t.state for t in items]).astype(np.float64)
            arrays["next_states"] = np.stack([t.next_state for t in items]).astype(np.float64)
        return arrays

    @classmethod
    def from_arrays(cls, arrays: Dict[str, np.ndarray]) -> "ReplayBuffer":
        capacity, cursor, count = (int(v) for v in arrays["meta"])
        buffer = cls(capacity)
        if count == 0:
            return buffer

        def clouds(prefix: str) -> List[PointCloud]:
            offsets = arrays[f"{prefix}.offsets"]
            positions = arrays[f"{prefix}.positions"]
            colors = arrays.get(f"{prefix}.colors")
            return [
                PointCloud(
                    positions[offsets[i]:offsets[i + 1]],
                    None if colors is None else colors[offsets[i]:offsets[i + 1]]
                )
                for i in range(count)
            ]

        obs, next_obs = clouds("obs"), clouds("next_obs")
        states: Optional[np.ndarray] = arrays.get("states")
        next_states: Optional[np.ndarray] = arrays.get("next_states")
        buffer._storage = [
            Transition(
                obs=obs[i],
                state=None if states is None else states[i],
                action=arrays["actions"][i],
                reward=float(arrays["rewards"][i]),
                done=bool(arrays["dones"][i]),
                next_obs=next_obs[i],
                next_state=None if next_states is None else next_states[i]
            )
            for i in range(count)
        ]
        buffer._next = cursor
        logger.debug(f"[ReplayBuffer] Restored {count} transitions (capacity {capacity})")
        return buffer
