"""Replay records"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from src.errors import InvalidArgumentError
from src.models.cloud import PointCloud


@dataclass(frozen=True)
class Transition:
    """One environment step as stored in the replay buffer.

    done is True only on genuine termination; timeouts keep done=False so
    the critic target keeps bootstrapping.
    """
    obs: PointCloud
    state: Optional[np.ndarray]
    action: np.ndarray
    reward: float
    done: bool
    next_obs: PointCloud
    next_state: Optional[np.ndarray]

    def __post_init__(self):
        action = np.asarray(self.action, dtype=np.float64)
        if action.ndim != 1:
            raise InvalidArgumentError(f"action must be a vector, got shape {action.shape}")
        if np.any(np.abs(action) > 1.0 + 1e-9):
            raise InvalidArgumentError("action components must lie in [-1, 1]")
        object.__setattr__(self, "action", action)
        self.obs.require_non_empty("obs")
        self.next_obs.require_non_empty("next_obs")


@dataclass
class TransitionBatch:
    """A sampled batch: clouds stay ragged, everything else is stacked"""
    obs: List[PointCloud]
    states: Optional[np.ndarray]
    actions: np.ndarray
    rewards: np.ndarray
    dones: np.ndarray
    next_obs: List[PointCloud]
    next_states: Optional[np.ndarray]

    def __len__(self) -> int:
        return len(self.obs)

    @classmethod
    def from_transitions(cls, transitions: List[Transition]) -> "TransitionBatch":
        has_state = transitions[0].state is not None
        return cls(
            obs=[t.obs for t in transitions],
            states=np.stack([t.state for t in transitions]) if has_state else None,
            actions=np.stack([t.action for t in transitions]),
            rewards=np.array([t.reward for t in transitions], dtype=np.float64),
            dones=np.array([t.done for t in transitions], dtype=np.float64),
            next_obs=[t.next_obs for t in transitions],
            next_states=np.stack([t.next_state for t in transitions]) if has_state else None
        )
