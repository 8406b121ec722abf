"""Non-learning baselines: privileged greedy oracle and uniform random policy"""

from typing import Callable, Optional

import numpy as np

from src.geometry.sampling import SeedLike, as_generator
from src.models.cloud import PointCloud
from .base import BaseAgent


class ScriptedReachPolicy(BaseAgent):
    """
    Moves straight at the goal at full speed.

    Reads the goal and agent positions through a privileged callback
    (usually bound to an environment), so it ignores the observation.
    """

    name = "scripted"

    def __init__(self, goal_fn: Callable[[], np.ndarray], position_fn: Callable[[], np.ndarray], step_size: float = 0.05):
        self.goal_fn = goal_fn
        self.position_fn = position_fn
        self.step_size = step_size

    def act(self, observation: PointCloud, state: Optional[np.ndarray] = None, deterministic: bool = False) -> np.ndarray:
        delta = np.asarray(self.goal_fn(), dtype=np.float64) - np.asarray(self.position_fn(), dtype=np.float64)
        return np.clip(delta / self.step_size, -1.0, 1.0)


class RandomPolicy(BaseAgent):
    """Uniform actions in [-1, 1]^A"""

    name = "random"

    def __init__(self, action_dim: int, seed: SeedLike = 0):
        self.action_dim = action_dim
        self.rng = as_generator(seed)

    def act(self, observation: PointCloud, state: Optional[np.ndarray] = None, deterministic: bool = False) -> np.ndarray:
        return self.rng.uniform(-1.0, 1.0, size=self.action_dim)
