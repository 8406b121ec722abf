"""Base policy interface shared by learned and scripted agents"""

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from src.models.cloud import PointCloud


class BaseAgent(ABC):
    """Anything that maps an observation (and optional state) to an action in [-1, 1]^A"""

    name: str = "base"

    @abstractmethod
    def act(
        self,
        observation: PointCloud,
        state: Optional[np.ndarray] = None,
        deterministic: bool = False
    ) -> np.ndarray:
        """
        Choose an action

        Args:
            observation: Preprocessed point cloud
            state: Low-dim state vector, if the task provides one
            deterministic: Evaluation mode (no exploration noise)

        Returns:
            Action vector with components in [-1, 1]
        """
        pass

    def reset(self):
        """Called at the start of every episode"""
        pass
