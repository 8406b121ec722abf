"""PointReach: move the agent cluster onto the target cluster"""

from typing import List, Tuple

import numpy as np

from .base import AGENT_COLOR, TARGET_COLOR, EnvState, PointCloudEnv


class PointReachEnv(PointCloudEnv):
    name = "PointReach"

    def _place_objects(self, rng: np.random.Generator) -> EnvState:
        agent, target = self.sample_separated(rng, 2)
        return EnvState(agent_pos=agent, target_pos=target)

    def _clusters(self, state: EnvState) -> List[Tuple[np.ndarray, Tuple[float, float, float]]]:
        return [(state.agent_pos, AGENT_COLOR), (state.target_pos, TARGET_COLOR)]
