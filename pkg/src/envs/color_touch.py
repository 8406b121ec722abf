"""ColorTouch: touch the red cluster, avoid the blue one"""

from typing import List, Tuple

import numpy as np

from .base import AGENT_COLOR, DISTRACTOR_COLOR, TARGET_COLOR, EnvState, PointCloudEnv

DISTRACTOR_PENALTY = -5.0


class ColorTouchEnv(PointCloudEnv):
    """
    Two identical clusters, one red (target) and one blue (distractor).

    Which of the two sampled positions is red is a fair coin per episode,
    so geometry alone cannot tell them apart.
    """

    name = "ColorTouch"

    def _place_objects(self, rng: np.random.Generator) -> EnvState:
        agent, first, second = self.sample_separated(rng, 3)
        if rng.random() < 0.5:
            first, second = second, first
        return EnvState(agent_pos=agent, target_pos=first, distractor_pos=second)

    def _clusters(self, state: EnvState) -> List[Tuple[np.ndarray, Tuple[float, float, float]]]:
        return [
            (state.agent_pos, AGENT_COLOR),
            (state.target_pos, TARGET_COLOR),
            (state.distractor_pos, DISTRACTOR_COLOR),
        ]

    def _score(self, state: EnvState) -> Tuple[float, bool, bool]:
        reward, done, success = super()._score(state)
        if done:
            return reward, done, success
        if np.linalg.norm(state.agent_pos - state.distractor_pos) < self.config.success_radius:
            return DISTRACTOR_PENALTY, True, False
        return reward, done, success
