"""Episode traces as point-cloud files"""

import logging
from pathlib import Path
from typing import List, Union

from src.agents.base import BaseAgent
from src.export import write_point_cloud
from .base import PointCloudEnv

logger = logging.getLogger(__name__)


def export_trace(
    env: PointCloudEnv,
    policy: BaseAgent,
    out_dir: Union[str, Path],
    episodes: int = 1,
    seed: int = 0
) -> List[Path]:
    """
    Roll out `episodes` episodes and write every observation to
    `out_dir/episode_XXX/step_YYY.xyz`.

    Returns:
        Written file paths in rollout order
    """
    out_dir = Path(out_dir)
    written: List[Path] = []
    for episode in range(episodes):
        policy.reset()
        observation, state = env.reset(seed + episode)
        episode_dir = out_dir / f"episode_{episode:03d}"
        step = 0
        finished = False
        while True:
            comment = f"{env.name} episode {episode} step {step}"
            written.append(write_point_cloud(episode_dir / f"step_{step:03d}.xyz", observation, comment))
            if finished:
                break
            result = env.step(policy.act(observation, state, deterministic=True))
            observation, state = result.observation, result.state
            finished = result.episode_over
            step += 1
        logger.info(f"[Trace] Episode {episode}: {step} steps written to {episode_dir}")
    return written
