"""Shared machinery of the synthetic point-cloud tasks"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.errors import InvalidArgumentError, InvalidStateError
from src.geometry import preprocess
from src.geometry.sampling import SeedLike, as_generator
from src.models.cloud import PointCloud
from src.models.config import EnvConfig

logger = logging.getLogger(__name__)

ARENA_LOW = -1.0
ARENA_HIGH = 1.0
ACTION_DIM = 3

AGENT_COLOR = (0.5, 0.5, 0.5)
TARGET_COLOR = (1.0, 0.0, 0.0)
DISTRACTOR_COLOR = (0.0, 0.0, 1.0)
FLOOR_COLOR = (0.2, 0.2, 0.2)


@dataclass
class EnvState:
    """Everything needed to continue an episode exactly"""
    agent_pos: np.ndarray
    target_pos: np.ndarray
    distractor_pos: Optional[np.ndarray] = None
    step_count: int = 0
    rotation: float = 0.0
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    finished: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "agent_pos": self.agent_pos.tolist(),
            "target_pos": self.target_pos.tolist(),
            "distractor_pos": None if self.distractor_pos is None else self.distractor_pos.tolist(),
            "step_count": self.step_count,
            "rotation": self.rotation,
            "translation": self.translation.tolist(),
            "finished": self.finished,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EnvState":
        distractor = data.get("distractor_pos")
        return cls(
            agent_pos=np.asarray(data["agent_pos"], dtype=np.float64),
            target_pos=np.asarray(data["target_pos"], dtype=np.float64),
            distractor_pos=None if distractor is None else np.asarray(distractor, dtype=np.float64),
            step_count=int(data["step_count"]),
            rotation=float(data["rotation"]),
            translation=np.asarray(data["translation"], dtype=np.float64),
            finished=bool(data["finished"])
        )


@dataclass
class StepResult:
    observation: PointCloud
    state: np.ndarray
    reward: float
    done: bool
    truncated: bool
    success: bool = False

    @property
    def episode_over(self) -> bool:
        return self.done or self.truncated


def sphere_points(center: np.ndarray, radius: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """count points uniformly on a sphere surface"""
    directions = rng.standard_normal((count, 3))
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    directions = directions / np.where(norms > 0.0, norms, 1.0)
    return center + radius * directions


def rotation_about_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


class PointCloudEnv(ABC):
    """
    Episodic task with point-cloud observations.

    Subclasses decide which objects exist and how a step is scored; this
    base samples placements and the per-episode viewpoint, renders clusters
    plus a floor, applies the viewpoint and runs the preprocessing pipeline.
    """

    name = "base"
    action_dim = ACTION_DIM
    state_dim = 3

    def __init__(self, config: EnvConfig):
        self.config = config
        self.rng: np.random.Generator = np.random.default_rng(0)
        self._state: Optional[EnvState] = None

    # ----------------------------------------------------------- subclass API

    @abstractmethod
    def _place_objects(self, rng: np.random.Generator) -> EnvState:
        """Sample agent/target(/distractor) positions for a new episode"""
        pass

    @abstractmethod
    def _clusters(self, state: EnvState) -> List[Tuple[np.ndarray, Tuple[float, float, float]]]:
        """(center, color) of every rendered object"""
        pass

    def _score(self, state: EnvState) -> Tuple[float, bool, bool]:
        """(reward, done, success) after the agent moved"""
        distance = float(np.linalg.norm(state.agent_pos - state.target_pos))
        if distance < self.config.success_radius:
            return -distance + 10.0, True, True
        return -distance, False, False

    # ----------------------------------------------------------------- public

    @property
    def state(self) -> EnvState:
        if self._state is None:
            raise InvalidStateError("environment has not been reset")
        return self._state

    def sample_separated(self, rng: np.random.Generator, count: int) -> List[np.ndarray]:
        """count positions in the arena with pairwise distance >= min_separation"""
        separation = self.config.min_separation
        while True:
            points = [rng.uniform(ARENA_LOW, ARENA_HIGH, size=3) for _ in range(count)]
            ok = all(
                np.linalg.norm(points[i] - points[j]) >= separation
                for i in range(count) for j in range(i + 1, count)
            )
            if ok:
                return points

    def reset(self, seed: SeedLike) -> Tuple[PointCloud, np.ndarray]:
        """
        Start an episode.

        Args:
            seed: Episode seed; the same seed reproduces the episode exactly

        Returns:
            (observation, state vector)
        """
        self.rng = as_generator(seed)
        state = self._place_objects(self.rng)
        max_angle = np.deg2rad(self.config.max_rotation_deg)
        state.rotation = float(self.rng.uniform(-max_angle, max_angle))
        state.translation = self.rng.uniform(-self.config.max_translation, self.config.max_translation, size=3)
        self._state = state
        logger.debug(
            f"[{self.name}] Reset: agent={state.agent_pos.round(3).tolist()} "
            f"target={state.target_pos.round(3).tolist()} rotation={np.rad2deg(state.rotation):.1f}deg"
        )
        return self.render(state, self.rng), self.state_vector()

    def step(self, action: np.ndarray) -> StepResult:
        """
        Move the agent by step_size * action and score the result.

        Raises:
            InvalidStateError: If the episode already ended
        """
        state = self.state
        if state.finished:
            raise InvalidStateError("step() called after the episode ended; call reset()")
        action = np.asarray(action, dtype=np.float64)
        if action.shape != (self.action_dim,):
            raise InvalidArgumentError(f"action must have shape ({self.action_dim},), got {action.shape}")
        action = np.clip(action, -1.0, 1.0)

        state.agent_pos = np.clip(state.agent_pos + self.config.step_size * action, ARENA_LOW, ARENA_HIGH)
        state.step_count += 1
        reward, done, success = self._score(state)
        truncated = not done and state.step_count >= self.config.horizon
        state.finished = done or truncated
        return StepResult(self.render(state, self.rng), self.state_vector(), reward, done, truncated, success)

    def state_vector(self) -> np.ndarray:
        """Proprioception analogue: the agent position only"""
        return self.state.agent_pos.copy()

    def render(self, state: EnvState, rng: np.random.Generator) -> PointCloud:
        """Clusters and floor, viewpoint-transformed, then preprocessed"""
        cfg = self.config
        positions = []
        colors = []
        for center, color in self._clusters(state):
            positions.append(sphere_points(center, cfg.cluster_radius, cfg.cluster_points, rng))
            colors.append(np.tile(color, (cfg.cluster_points, 1)))
        if cfg.floor_points:
            floor = np.column_stack([
                rng.uniform(ARENA_LOW, ARENA_HIGH, size=(cfg.floor_points, 2)),
                np.full(cfg.floor_points, ARENA_LOW - cfg.cluster_radius)
            ])
            positions.append(floor)
            colors.append(np.tile(FLOOR_COLOR, (cfg.floor_points, 1)))

        rotation = rotation_about_z(state.rotation)
        points = np.concatenate(positions) @ rotation.T + state.translation
        target = rotation @ state.target_pos + state.translation

        if cfg.emits_color:
            rgb = np.zeros_like(points) if cfg.zero_colors else np.concatenate(colors)
            cloud = PointCloud(points, rgb)
        else:
            cloud = PointCloud(points)
        return preprocess(cloud, cfg.pipeline, rng, target=target)

    # ------------------------------------------------------------ privileged

    def goal_position(self) -> np.ndarray:
        return self.state.target_pos.copy()

    def agent_position(self) -> np.ndarray:
        return self.state.agent_pos.copy()

    # ----------------------------------------------------------------- resume

    def get_state(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "episode": None if self._state is None else self._state.to_dict(),
            "rng": self.rng.bit_generator.state,
        }

    def set_state(self, data: Dict[str, Any]):
        if data.get("name") != self.name:
            raise InvalidArgumentError(f"state belongs to {data.get('name')!r}, not {self.name!r}")
        episode = data.get("episode")
        self._state = None if episode is None else EnvState.from_dict(episode)
        self.rng = np.random.default_rng(0)
        self.rng.bit_generator.state = data["rng"]
