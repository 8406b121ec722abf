"""Training loop - collect, update, evaluate, checkpoint, resume"""

import json
import logging
import platform
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numba
import numpy as np
import scipy

import src
from src.agents import SACAgent
from src.envs import make_env
from src.errors import CheckpointError
from src.memory import ReplayBuffer
from src.models.cloud import PointCloud
from src.models.config import RunConfig
from src.models.transition import Transition
from .checkpoint_manager import CheckpointManager
from .evaluator import EvalResult, Evaluator
from .metrics import MetricsRecorder

logger = logging.getLogger(__name__)

METRICS_FILE = "metrics.csv"
MANIFEST_FILE = "manifest.json"
SUMMARY_FILE = "summary.json"
CHECKPOINT_DIR = "checkpoints"

# Entropy tag separating the trainer's streams from the agent's
_TRAINER_STREAM = 7919


def _strip(tensors: Dict[str, np.ndarray], prefix: str) -> Dict[str, np.ndarray]:
    return {name[len(prefix):]: array for name, array in tensors.items() if name.startswith(prefix)}


def build_manifest(config: RunConfig) -> Dict[str, Any]:
    """Config echo plus versions, enough to rerun exactly"""
    return {
        "package": "pointpatch-rl",
        "version": src.__version__,
        "seed": config.seed,
        "config": config.model_dump(mode="json"),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "numba": numba.__version__,
        "scipy": scipy.__version__,
        "created_at": datetime.now(timezone.utc).isoformat(),
    }


def _write_json(path: Path, data: Dict[str, Any]):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)


class Trainer:
    """
    Off-policy training loop for one RunConfig.

    Each environment step pushes one transition; from `learning_starts` on,
    `replay_ratio` updates follow every step. Every `eval_interval` steps
    the policy is evaluated, the metrics CSV is rewritten and a checkpoint
    is saved. Uniform random actions are used before `learning_starts`.
    """

    def __init__(self, config: RunConfig, output_dir: Union[str, Path, None] = None):
        self.config = config
        self.output_dir = Path(output_dir or config.output_dir)

        self.env = make_env(config.env)
        self.eval_env = make_env(config.env)
        self.agent = SACAgent(
            config.encoder,
            config.agent,
            action_dim=self.env.action_dim,
            state_dim=self.env.state_dim,
            aux=config.aux,
            seed=config.seed
        )
        self.buffer = ReplayBuffer(config.agent.replay_capacity)
        self.recorder = MetricsRecorder()
        self.checkpoints = CheckpointManager(self.output_dir / CHECKPOINT_DIR)
        self.evaluator = Evaluator(self.eval_env)

        episode_seq, warmup_seq = np.random.SeedSequence([config.seed, _TRAINER_STREAM]).spawn(2)
        self.episode_rng = np.random.default_rng(episode_seq)
        self.warmup_rng = np.random.default_rng(warmup_seq)

        self.step = 0
        self.episode = 0
        self.episode_return = 0.0
        self.episode_length = 0
        self.needs_reset = True
        self.observation: Optional[PointCloud] = None
        self.state: Optional[np.ndarray] = None
        self.last_eval: Optional[EvalResult] = None

    @property
    def metrics_path(self) -> Path:
        return self.output_dir / METRICS_FILE

    # ------------------------------------------------------------------- loop

    def collect_step(self):
        """One environment step plus the updates that follow it"""
        if self.needs_reset:
            seed = int(self.episode_rng.integers(0, 2**31 - 1))
            self.observation, self.state = self.env.reset(seed)
            self.agent.reset()
            self.episode_return = 0.0
            self.episode_length = 0
            self.needs_reset = False

        if self.step < self.config.agent.learning_starts:
            action = self.warmup_rng.uniform(-1.0, 1.0, size=self.env.action_dim)
        else:
            action = self.agent.act(self.observation, self.state)

        result = self.env.step(action)
        self.buffer.push(Transition(
            obs=self.observation,
            state=self.state,
            action=np.clip(action, -1.0, 1.0),
            reward=result.reward,
            done=result.done,
            next_obs=result.observation,
            next_state=result.state
        ))
        self.step += 1
        self.episode_return += result.reward
        self.episode_length += 1

        if self.step >= self.config.agent.learning_starts:
            for _ in range(self.config.agent.replay_ratio):
                self.recorder.record_update(self.agent.update_step(self.buffer))

        if result.episode_over:
            self.episode += 1
            self.recorder.record_episode(
                self.step, self.episode, self.episode_return, self.episode_length, result.success
            )
            self.needs_reset = True
        else:
            self.observation, self.state = result.observation, result.state

    def evaluate(self) -> EvalResult:
        result = self.evaluator.evaluate(self.agent, self.config.eval_episodes, seed=self.config.seed + self.step)
        self.recorder.record_eval(self.step, self.episode, result)
        self.last_eval = result
        return result

    def run(self, resume: Union[str, Path, None] = None) -> Dict[str, Any]:
        """
        Train until total_steps.

        Args:
            resume: Checkpoint to continue from

        Returns:
            The summary also written to summary.json
        """
        if resume is not None:
            self.restore(resume)
        _write_json(self.output_dir / MANIFEST_FILE, build_manifest(self.config))
        logger.info(
            f"[Trainer] Training {self.config.env.name.value} from step {self.step} "
            f"to {self.config.total_steps} (aux={self.config.aux}, seed={self.config.seed})"
        )

        started = time.perf_counter()
        while self.step < self.config.total_steps:
            self.collect_step()
            if self.step % self.config.eval_interval == 0:
                self.evaluate()
                self.recorder.write_csv(self.metrics_path)
                self.save_checkpoint(label="eval")

        self.recorder.write_csv(self.metrics_path)
        summary = {
            "steps": self.step,
            "episodes": self.episode,
            "wall_clock_seconds": time.perf_counter() - started,
            "final_eval": None if self.last_eval is None else self.last_eval.to_dict(),
            "metrics": self.recorder.report(),
        }
        _write_json(self.output_dir / SUMMARY_FILE, summary)
        logger.info(f"[Trainer] Finished at step {self.step} after {self.episode} episodes")
        return summary

    # ------------------------------------------------------------ checkpoints

    def checkpoint_state(self):
        """(tensors, meta) for a run snapshot"""
        agent_tensors, agent_meta = self.agent.state_dict()
        tensors = {f"agent.{name}": array for name, array in agent_tensors.items()}
        tensors.update({f"buffer.{name}": array for name, array in self.buffer.to_arrays().items()})
        if not self.needs_reset:
            tensors["trainer.obs.positions"] = self.observation.positions
            if self.observation.has_colors:
                tensors["trainer.obs.colors"] = self.observation.colors
            tensors["trainer.state"] = np.asarray(self.state, dtype=np.float64)

        meta = {
            "kind": "run",
            "run_config": self.config.model_dump(mode="json"),
            "agent": agent_meta,
            "env": self.env.get_state(),
            "metrics": self.recorder.state(),
            "trainer": {
                "step": self.step,
                "episode": self.episode,
                "episode_return": self.episode_return,
                "episode_length": self.episode_length,
                "needs_reset": self.needs_reset,
                "episode_rng": self.episode_rng.bit_generator.state,
                "warmup_rng": self.warmup_rng.bit_generator.state,
                "last_eval": None if self.last_eval is None else self.last_eval.to_dict(),
            },
        }
        return tensors, meta

    def save_checkpoint(self, label: Optional[str] = None) -> Path:
        tensors, meta = self.checkpoint_state()
        return self.checkpoints.save(self.step, tensors, meta, label)

    def restore(self, path: Union[str, Path]):
        """
        Continue from a run checkpoint.

        Raises:
            CheckpointError: If the checkpoint belongs to a different config
        """
        tensors, meta = self.checkpoints.load(path)
        safety = self.checkpoints.validate_resume(meta, self.config.model_dump(mode="json"))
        if not safety["safe"]:
            raise CheckpointError(
                f"cannot resume from {path}: {safety['reason']} {safety.get('differences', '')}".strip()
            )

        self.agent.load_state_dict(_strip(tensors, "agent."), meta["agent"])
        self.buffer = ReplayBuffer.from_arrays(_strip(tensors, "buffer."))
        self.env.set_state(meta["env"])
        self.recorder = MetricsRecorder.from_state(meta["metrics"])

        trainer = meta["trainer"]
        self.step = int(trainer["step"])
        self.episode = int(trainer["episode"])
        self.episode_return = float(trainer["episode_return"])
        self.episode_length = int(trainer["episode_length"])
        self.needs_reset = bool(trainer["needs_reset"])
        self.episode_rng.bit_generator.state = trainer["episode_rng"]
        self.warmup_rng.bit_generator.state = trainer["warmup_rng"]
        if not self.needs_reset:
            self.observation = PointCloud(tensors["trainer.obs.positions"], tensors.get("trainer.obs.colors"))
            self.state = tensors["trainer.state"]
        last_eval = trainer.get("last_eval")
        if last_eval is not None:
            self.last_eval = EvalResult(
                episodes=last_eval["episodes"],
                success_rate=last_eval["success_rate"],
                success_ci=tuple(last_eval["success_ci"]),
                return_mean=last_eval["return_mean"],
                return_ci=tuple(last_eval["return_ci"]),
            )
        logger.info(f"[Trainer] Resumed from {path} at step {self.step} (episode {self.episode})")
