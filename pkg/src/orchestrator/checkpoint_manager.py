"""Checkpoint manager - run snapshots at eval boundaries, listing, resume checks"""

import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from src.errors import CheckpointError
from src.memory import read_checkpoint, read_checkpoint_meta, write_checkpoint

logger = logging.getLogger(__name__)

CHECKPOINT_SUFFIX = ".ckpt"
LATEST_NAME = "latest" + CHECKPOINT_SUFFIX


class CheckpointManager:
    """
    Writes one checkpoint per eval boundary into a run directory, lists
    them, and checks that a checkpoint is safe to resume with a given
    config.
    """

    def __init__(self, directory: Union[str, Path], retention: Optional[int] = None):
        self.directory = Path(directory)
        self.retention = retention

    def path_for(self, step: int) -> Path:
        return self.directory / f"step_{step:08d}{CHECKPOINT_SUFFIX}"

    def save(
        self,
        step: int,
        tensors: Dict[str, np.ndarray],
        meta: Dict[str, Any],
        label: Optional[str] = None
    ) -> Path:
        """
        Write a checkpoint for `step` and refresh latest.ckpt.

        Args:
            step: Environment step the snapshot belongs to
            tensors: Named arrays
            meta: JSON-able metadata
            label: Human-readable label (e.g. "eval", "final")

        Returns:
            Path of the step checkpoint
        """
        record = dict(meta)
        record["checkpoint"] = {
            "step": step,
            "label": label or f"step_{step}",
            "created_at": datetime.now(timezone.utc).isoformat(),
        }
        path = write_checkpoint(self.path_for(step), tensors, record)
        write_checkpoint(self.directory / LATEST_NAME, tensors, record)
        logger.info(f"[CheckpointManager] Created checkpoint at step {step} ({record['checkpoint']['label']})")
        self._apply_retention()
        return path

    def list_checkpoints(self) -> List[Dict[str, Any]]:
        """Metadata of every step checkpoint, newest first (payloads are not read)"""
        out = []
        for path in sorted(self.directory.glob(f"step_*{CHECKPOINT_SUFFIX}")):
            try:
                meta = read_checkpoint_meta(path)
            except CheckpointError as exc:
                logger.warning(f"[CheckpointManager] Skipping unreadable {path.name}: {exc}")
                continue
            info = meta.get("checkpoint", {})
            out.append({
                "path": str(path),
                "step": info.get("step"),
                "label": info.get("label"),
                "created_at": info.get("created_at"),
            })
        out.sort(key=lambda x: x.get("step") or 0, reverse=True)
        return out

    def latest(self) -> Optional[Path]:
        path = self.directory / LATEST_NAME
        return path if path.exists() else None

    def load(self, path: Union[str, Path, None] = None) -> Tuple[Dict[str, np.ndarray], Dict[str, Any]]:
        """Load the given checkpoint, or latest.ckpt when no path is given"""
        if path is None:
            path = self.latest()
            if path is None:
                raise CheckpointError(f"no checkpoint in {self.directory}")
        tensors, meta = read_checkpoint(path)
        logger.info(f"[CheckpointManager] Loaded {path} (step {meta.get('checkpoint', {}).get('step')})")
        return tensors, meta

    @staticmethod
    def validate_resume(meta: Dict[str, Any], config: Dict[str, Any]) -> Dict[str, Any]:
        """
        Check that a checkpoint was produced by the same run config.

        Args:
            meta: Checkpoint metadata
            config: `RunConfig.model_dump(mode="json")` of the run to resume

        Returns:
            {"safe": bool, "reason"?: str, "differences"?: [...]}
        """
        saved = meta.get("run_config")
        if saved is None:
            return {"safe": False, "reason": "not a training checkpoint"}

        ignored = {"total_steps", "output_dir"}
        differences = sorted(
            key for key in set(saved) | set(config)
            if key not in ignored and saved.get(key) != config.get(key)
        )
        if differences:
            return {"safe": False, "reason": "config differs", "differences": differences}
        return {"safe": True, "step": meta.get("checkpoint", {}).get("step")}

    def _apply_retention(self):
        if not self.retention:
            return
        paths = sorted(self.directory.glob(f"step_*{CHECKPOINT_SUFFIX}"))
        for stale in paths[:-self.retention]:
            stale.unlink()
            logger.debug(f"[CheckpointManager] Removed {stale.name} (retention {self.retention})")
