"""Metrics recorder - CSV rows per episode and per evaluation"""

import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

logger = logging.getLogger(__name__)

METRIC_COLUMNS = [
    "kind",
    "step",
    "episode",
    "episode_return",
    "episode_length",
    "success",
    "critic_loss",
    "actor_loss",
    "aux_loss",
    "alpha",
    "eval_success_rate",
    "eval_success_ci_low",
    "eval_success_ci_high",
    "eval_return_mean",
    "eval_return_ci_low",
    "eval_return_ci_high",
]

LOSS_KEYS = ("critic_loss", "actor_loss", "aux_loss", "alpha")


def _format(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


@dataclass
class UpdateAccumulator:
    """Running mean of update metrics between two episode rows"""
    sums: Dict[str, float] = field(default_factory=dict)
    count: int = 0

    def add(self, metrics: Dict[str, float]):
        if metrics.get("skipped"):
            return
        for key in LOSS_KEYS:
            if key in metrics:
                self.sums[key] = self.sums.get(key, 0.0) + float(metrics[key])
        self.count += 1

    def means(self) -> Dict[str, Optional[float]]:
        if self.count == 0:
            return {key: None for key in LOSS_KEYS}
        return {key: self.sums.get(key, 0.0) / self.count for key in LOSS_KEYS}

    def clear(self):
        self.sums = {}
        self.count = 0


class MetricsRecorder:
    """
    Collects metric rows and renders them as CSV.

    The whole file is rewritten on every flush, so a run restored from its
    rows produces the same bytes as an uninterrupted one.
    """

    def __init__(self, rows: Optional[List[Dict[str, Any]]] = None):
        self.rows: List[Dict[str, Any]] = list(rows or [])
        self.updates = UpdateAccumulator()

    def record_update(self, metrics: Dict[str, float]):
        self.updates.add(metrics)

    def record_episode(self, step: int, episode: int, episode_return: float, length: int, success: bool):
        row = {
            "kind": "episode",
            "step": step,
            "episode": episode,
            "episode_return": float(episode_return),
            "episode_length": length,
            "success": bool(success),
        }
        row.update(self.updates.means())
        self.updates.clear()
        self.rows.append(row)
        logger.debug(f"[MetricsRecorder] Episode {episode} at step {step}: return={episode_return:.3f} success={success}")

    def record_eval(self, step: int, episode: int, result: Any):
        """result is an EvalResult"""
        self.rows.append({
            "kind": "eval",
            "step": step,
            "episode": episode,
            "eval_success_rate": result.success_rate,
            "eval_success_ci_low": result.success_ci[0],
            "eval_success_ci_high": result.success_ci[1],
            "eval_return_mean": result.return_mean,
            "eval_return_ci_low": result.return_ci[0],
            "eval_return_ci_high": result.return_ci[1],
        })
        logger.info(
            f"[MetricsRecorder] Eval at step {step}: success={result.success_rate:.3f} "
            f"CI=[{result.success_ci[0]:.3f}, {result.success_ci[1]:.3f}] return={result.return_mean:.3f}"
        )

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(METRIC_COLUMNS)
        for row in self.rows:
            writer.writerow([_format(row.get(column)) for column in METRIC_COLUMNS])
        return buffer.getvalue()

    def write_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(self.to_csv())
        return path

    def episodes(self) -> List[Dict[str, Any]]:
        return [row for row in self.rows if row["kind"] == "episode"]

    def evals(self) -> List[Dict[str, Any]]:
        return [row for row in self.rows if row["kind"] == "eval"]

    def report(self) -> Dict[str, Any]:
        """Aggregate view for summary.json"""
        episodes = self.episodes()
        evals = self.evals()
        recent = episodes[-20:]
        return {
            "episodes": len(episodes),
            "evaluations": len(evals),
            "recent_success_rate": (sum(r["success"] for r in recent) / len(recent)) if recent else None,
            "recent_return_mean": (sum(r["episode_return"] for r in recent) / len(recent)) if recent else None,
            "last_eval": evals[-1] if evals else None,
        }

    def state(self) -> Dict[str, Any]:
        return {"rows": self.rows, "updates": {"sums": self.updates.sums, "count": self.updates.count}}

    @classmethod
    def from_state(cls, state: Dict[str, Any]) -> "MetricsRecorder":
        recorder = cls(state.get("rows", []))
        updates = state.get("updates", {})
        recorder.updates = UpdateAccumulator(dict(updates.get("sums", {})), int(updates.get("count", 0)))
        return recorder
