"""Training, evaluation, checkpointing and benchmarking around the agent"""

from .metrics import METRIC_COLUMNS, MetricsRecorder, UpdateAccumulator
from .evaluator import (
    BOOTSTRAP_RESAMPLES,
    EpisodeOutcome,
    EvalResult,
    Evaluator,
    bootstrap_ci,
    evaluate_policy,
    run_episode,
)
from .checkpoint_manager import CheckpointManager
from .trainer import Trainer, build_manifest
from .pretrain import AuxPretrainer, PretrainResult
from .benchmark import KERNELS, BenchRow, benchmark_kernel, rows_to_csv

__all__ = [
    "METRIC_COLUMNS",
    "MetricsRecorder",
    "UpdateAccumulator",
    "BOOTSTRAP_RESAMPLES",
    "EpisodeOutcome",
    "EvalResult",
    "Evaluator",
    "bootstrap_ci",
    "evaluate_policy",
    "run_episode",
    "CheckpointManager",
    "Trainer",
    "build_manifest",
    "AuxPretrainer",
    "PretrainResult",
    "KERNELS",
    "BenchRow",
    "benchmark_kernel",
    "rows_to_csv",
]
