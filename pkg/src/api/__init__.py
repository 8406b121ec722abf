"""API layer - single entry points for training, evaluation and tooling"""

from .runs import (
    create_stub,
    load_encoder,
    run_benchmark,
    run_evaluation,
    run_export_trace,
    run_pretrain_aux,
    run_reconstruction,
    run_training,
)

__all__ = [
    "create_stub",
    "load_encoder",
    "run_benchmark",
    "run_evaluation",
    "run_export_trace",
    "run_pretrain_aux",
    "run_reconstruction",
    "run_training",
]
