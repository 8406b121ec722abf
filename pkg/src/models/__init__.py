"""Schemas and data containers for PointPatchRL"""

from .cloud import PointCloud, PatchSet
from .transition import Transition, TransitionBatch
from .settings import RuntimeSettings, apply_thread_cap
from .config import (
    NormalizationMode,
    NormalizationSpec,
    PipelineConfig,
    EncoderConfig,
    AgentConfig,
    Precision,
    EnvName,
    EnvConfig,
    RunConfig,
)

__all__ = [
    # Clouds
    "PointCloud",
    "PatchSet",
    # Replay
    "Transition",
    "TransitionBatch",
    # Config
    "NormalizationMode",
    "NormalizationSpec",
    "PipelineConfig",
    "EncoderConfig",
    "AgentConfig",
    "Precision",
    "EnvName",
    "EnvConfig",
    "RunConfig",
    # Runtime
    "RuntimeSettings",
    "apply_thread_cap",
]
