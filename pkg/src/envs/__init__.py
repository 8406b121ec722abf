"""Synthetic point-cloud control tasks"""

from .base import EnvState, StepResult, PointCloudEnv, ACTION_DIM, sphere_points, rotation_about_z
from .point_reach import PointReachEnv
from .color_touch import ColorTouchEnv, DISTRACTOR_PENALTY
from .registry import ENVIRONMENTS, make_env
from .trace import export_trace
from .shapes import SHAPES, synthetic_shape, synthetic_shapes

__all__ = [
    "EnvState",
    "StepResult",
    "PointCloudEnv",
    "ACTION_DIM",
    "sphere_points",
    "rotation_about_z",
    "PointReachEnv",
    "ColorTouchEnv",
    "DISTRACTOR_PENALTY",
    "ENVIRONMENTS",
    "make_env",
    "export_trace",
    "SHAPES",
    "synthetic_shape",
    "synthetic_shapes",
]
