"""Configuration schemas for runs, encoder, agent, environments and preprocessing"""

from enum import Enum
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


Vector3 = Tuple[float, float, float]


class _StrictModel(BaseModel):
    """Base for every config block: unknown keys are rejected"""
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class NormalizationMode(str, Enum):
    """How observed clouds are normalized"""
    STATIC = "static"
    PER_CLOUD = "per_cloud"
    NONE = "none"


class NormalizationSpec(_StrictModel):
    """Static center/scale, per-cloud mean/max-abs, or identity"""
    mode: NormalizationMode = Field(default=NormalizationMode.NONE)
    center: Vector3 = Field(default=(0.0, 0.0, 0.0), description="Static-mode center point")
    scale: float = Field(default=1.0, gt=0.0, description="Static-mode scale factor")


class PipelineConfig(_StrictModel):
    """Observation preprocessing: crop, append target points, voxel, random downsample, normalize"""
    crop_min: Optional[Vector3] = Field(default=None, description="Crop box lower corner (inclusive)")
    crop_max: Optional[Vector3] = Field(default=None, description="Crop box upper corner (inclusive)")
    append_target_points: bool = Field(default=False)
    target_cube_side: float = Field(default=0.07, gt=0.0, description="Side length of the target cube (m)")
    target_point_count: int = Field(default=50, ge=1)
    target_color: Vector3 = Field(default=(0.0, 1.0, 0.0))
    voxel_size: Optional[float] = Field(default=None, gt=0.0)
    max_points: Optional[int] = Field(default=None, ge=1)
    normalization: NormalizationSpec = Field(default_factory=NormalizationSpec)

    @model_validator(mode="after")
    def _check_crop_box(self) -> "PipelineConfig":
        if (self.crop_min is None) != (self.crop_max is None):
            raise ValueError("crop_min and crop_max must be given together")
        if self.crop_min is not None:
            if any(lo > hi for lo, hi in zip(self.crop_min, self.crop_max)):
                raise ValueError("crop_min must not exceed crop_max on any axis")
        return self

    @property
    def crop_enabled(self) -> bool:
        return self.crop_min is not None


class EncoderConfig(_StrictModel):
    """Tokenizer, transformer encoder/decoder and masking hyperparameters"""
    num_centroids: int = Field(default=32, ge=1, description="n, centroids per cloud")
    patch_size: int = Field(default=32, ge=1, description="k, points per patch")
    embed_dim: int = Field(default=96, ge=6, description="D, token width")
    num_layers: int = Field(default=3, ge=1, description="Encoder transformer blocks")
    decoder_layers: int = Field(default=2, ge=1, description="Decoder transformer blocks")
    num_heads: int = Field(default=4, ge=1)
    mlp_ratio: int = Field(default=4, ge=1)
    mask_ratio: float = Field(default=0.3, ge=0.0, le=1.0, description="m, random masking probability")
    prefix_fraction: float = Field(default=0.15, ge=0.0, le=1.0, description="Leading tokens never masked")
    color: bool = Field(default=False, description="Points carry RGB features")
    morton_bits: int = Field(default=10, ge=1, le=21)

    @model_validator(mode="after")
    def _check_widths(self) -> "EncoderConfig":
        if self.embed_dim % 6 != 0:
            raise ValueError(f"embed_dim must be divisible by 6, got {self.embed_dim}")
        if self.embed_dim % self.num_heads != 0:
            raise ValueError(
                f"embed_dim {self.embed_dim} must be divisible by num_heads {self.num_heads}"
            )
        return self

    @property
    def point_feature_dim(self) -> int:
        return 6 if self.color else 3


class Precision(str, Enum):
    FLOAT32 = "float32"
    FLOAT64 = "float64"


class AgentConfig(_StrictModel):
    """Soft Actor-Critic constants"""
    gamma: float = Field(default=0.99, gt=0.0, le=1.0, description="Discount")
    tau: float = Field(default=0.005, ge=0.0, le=1.0, description="Target update rate in [0, 1]; 0 is accepted and freezes the target critics")
    lr: float = Field(default=1e-4, gt=0.0)
    alpha_init: float = Field(default=0.1, gt=0.0, description="Initial entropy coefficient")
    alpha_lr: float = Field(default=1e-4, gt=0.0)
    batch_size: int = Field(default=64, ge=1)
    replay_capacity: int = Field(default=100_000, ge=1)
    replay_ratio: int = Field(default=1, ge=1, description="Updates per environment step")
    target_entropy: Optional[float] = Field(default=None, description="Defaults to -action_dim")
    hidden_width: int = Field(default=256, ge=1)
    num_layers: int = Field(default=3, ge=2, description="Fully-connected layers per actor/critic")
    log_std_min: float = Field(default=-10.0)
    log_std_max: float = Field(default=2.0)
    learning_starts: int = Field(default=1000, ge=0)
    aux_weight: float = Field(default=1.0, ge=0.0)
    color_loss_enabled: bool = Field(default=True)
    color_weight: float = Field(default=1.0, ge=0.0)
    precision: Precision = Field(default=Precision.FLOAT32)

    @model_validator(mode="after")
    def _check_log_std(self) -> "AgentConfig":
        if self.log_std_min >= self.log_std_max:
            raise ValueError("log_std_min must be below log_std_max")
        return self


class EnvName(str, Enum):
    POINT_REACH = "PointReach"
    COLOR_TOUCH = "ColorTouch"


def _default_env_pipeline() -> PipelineConfig:
    return PipelineConfig(
        max_points=200,
        normalization=NormalizationSpec(mode=NormalizationMode.STATIC, scale=1.2)
    )


class EnvConfig(_StrictModel):
    """Synthetic point-cloud task parameters"""
    name: EnvName = Field(default=EnvName.POINT_REACH)
    horizon: int = Field(default=50, ge=1)
    step_size: float = Field(default=0.05, gt=0.0)
    success_radius: float = Field(default=0.1, gt=0.0)
    min_separation: float = Field(default=0.4, ge=0.0)
    cluster_points: int = Field(default=40, ge=1)
    cluster_radius: float = Field(default=0.06, gt=0.0)
    floor_points: int = Field(default=120, ge=0)
    max_rotation_deg: float = Field(default=15.0, ge=0.0)
    max_translation: float = Field(default=0.02, ge=0.0)
    use_color: Optional[bool] = Field(default=None, description="Defaults to True for ColorTouch")
    zero_colors: bool = Field(default=False, description="Ablation: emit colors but set them to 0")
    pipeline: PipelineConfig = Field(default_factory=_default_env_pipeline)

    @property
    def emits_color(self) -> bool:
        if self.use_color is not None:
            return self.use_color
        return self.name == EnvName.COLOR_TOUCH


class RunConfig(_StrictModel):
    """Everything needed to reproduce one training run"""
    env: EnvConfig = Field(default_factory=EnvConfig)
    encoder: EncoderConfig = Field(default_factory=EncoderConfig)
    agent: AgentConfig = Field(default_factory=AgentConfig)
    aux: bool = Field(default=True, description="Train the masked reconstruction objective")
    total_steps: int = Field(default=30_000, ge=0)
    eval_interval: int = Field(default=5_000, ge=1)
    eval_episodes: int = Field(default=20, ge=1)
    seed: int = Field(default=0, ge=0)
    output_dir: str = Field(default="runs/default")

    @model_validator(mode="after")
    def _check_feature_width(self) -> "RunConfig":
        if self.encoder.color != self.env.emits_color:
            raise ValueError(
                f"encoder.color={self.encoder.color} does not match the environment, "
                f"which {'emits' if self.env.emits_color else 'does not emit'} colors"
            )
        return self
