"""Observation preprocessing pipeline"""

from typing import Optional, Sequence

from src.errors import DegenerateInputError
from src.models.cloud import PointCloud
from src.models.config import PipelineConfig
from .filters import crop, append_target_points, voxel_downsample, random_downsample, normalize
from .sampling import SeedLike, as_generator


def preprocess(
    cloud: PointCloud,
    config: PipelineConfig,
    seed: SeedLike,
    target: Optional[Sequence[float]] = None
) -> PointCloud:
    """
    Run crop -> append target points -> voxel -> random downsample -> normalize.

    Args:
        cloud: Raw observation in the observation frame
        config: Which steps run and their parameters
        seed: Step RNG stream (Generator) or integer seed
        target: Target location, required when append_target_points is on

    Returns:
        Preprocessed, non-empty cloud

    Raises:
        DegenerateInputError: If cropping removes every point
    """
    rng = as_generator(seed)

    if config.crop_enabled:
        cloud = crop(cloud, config.crop_min, config.crop_max)
        if cloud.num_points == 0:
            raise DegenerateInputError("crop removed all points")

    if config.append_target_points:
        if target is None:
            raise DegenerateInputError("append_target_points is enabled but no target was given")
        cloud = append_target_points(
            cloud,
            target,
            side=config.target_cube_side,
            seed=rng,
            count=config.target_point_count,
            color=config.target_color
        )

    cloud.require_non_empty("observation")

    if config.voxel_size is not None:
        cloud = voxel_downsample(cloud, config.voxel_size)

    if config.max_points is not None:
        cloud = random_downsample(cloud, config.max_points, rng)

    return normalize(cloud, config.normalization)
