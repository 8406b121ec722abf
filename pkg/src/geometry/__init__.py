"""Non-differentiable point-cloud kernels"""

from .sampling import as_generator, seeded_start_index, farthest_point_sample, knn_group
from .ordering import quantize, interleave_bits, morton_codes, morton_rank, DEFAULT_MORTON_BITS
from .filters import crop, voxel_downsample, random_downsample, append_target_points, normalize
from .pipeline import preprocess

__all__ = [
    "as_generator",
    "seeded_start_index",
    "farthest_point_sample",
    "knn_group",
    "quantize",
    "interleave_bits",
    "morton_codes",
    "morton_rank",
    "DEFAULT_MORTON_BITS",
    "crop",
    "voxel_downsample",
    "random_downsample",
    "append_target_points",
    "normalize",
    "preprocess",
]
