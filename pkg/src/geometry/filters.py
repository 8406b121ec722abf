"""Cloud-to-cloud filters: crop, voxel grid, random downsample, target points, normalization"""

from typing import Optional, Sequence

import numpy as np

from src.errors import InvalidArgumentError, DegenerateInputError
from src.models.cloud import PointCloud
from src.models.config import NormalizationMode, NormalizationSpec
from .sampling import SeedLike, as_generator


def crop(cloud: PointCloud, box_min: Sequence[float], box_max: Sequence[float]) -> PointCloud:
    """Drop points outside the inclusive axis-aligned box"""
    lo = np.asarray(box_min, dtype=np.float64)
    hi = np.asarray(box_max, dtype=np.float64)
    if lo.shape != (3,) or hi.shape != (3,) or np.any(lo > hi):
        raise InvalidArgumentError(f"malformed crop box {lo} .. {hi}")
    inside = np.all((cloud.positions >= lo) & (cloud.positions <= hi), axis=1)
    return cloud.select(np.flatnonzero(inside))


def voxel_downsample(cloud: PointCloud, voxel_size: float) -> PointCloud:
    """
    Replace the members of every occupied voxel by their mean.

    Args:
        cloud: Input cloud
        voxel_size: Edge length of the cubic cells (> 0)

    Returns:
        One point per occupied voxel, ordered by first occurrence of the voxel
    """
    if voxel_size <= 0:
        raise InvalidArgumentError(f"voxel_size must be positive, got {voxel_size}")
    if cloud.num_points == 0:
        return cloud

    keys = np.floor(cloud.positions / voxel_size).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)

    # relabel bins by first occurrence
    by_first = np.argsort(first, kind="stable")
    relabel = np.empty_like(by_first)
    relabel[by_first] = np.arange(by_first.size)
    bins = relabel[inverse]

    counts = np.bincount(bins, minlength=by_first.size).astype(np.float64)[:, None]
    sums = np.zeros((by_first.size, 3))
    np.add.at(sums, bins, cloud.positions)
    positions = sums / counts

    colors = None
    if cloud.colors is not None:
        color_sums = np.zeros((by_first.size, 3))
        np.add.at(color_sums, bins, cloud.colors)
        colors = np.clip(color_sums / counts, 0.0, 1.0)

    return PointCloud(positions, colors)


def random_downsample(cloud: PointCloud, max_points: int, seed: SeedLike) -> PointCloud:
    """Keep at most max_points distinct points, sampled without replacement, in original order"""
    if max_points < 1:
        raise InvalidArgumentError(f"max_points must be >= 1, got {max_points}")
    if cloud.num_points <= max_points:
        return cloud
    rng = as_generator(seed)
    keep = np.sort(rng.choice(cloud.num_points, size=max_points, replace=False))
    return cloud.select(keep)


def append_target_points(
    cloud: PointCloud,
    target: Sequence[float],
    side: float,
    seed: SeedLike,
    count: int = 50,
    color: Optional[Sequence[float]] = None
) -> PointCloud:
    """Append `count` points drawn uniformly from a cube of edge `side` centered on target"""
    if side <= 0 or count < 1:
        raise InvalidArgumentError("target cube needs side > 0 and count >= 1")
    rng = as_generator(seed)
    center = np.asarray(target, dtype=np.float64)
    extra = center + rng.uniform(-0.5 * side, 0.5 * side, size=(count, 3))
    positions = np.concatenate([cloud.positions, extra], axis=0)

    colors = None
    if cloud.colors is not None:
        fill = np.asarray(color if color is not None else (0.0, 1.0, 0.0), dtype=np.float64)
        colors = np.concatenate([cloud.colors, np.tile(fill, (count, 1))], axis=0)
    return PointCloud(positions, colors)


def normalize(cloud: PointCloud, spec: NormalizationSpec) -> PointCloud:
    """
    Normalize positions; colors are left untouched.

    static:    (p - center) / scale
    per_cloud: subtract the mean, divide by the largest absolute coordinate
    none:      identity
    """
    mode = NormalizationMode(spec.mode)
    if mode == NormalizationMode.NONE:
        return cloud
    if mode == NormalizationMode.STATIC:
        center = np.asarray(spec.center, dtype=np.float64)
        return PointCloud((cloud.positions - center) / spec.scale, cloud.colors)

    cloud.require_non_empty("per-cloud normalization input")
    centered = cloud.positions - cloud.positions.mean(axis=0)
    max_abs = np.abs(centered).max()
    if max_abs <= 0.0:
        raise DegenerateInputError("per-cloud normalization of a cloud whose points are all identical")
    return PointCloud(centered / max_abs, cloud.colors)
