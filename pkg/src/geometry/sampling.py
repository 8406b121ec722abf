"""Farthest point sampling and k-nearest-neighbour grouping"""

from typing import Union

import numpy as np

from src.errors import InvalidArgumentError
from src.models.cloud import PointCloud, PatchSet
from .kernels import fps_kernel, knn_kernel


SeedLike = Union[int, np.integer, np.random.Generator]


def as_generator(seed: SeedLike) -> np.random.Generator:
    """Accept either an integer seed or an existing Generator"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(int(seed))


def seeded_start_index(m: int, seed: SeedLike) -> int:
    """First FPS index: uniform over the m points, deterministic given seed"""
    if m < 1:
        raise InvalidArgumentError("cannot pick a start index from an empty cloud")
    return int(as_generator(seed).integers(m))


def farthest_point_sample(cloud: PointCloud, n: int, seed: SeedLike) -> np.ndarray:
    """
    Select n well-spread centroid indices.

    Args:
        cloud: Source cloud with m points
        n: Number of centroids, 1 <= n <= m
        seed: Integer seed or Generator choosing the start point

    Returns:
        (n,) int64 array of distinct indices; each index after the first
        maximizes the minimum distance to those already selected, ties
        resolved towards the lowest index
    """
    m = cloud.num_points
    if n < 1 or n > m:
        raise InvalidArgumentError(f"FPS needs 1 <= n <= m, got n={n}, m={m}")
    start = seeded_start_index(m, seed)
    return fps_kernel(cloud.positions, int(n), start)


def knn_group(cloud: PointCloud, centroid_indices: np.ndarray, k: int) -> PatchSet:
    """
    Group the k nearest points around each centroid.

    Args:
        cloud: Source cloud with m >= k points
        centroid_indices: Indices of the centroids in cloud
        k: Points per patch

    Returns:
        PatchSet with centroid-relative positions and unmodified colors
    """
    m = cloud.num_points
    centroid_indices = np.asarray(centroid_indices, dtype=np.int64)
    if k < 1 or k > m:
        raise InvalidArgumentError(f"kNN needs 1 <= k <= m, got k={k}, m={m}")
    if centroid_indices.ndim != 1 or centroid_indices.size == 0:
        raise InvalidArgumentError("centroid_indices must be a non-empty vector")
    if centroid_indices.min() < 0 or centroid_indices.max() >= m:
        raise InvalidArgumentError("centroid index out of range")

    centroids = cloud.positions[centroid_indices]
    neighbors = knn_kernel(cloud.positions, np.ascontiguousarray(centroids), int(k))

    relative = cloud.positions[neighbors] - centroids[:, None, :]
    if cloud.colors is not None:
        patches = np.concatenate([relative, cloud.colors[neighbors]], axis=-1)
    else:
        patches = relative

    return PatchSet(centroids=centroids, patches=patches, source_indices=neighbors)
