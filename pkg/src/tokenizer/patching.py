"""Cloud -> Morton-ordered patches, and padding of patch sets into batches"""

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from src.errors import InvalidArgumentError
from src.geometry import farthest_point_sample, knn_group, morton_rank, DEFAULT_MORTON_BITS
from src.geometry.sampling import SeedLike
from src.models.cloud import PointCloud, PatchSet


def patchify(
    cloud: PointCloud,
    n: int,
    k: int,
    seed: SeedLike,
    bits: int = DEFAULT_MORTON_BITS
) -> PatchSet:
    """
    FPS centroids, kNN patches, then Morton sort.

    Args:
        cloud: Preprocessed observation with m points
        n: Requested centroid count; clouds with m < n yield m patches
        k: Points per patch, must not exceed m
        seed: Integer seed or Generator for the FPS start point
        bits: Morton quantization bits per axis

    Returns:
        PatchSet in Morton order with `morton_order` holding the permutation
        applied to the FPS order
    """
    cloud.require_non_empty("cloud to patchify")
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if k > cloud.num_points:
        raise InvalidArgumentError(f"patch size k={k} exceeds the cloud size m={cloud.num_points}")
    n_real = min(n, cloud.num_points)
    centroid_indices = farthest_point_sample(cloud, n_real, seed)
    patch_set = knn_group(cloud, centroid_indices, k)
    return patch_set.reorder(morton_rank(patch_set.centroids, bits))


@dataclass(frozen=True)
class PatchBatch:
    """Patch sets padded to a common length.

    patches:    (B, n_max, k, F), zeros at padding slots
    centroids:  (B, n_max, 3), zeros at padding slots
    is_padding: (B, n_max) bool, True exactly at slots >= n_real[b]
    n_real:     (B,) real patch count per sample
    """
    patches: np.ndarray
    centroids: np.ndarray
    is_padding: np.ndarray
    n_real: np.ndarray

    @property
    def batch_size(self) -> int:
        return int(self.patches.shape[0])

    @property
    def max_patches(self) -> int:
        return int(self.patches.shape[1])

    @property
    def patch_size(self) -> int:
        return int(self.patches.shape[2])

    @property
    def feature_dim(self) -> int:
        return int(self.patches.shape[3])

    def real_patches(self, b: int) -> np.ndarray:
        return self.patches[b, : int(self.n_real[b])]


def pack_patch_sets(patch_sets: Sequence[PatchSet], pad_to: int = 0) -> PatchBatch:
    """
    Stack patch sets, padding each to the largest patch count in the batch.

    Args:
        patch_sets: Non-empty list sharing k and feature width
        pad_to: Minimum padded length (extra padding beyond the batch maximum)

    Returns:
        PatchBatch
    """
    if not patch_sets:
        raise InvalidArgumentError("cannot pack an empty list of patch sets")
    k = patch_sets[0].patch_size
    features = patch_sets[0].feature_dim
    for ps in patch_sets:
        if ps.patch_size != k or ps.feature_dim != features:
            raise InvalidArgumentError(
                f"patch sets disagree on (k, F): ({ps.patch_size}, {ps.feature_dim}) vs ({k}, {features})"
            )

    n_real = np.array([ps.num_patches for ps in patch_sets], dtype=np.int64)
    n_max = max(int(n_real.max()), pad_to)
    batch = len(patch_sets)

    patches = np.zeros((batch, n_max, k, features))
    centroids = np.zeros((batch, n_max, 3))
    for b, ps in enumerate(patch_sets):
        patches[b, : ps.num_patches] = ps.patches
        centroids[b, : ps.num_patches] = ps.centroids
    is_padding = np.arange(n_max)[None, :] >= n_real[:, None]
    return PatchBatch(patches, centroids, is_padding, n_real)


def patchify_batch(
    clouds: Sequence[PointCloud],
    n: int,
    k: int,
    rng: np.random.Generator,
    bits: int = DEFAULT_MORTON_BITS
) -> List[PatchSet]:
    """Patchify each cloud with a child seed drawn from `rng`, in order"""
    seeds = rng.integers(0, 2**31 - 1, size=len(clouds))
    return [patchify(cloud, n, k, int(s), bits) for cloud, s in zip(clouds, seeds)]
