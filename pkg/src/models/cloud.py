"""Point-cloud containers shared by geometry, tokenizer and envs"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.errors import InvalidArgumentError, DegenerateInputError


@dataclass(frozen=True)
class PointCloud:
    """Variable-length set of 3D points with optional per-point RGB.

    positions is (m, 3) in meters, colors is (m, 3) with channels in [0, 1].
    Empty clouds are representable (a crop may produce one) but rejected by
    `require_non_empty` at pipeline boundaries.
    """
    positions: np.ndarray
    colors: Optional[np.ndarray] = None

    def __post_init__(self):
        positions = np.ascontiguousarray(self.positions, dtype=np.float64)
        if positions.ndim != 2 or positions.shape[1] != 3:
            raise InvalidArgumentError(
                f"positions must have shape (m, 3), got {positions.shape}"
            )
        object.__setattr__(self, "positions", positions)

        if self.colors is not None:
            colors = np.ascontiguousarray(self.colors, dtype=np.float64)
            if colors.shape != positions.shape:
                raise InvalidArgumentError(
                    f"colors shape {colors.shape} does not match positions {positions.shape}"
                )
            if colors.size and (colors.min() < 0.0 or colors.max() > 1.0):
                raise InvalidArgumentError("color channels must lie in [0, 1]")
            object.__setattr__(self, "colors", colors)

    @property
    def num_points(self) -> int:
        return int(self.positions.shape[0])

    @property
    def has_colors(self) -> bool:
        return self.colors is not None

    @property
    def feature_dim(self) -> int:
        """3 without colors, 6 with colors"""
        return 6 if self.has_colors else 3

    def features(self) -> np.ndarray:
        """Per-point features [xyz, rgb] as an (m, 3 or 6) array"""
        if self.colors is None:
            return self.positions
        return np.concatenate([self.positions, self.colors], axis=1)

    def select(self, indices: np.ndarray) -> "PointCloud":
        """Subset of points, in the order given by indices"""
        colors = self.colors[indices] if self.colors is not None else None
        return PointCloud(self.positions[indices], colors)

    def without_colors(self) -> "PointCloud":
        return PointCloud(self.positions)

    def require_non_empty(self, context: str = "point cloud") -> "PointCloud":
        if self.num_points == 0:
            raise DegenerateInputError(f"{context} is empty")
        return self

    @classmethod
    def from_features(cls, features: np.ndarray) -> "PointCloud":
        """Build a cloud from an (m, 3) or (m, 6) feature array"""
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[1] not in (3, 6):
            raise InvalidArgumentError(
                f"features must have shape (m, 3) or (m, 6), got {features.shape}"
            )
        if features.shape[1] == 6:
            return cls(features[:, :3], features[:, 3:])
        return cls(features)


@dataclass(frozen=True)
class PatchSet:
    """Centroids plus their k-nearest-neighbour patches.

    patches[i, j, :3] == parent position - centroids[i]; colors (when present)
    are copied unmodified into patches[i, j, 3:].
    """
    centroids: np.ndarray
    patches: np.ndarray
    source_indices: np.ndarray
    morton_order: np.ndarray = field(default=None)

    def __post_init__(self):
        n = self.centroids.shape[0]
        if self.patches.ndim != 3 or self.patches.shape[0] != n:
            raise InvalidArgumentError(
                f"patches shape {self.patches.shape} does not match {n} centroids"
            )
        if self.source_indices.shape != self.patches.shape[:2]:
            raise InvalidArgumentError("source_indices must be (n, k)")
        if self.morton_order is None:
            object.__setattr__(self, "morton_order", np.arange(n, dtype=np.int64))

    @property
    def num_patches(self) -> int:
        return int(self.centroids.shape[0])

    @property
    def patch_size(self) -> int:
        return int(self.patches.shape[1])

    @property
    def feature_dim(self) -> int:
        return int(self.patches.shape[2])

    def reorder(self, permutation: np.ndarray) -> "PatchSet":
        """Apply a permutation over patches (e.g. the Morton rank)"""
        permutation = np.asarray(permutation, dtype=np.int64)
        return PatchSet(
            centroids=self.centroids[permutation],
            patches=self.patches[permutation],
            source_indices=self.source_indices[permutation],
            morton_order=permutation
        )
