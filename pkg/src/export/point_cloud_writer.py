"""Plain-text point-cloud writer (lossless for float64)"""

from pathlib import Path
from typing import Optional, Union

import numpy as np

from src.models.cloud import PointCloud


def format_point_cloud(cloud: PointCloud, comment: Optional[str] = None) -> str:
    """One `x y z [r g b]` line per point; %.17g round-trips doubles exactly"""
    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    for row in cloud.features():
        lines.append(" ".join(f"{value:.17g}" for value in row))
    return "\n".join(lines) + "\n"


def write_point_cloud(path: Union[str, Path], cloud: PointCloud, comment: Optional[str] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_point_cloud(cloud, comment))
    return path


def patch_to_cloud(patch: np.ndarray, centroid: Optional[np.ndarray] = None) -> PointCloud:
    """(k, 3|6) centroid-relative patch -> cloud, optionally shifted back to the scene frame"""
    patch = np.asarray(patch, dtype=np.float64)
    features = patch.copy()
    if centroid is not None:
        features[:, :3] = features[:, :3] + centroid
    if features.shape[1] == 6:
        features[:, 3:] = np.clip(features[:, 3:], 0.0, 1.0)
    return PointCloud.from_features(features)
