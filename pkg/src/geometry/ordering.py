"""Morton (Z-order) ranking of centroids"""

import numpy as np

from src.errors import InvalidArgumentError


DEFAULT_MORTON_BITS = 10


def quantize(points: np.ndarray, bits: int = DEFAULT_MORTON_BITS) -> np.ndarray:
    """Quantize each axis to `bits` bits over the points' bounding box"""
    points = np.asarray(points, dtype=np.float64)
    lo = points.min(axis=0)
    extent = points.max(axis=0) - lo
    cells = 1 << bits
    # flat axes collapse to cell 0
    safe = np.where(extent > 0.0, extent, 1.0)
    unit = (points - lo) / safe
    cell = np.floor(unit * cells).astype(np.int64)
    return np.clip(cell, 0, cells - 1)


def interleave_bits(cells: np.ndarray, bits: int = DEFAULT_MORTON_BITS) -> np.ndarray:
    """Interleave per-axis cells into Morton codes, x most significant in each triple"""
    cells = np.asarray(cells, dtype=np.int64)
    codes = np.zeros(cells.shape[0], dtype=np.int64)
    for b in range(bits - 1, -1, -1):
        x = (cells[:, 0] >> b) & 1
        y = (cells[:, 1] >> b) & 1
        z = (cells[:, 2] >> b) & 1
        codes = (codes << 3) | (x << 2) | (y << 1) | z
    return codes


def morton_codes(centroids: np.ndarray, bits: int = DEFAULT_MORTON_BITS) -> np.ndarray:
    return interleave_bits(quantize(centroids, bits), bits)


def morton_rank(centroids: np.ndarray, bits: int = DEFAULT_MORTON_BITS) -> np.ndarray:
    """
    Permutation sorting centroids by ascending Morton code.

    Args:
        centroids: (n, 3) array, n >= 1
        bits: Quantization bits per axis

    Returns:
        (n,) int64 permutation; equal codes keep their input order
    """
    centroids = np.asarray(centroids, dtype=np.float64)
    if centroids.ndim != 2 or centroids.shape[1] != 3 or centroids.shape[0] < 1:
        raise InvalidArgumentError(f"centroids must be (n>=1, 3), got {centroids.shape}")
    return np.argsort(morton_codes(centroids, bits), kind="stable").astype(np.int64)
