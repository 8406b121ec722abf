"""Synthetic surface shapes for reconstruction pretraining"""

from typing import Callable, Dict, List

import numpy as np

from src.errors import InvalidArgumentError
from src.geometry.sampling import SeedLike, as_generator
from src.models.cloud import PointCloud


def _sphere(count: int, rng: np.random.Generator) -> np.ndarray:
    directions = rng.standard_normal((count, 3))
    return directions / np.linalg.norm(directions, axis=1, keepdims=True)


def _box(count: int, rng: np.random.Generator) -> np.ndarray:
    points = rng.uniform(-1.0, 1.0, size=(count, 3))
    axis = rng.integers(0, 3, size=count)
    points[np.arange(count), axis] = rng.choice([-1.0, 1.0], size=count)
    return points


def _cylinder(count: int, rng: np.random.Generator) -> np.ndarray:
    angle = rng.uniform(0.0, 2.0 * np.pi, size=count)
    height = rng.uniform(-1.0, 1.0, size=count)
    return np.column_stack([np.cos(angle), np.sin(angle), height])


def _torus(count: int, rng: np.random.Generator) -> np.ndarray:
    major, minor = 0.7, 0.3
    u = rng.uniform(0.0, 2.0 * np.pi, size=count)
    v = rng.uniform(0.0, 2.0 * np.pi, size=count)
    ring = major + minor * np.cos(v)
    return np.column_stack([ring * np.cos(u), ring * np.sin(u), minor * np.sin(v)])


SHAPES: Dict[str, Callable[[int, np.random.Generator], np.ndarray]] = {
    "sphere": _sphere,
    "box": _box,
    "cylinder": _cylinder,
    "torus": _torus,
}


def synthetic_shape(kind: str, points: int, seed: SeedLike, color: bool = False) -> PointCloud:
    """
    One randomly scaled and rotated surface sample.

    Colored shapes get one random base color with a height gradient so the
    color term has something to learn.
    """
    if kind not in SHAPES:
        raise InvalidArgumentError(f"unknown shape {kind!r}; known: {sorted(SHAPES)}")
    if points < 1:
        raise InvalidArgumentError(f"a shape needs at least one point, got {points}")
    rng = as_generator(seed)
    surface = SHAPES[kind](points, rng)
    scale = rng.uniform(0.3, 0.6, size=3)
    rotation, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    positions = (surface * scale) @ rotation.T

    colors = None
    if color:
        base = rng.uniform(0.2, 0.8, size=3)
        span = np.ptp(positions[:, 2]) or 1.0
        shade = (positions[:, 2] - positions[:, 2].min()) / span
        colors = np.clip(base[None, :] + 0.2 * (shade[:, None] - 0.5), 0.0, 1.0)
    return PointCloud(positions, colors)


def synthetic_shapes(count: int, points: int, seed: SeedLike = 0, color: bool = False) -> List[PointCloud]:
    """count shapes cycling through every kind, each with its own child seed"""
    rng = as_generator(seed)
    kinds = sorted(SHAPES)
    seeds = rng.integers(0, 2**31 - 1, size=count)
    return [synthetic_shape(kinds[i % len(kinds)], points, int(s), color) for i, s in enumerate(seeds)]
