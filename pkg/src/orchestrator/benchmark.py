"""Median-of-N wall-time benchmarks of the geometry and loss kernels"""

import csv
import io
import logging
import time
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Sequence

import numpy as np

from src.errors import InvalidArgumentError
from src.geometry import farthest_point_sample, knn_group, morton_rank, voxel_downsample
from src.losses import patch_losses
from src.models.cloud import PointCloud

logger = logging.getLogger(__name__)

REPEATS = 7
BENCH_CENTROIDS = 32
BENCH_PATCH_SIZE = 16
BENCH_VOXEL = 0.05

BENCH_COLUMNS = ["kernel", "size", "repeats", "median_seconds", "min_seconds", "max_seconds"]


@dataclass
class BenchRow:
    kernel: str
    size: int
    repeats: int
    median_seconds: float
    min_seconds: float
    max_seconds: float


def _fps(size: int, rng: np.random.Generator) -> Callable[[], object]:
    cloud = PointCloud(rng.uniform(-1.0, 1.0, size=(size, 3)))
    n = min(BENCH_CENTROIDS, size)
    return lambda: farthest_point_sample(cloud, n, 0)


def _knn(size: int, rng: np.random.Generator) -> Callable[[], object]:
    cloud = PointCloud(rng.uniform(-1.0, 1.0, size=(size, 3)))
    centers = np.arange(min(BENCH_CENTROIDS, size))
    k = min(BENCH_PATCH_SIZE, size)
    return lambda: knn_group(cloud, centers, k)


def _morton(size: int, rng: np.random.Generator) -> Callable[[], object]:
    centroids = rng.uniform(-1.0, 1.0, size=(size, 3))
    return lambda: morton_rank(centroids)


def _chamfer(size: int, rng: np.random.Generator) -> Callable[[], object]:
    predicted = rng.normal(size=(size, 3))
    truth = rng.normal(size=(size, 3))
    return lambda: patch_losses(predicted, truth, with_color=False)


def _voxel(size: int, rng: np.random.Generator) -> Callable[[], object]:
    cloud = PointCloud(rng.uniform(-1.0, 1.0, size=(size, 3)))
    return lambda: voxel_downsample(cloud, BENCH_VOXEL)


KERNELS: Dict[str, Callable[[int, np.random.Generator], Callable[[], object]]] = {
    "fps": _fps,
    "knn": _knn,
    "morton": _morton,
    "chamfer": _chamfer,
    "voxel": _voxel,
}


def benchmark_kernel(kernel: str, sizes: Sequence[int], repeats: int = REPEATS, seed: int = 0) -> List[BenchRow]:
    """
    Time a kernel at each size.

    One untimed warm-up call per size absorbs numba compilation.

    Raises:
        InvalidArgumentError: Unknown kernel or a size below 1
    """
    if kernel not in KERNELS:
        raise InvalidArgumentError(f"unknown kernel {kernel!r}; known: {sorted(KERNELS)}")
    if not sizes:
        raise InvalidArgumentError("no sizes given")
    for size in sizes:
        if size < 1:
            raise InvalidArgumentError(f"benchmark sizes must be >= 1, got {size}")
    if repeats < 1:
        raise InvalidArgumentError(f"repeats must be >= 1, got {repeats}")

    rng = np.random.default_rng(seed)
    rows = []
    for size in sizes:
        run = KERNELS[kernel](int(size), rng)
        run()
        timings = []
        for _ in range(repeats):
            started = time.perf_counter()
            run()
            timings.append(time.perf_counter() - started)
        rows.append(BenchRow(kernel, int(size), repeats, float(np.median(timings)), min(timings), max(timings)))
        logger.debug(f"[Benchmark] {kernel} size={size}: median {rows[-1].median_seconds:.3e}s")
    return rows


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(asdict(row))
    return buffer.getvalue()
