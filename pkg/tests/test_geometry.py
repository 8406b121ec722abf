"""Tests for the geometry kernels against brute-force oracles"""

import numpy as np
import pytest

from src.errors import DegenerateInputError, InvalidArgumentError
from src.geometry import (
    append_target_points,
    crop,
    farthest_point_sample,
    interleave_bits,
    knn_group,
    morton_rank,
    normalize,
    preprocess,
    quantize,
    random_downsample,
    seeded_start_index,
    voxel_downsample,
)
from src.geometry.kernels import fps_kernel
from src.models.cloud import PointCloud
from src.models.config import NormalizationMode, NormalizationSpec, PipelineConfig

INSTANCES = 1000


def random_cloud(rng, colors=False, low=1, high=512):
    m = int(rng.integers(low, high + 1))
    positions = rng.uniform(-1.0, 1.0, size=(m, 3))
    return PointCloud(positions, rng.uniform(0.0, 1.0, size=(m, 3)) if colors else None)


def squared(a, b):
    d = a - b
    return d[..., 0] * d[..., 0] + d[..., 1] * d[..., 1] + d[..., 2] * d[..., 2]


def fps_oracle(points, n, start):
    m = points.shape[0]
    selected = [start]
    min_dist = np.full(m, np.inf)
    for _ in range(1, n):
        min_dist = np.minimum(min_dist, squared(points, points[selected[-1]]))
        candidates = min_dist.copy()
        candidates[selected] = -np.inf
        selected.append(int(np.argmax(candidates)))
    return np.array(selected)


def knn_oracle(points, centers, k):
    out = []
    for c in centers:
        out.append(np.argsort(squared(points, c), kind="stable")[:k])
    return np.array(out)


def morton_oracle(cells, bits):
    codes = []
    for x, y, z in cells.tolist():
        code = 0
        for b in reversed(range(bits)):
            code = (code << 3) | (((x >> b) & 1) << 2) | (((y >> b) & 1) << 1) | ((z >> b) & 1)
        codes.append(code)
    return np.array(sorted(range(len(codes)), key=lambda i: (codes[i], i)))


def voxel_oracle(positions, size):
    groups = {}
    for i, p in enumerate(positions):
        key = tuple(int(v) for v in np.floor(p / size))
        groups.setdefault(key, []).append(i)
    return [positions[members].mean(axis=0) for members in groups.values()]


class TestFarthestPointSampling:
    """FPS matches the brute-force selection exactly"""

    def test_matches_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(INSTANCES):
            cloud = random_cloud(rng)
            n = int(rng.integers(1, min(32, cloud.num_points) + 1))
            seed = int(rng.integers(1 << 30))
            got = farthest_point_sample(cloud, n, seed)
            expected = fps_oracle(cloud.positions, n, seeded_start_index(cloud.num_points, seed))
            np.testing.assert_array_equal(got, expected)

    def test_indices_are_distinct(self):
        cloud = PointCloud(np.random.default_rng(1).uniform(size=(100, 3)))
        indices = farthest_point_sample(cloud, 100, 3)
        assert len(set(indices.tolist())) == 100

    def test_same_seed_same_selection(self):
        cloud = PointCloud(np.random.default_rng(2).uniform(size=(64, 3)))
        np.testing.assert_array_equal(farthest_point_sample(cloud, 8, 11), farthest_point_sample(cloud, 8, 11))

    def test_n_above_m_rejected(self):
        cloud = PointCloud(np.zeros((4, 3)))
        with pytest.raises(InvalidArgumentError):
            farthest_point_sample(cloud, 5, 0)

    def test_ties_resolve_to_lowest_index(self):
        points = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 0.0, 0.0]])
        assert fps_kernel(points, 3, 0).tolist() == [0, 1, 3]

    def test_min_distance_to_earlier_picks_never_increases(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            cloud = random_cloud(rng, low=20, high=300)
            n = int(rng.integers(2, 20))
            picks = cloud.positions[farthest_point_sample(cloud, n, int(rng.integers(1 << 30)))]
            gaps = np.array([squared(picks[:i], picks[i]).min() for i in range(1, n)])
            assert np.all(np.diff(gaps) <= 1e-12)

    def test_unit_square_picks_opposite_corner(self):
        corners = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]])
        assert fps_kernel(corners, 2, 0).tolist() == [0, 3]

    def test_n_equal_m_returns_every_index(self):
        cloud = PointCloud(np.random.default_rng(5).uniform(size=(12, 3)))
        indices = farthest_point_sample(cloud, 12, 9)
        assert sorted(indices.tolist()) == list(range(12))
        assert indices[0] == seeded_start_index(12, 9)


class TestKnnGrouping:
    def test_matches_oracle(self):
        rng = np.random.default_rng(10)
        for _ in range(INSTANCES):
            cloud = random_cloud(rng, colors=bool(rng.integers(2)))
            k = int(rng.integers(1, min(32, cloud.num_points) + 1))
            centers = rng.choice(cloud.num_points, size=min(8, cloud.num_points), replace=False)
            patch_set = knn_group(cloud, centers, k)
            expected = knn_oracle(cloud.positions, cloud.positions[centers], k)
            np.testing.assert_array_equal(patch_set.source_indices, expected)

    def test_patches_are_centroid_relative_with_raw_colors(self):
        rng = np.random.default_rng(11)
        cloud = random_cloud(rng, colors=True, low=40, high=40)
        patch_set = knn_group(cloud, np.array([3, 7]), 5)
        for i, c in enumerate([3, 7]):
            members = patch_set.source_indices[i]
            np.testing.assert_allclose(patch_set.patches[i, :, :3], cloud.positions[members] - cloud.positions[c])
            np.testing.assert_array_equal(patch_set.patches[i, :, 3:], cloud.colors[members])

    def test_centroid_is_its_own_nearest_neighbour(self):
        cloud = PointCloud(np.random.default_rng(12).uniform(size=(30, 3)))
        patch_set = knn_group(cloud, np.arange(5), 4)
        np.testing.assert_array_equal(patch_set.source_indices[:, 0], np.arange(5))

    def test_k_above_m_rejected(self):
        cloud = PointCloud(np.zeros((3, 3)))
        with pytest.raises(InvalidArgumentError):
            knn_group(cloud, np.array([0]), 4)


class TestMortonOrder:
    def test_matches_oracle(self):
        rng = np.random.default_rng(20)
        for _ in range(INSTANCES):
            n = int(rng.integers(1, 65))
            bits = int(rng.integers(1, 11))
            centroids = rng.uniform(-1.0, 1.0, size=(n, 3))
            expected = morton_oracle(quantize(centroids, bits), bits)
            np.testing.assert_array_equal(morton_rank(centroids, bits), expected)

    def test_quantize_covers_bounding_box(self):
        points = np.array([[0.0, 0.0, 0.0], [1.0, 2.0, 4.0], [0.5, 1.0, 2.0]])
        cells = quantize(points, 2)
        np.testing.assert_array_equal(cells[0], [0, 0, 0])
        np.testing.assert_array_equal(cells[1], [3, 3, 3])
        np.testing.assert_array_equal(cells[2], [2, 2, 2])

    def test_flat_axis_collapses_to_zero(self):
        points = np.array([[0.0, 1.0, 5.0], [1.0, 1.0, 5.0]])
        cells = quantize(points, 4)
        assert np.all(cells[:, 1:] == 0)

    def test_x_is_most_significant(self):
        assert interleave_bits(np.array([[1, 0, 0]]), 1)[0] == 4
        assert interleave_bits(np.array([[0, 1, 0]]), 1)[0] == 2
        assert interleave_bits(np.array([[0, 0, 1]]), 1)[0] == 1

    def test_equal_codes_keep_input_order(self):
        centroids = np.zeros((5, 3))
        np.testing.assert_array_equal(morton_rank(centroids), np.arange(5))

    def test_neighbours_in_order_are_closer_than_random_pairs(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            centroids = rng.uniform(-1.0, 1.0, size=(64, 3))
            ordered = centroids[morton_rank(centroids)]
            adjacent = np.sqrt(squared(ordered[1:], ordered[:-1])).mean()
            i, j = np.triu_indices(len(centroids), k=1)
            random_pairs = np.sqrt(squared(centroids[i], centroids[j])).mean()
            assert adjacent <= random_pairs


class TestVoxelDownsample:
    def test_matches_oracle(self):
        rng = np.random.default_rng(30)
        for _ in range(INSTANCES):
            cloud = random_cloud(rng)
            size = float(rng.uniform(0.05, 0.5))
            got = voxel_downsample(cloud, size)
            expected = np.array(voxel_oracle(cloud.positions, size))
            assert got.num_points == len(expected)
            np.testing.assert_allclose(got.positions, expected, rtol=1e-12, atol=1e-14)

    def test_colors_are_averaged(self):
        cloud = PointCloud(
            np.array([[0.01, 0.01, 0.01], [0.02, 0.02, 0.02], [0.9, 0.9, 0.9]]),
            np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
        )
        out = voxel_downsample(cloud, 0.5)
        np.testing.assert_allclose(out.colors[0], [0.5, 0.0, 0.5])
        np.testing.assert_allclose(out.colors[1], [0.0, 1.0, 0.0])

    def test_non_positive_size_rejected(self):
        with pytest.raises(InvalidArgumentError):
            voxel_downsample(PointCloud(np.zeros((2, 3))), 0.0)


class TestFilters:
    def test_crop_bounds_are_inclusive(self):
        cloud = PointCloud(np.array([[0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [1.5, 0.0, 0.0]]))
        out = crop(cloud, (0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
        assert out.num_points == 2

    def test_random_downsample_keeps_order(self):
        cloud = PointCloud(np.arange(300, dtype=float).reshape(100, 3))
        out = random_downsample(cloud, 10, 0)
        assert out.num_points == 10
        assert np.all(np.diff(out.positions[:, 0]) > 0)

    def test_random_downsample_small_cloud_untouched(self):
        cloud = PointCloud(np.zeros((5, 3)))
        assert random_downsample(cloud, 10, 0) is cloud

    def test_append_target_points(self):
        cloud = PointCloud(np.zeros((4, 3)), np.zeros((4, 3)))
        out = append_target_points(cloud, (1.0, 1.0, 1.0), side=0.1, seed=0, count=50)
        assert out.num_points == 54
        assert np.all(np.abs(out.positions[4:] - 1.0) <= 0.05)
        np.testing.assert_array_equal(out.colors[4:], np.tile([0.0, 1.0, 0.0], (50, 1)))

    def test_static_normalization(self):
        cloud = PointCloud(np.array([[2.0, 2.0, 2.0]]))
        spec = NormalizationSpec(mode=NormalizationMode.STATIC, center=(1.0, 1.0, 1.0), scale=2.0)
        np.testing.assert_allclose(normalize(cloud, spec).positions, [[0.5, 0.5, 0.5]])

    def test_per_cloud_normalization(self):
        cloud = PointCloud(np.random.default_rng(40).normal(size=(50, 3)))
        out = normalize(cloud, NormalizationSpec(mode=NormalizationMode.PER_CLOUD))
        np.testing.assert_allclose(out.positions.mean(axis=0), 0.0, atol=1e-12)
        assert abs(np.abs(out.positions).max() - 1.0) <= 1e-9

    def test_per_cloud_normalization_of_identical_points_is_degenerate(self):
        with pytest.raises(DegenerateInputError):
            normalize(PointCloud(np.ones((3, 3))), NormalizationSpec(mode=NormalizationMode.PER_CLOUD))


class TestPipeline:
    def test_all_steps_disabled_is_identity(self):
        rng = np.random.default_rng(52)
        cloud = PointCloud(rng.uniform(-1.0, 1.0, size=(64, 3)), rng.uniform(size=(64, 3)))
        out = preprocess(cloud, PipelineConfig(), 0)
        np.testing.assert_array_equal(out.positions, cloud.positions)
        np.testing.assert_array_equal(out.colors, cloud.colors)

    def test_downsample_to_exact_size_in_order(self):
        cloud = PointCloud(np.arange(3600, dtype=float).reshape(1200, 3))
        out = preprocess(cloud, PipelineConfig(max_points=800), 3)
        assert out.num_points == 800
        assert len(np.unique(out.positions[:, 0])) == 800
        assert np.all(np.diff(out.positions[:, 0]) > 0)

    def test_empty_crop_raises(self):
        config = PipelineConfig(crop_min=(5.0, 5.0, 5.0), crop_max=(6.0, 6.0, 6.0))
        with pytest.raises(DegenerateInputError):
            preprocess(PointCloud(np.zeros((10, 3))), config, 0)

    def test_append_needs_target(self):
        config = PipelineConfig(append_target_points=True)
        with pytest.raises(DegenerateInputError):
            preprocess(PointCloud(np.zeros((10, 3))), config, 0)

    def test_max_points_and_normalization(self):
        config = PipelineConfig(
            max_points=20,
            normalization=NormalizationSpec(mode=NormalizationMode.STATIC, scale=2.0)
        )
        cloud = PointCloud(np.random.default_rng(50).uniform(-1.0, 1.0, size=(100, 3)))
        out = preprocess(cloud, config, 0)
        assert out.num_points == 20
        assert np.abs(out.positions).max() <= 0.5

    def test_same_seed_same_output(self):
        config = PipelineConfig(max_points=30, append_target_points=True)
        cloud = PointCloud(np.random.default_rng(51).uniform(size=(100, 3)))
        a = preprocess(cloud, config, 7, target=(0.0, 0.0, 0.0))
        b = preprocess(cloud, config, 7, target=(0.0, 0.0, 0.0))
        np.testing.assert_array_equal(a.positions, b.positions)

    def test_crop_box_needs_both_corners(self):
        with pytest.raises(ValueError):
            PipelineConfig(crop_min=(0.0, 0.0, 0.0))
