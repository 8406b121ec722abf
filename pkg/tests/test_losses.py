"""Tests for the Chamfer, color and combined reconstruction losses"""

import numpy as np
import pytest

from src.autodiff import Tensor, gradient_check
from src.errors import InvalidArgumentError
from src.losses import PatchPair, aux_loss, chamfer, color_loss, nearest_neighbors, patch_losses


def chamfer_oracle(pred, truth):
    forward = 0.0
    for p in pred:
        forward += min(float(np.sum((p - t) ** 2)) for t in truth)
    backward = 0.0
    for t in truth:
        backward += min(float(np.sum((p - t) ** 2)) for p in pred)
    return forward / len(pred) + backward / len(truth)


def color_oracle(pred, truth):
    total = 0.0
    for p in pred:
        nearest = min(range(len(truth)), key=lambda j: (float(np.sum((p[:3] - truth[j, :3]) ** 2)), j))
        total += float(np.mean((p[3:] - truth[nearest, 3:]) ** 2))
    return total / len(pred)


class TestChamfer:
    def test_matches_double_loop(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            k_pd, k_gt = int(rng.integers(1, 12)), int(rng.integers(1, 12))
            pred, truth = rng.normal(size=(k_pd, 3)), rng.normal(size=(k_gt, 3))
            value = chamfer(PatchPair(pred, truth)).item()
            assert np.isclose(value, chamfer_oracle(pred, truth), rtol=1e-12, atol=1e-14)

    def test_identical_sets_are_zero(self):
        points = np.random.default_rng(1).normal(size=(6, 3))
        assert chamfer(PatchPair(points, points[::-1].copy())).item() == 0.0

    def test_symmetric(self):
        rng = np.random.default_rng(2)
        a, b = rng.normal(size=(5, 3)), rng.normal(size=(7, 3))
        assert np.isclose(chamfer(PatchPair(a, b)).item(), chamfer(PatchPair(b, a)).item())

    def test_batched_shape(self):
        rng = np.random.default_rng(3)
        value, color = patch_losses(rng.normal(size=(2, 3, 4, 3)), rng.normal(size=(2, 3, 5, 3)), with_color=False)
        assert value.shape == (2, 3)
        assert color is None

    def test_ties_resolve_to_lowest_index(self):
        to_truth, _ = nearest_neighbors(np.zeros((1, 3)), np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]))
        assert to_truth[0] == 0

    def test_gradients(self):
        rng = np.random.default_rng(4)
        pred = Tensor(rng.normal(size=(3, 6, 3)), requires_grad=True)
        truth = rng.normal(size=(3, 5, 3))
        assert gradient_check(lambda: patch_losses(pred, truth, False)[0].sum(), [pred]) < 1e-6


class TestColorLoss:
    def test_matches_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            pred = np.concatenate([rng.normal(size=(6, 3)), rng.uniform(size=(6, 3))], axis=1)
            truth = np.concatenate([rng.normal(size=(4, 3)), rng.uniform(size=(4, 3))], axis=1)
            assert np.isclose(color_loss(PatchPair(pred, truth)).item(), color_oracle(pred, truth), rtol=1e-12)

    def test_needs_colors(self):
        points = np.zeros((2, 3))
        with pytest.raises(InvalidArgumentError):
            color_loss(PatchPair(points, points))

    def test_geometry_decides_the_match(self):
        pred = np.array([[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]])
        truth = np.array([[0.1, 0.0, 0.0, 0.0, 0.0, 0.0], [2.0, 0.0, 0.0, 1.0, 1.0, 1.0]])
        assert np.isclose(color_loss(PatchPair(pred, truth)).item(), 1.0)

    def test_gradients(self):
        rng = np.random.default_rng(6)
        pred = Tensor(np.concatenate([rng.normal(size=(2, 5, 3)), rng.uniform(size=(2, 5, 3))], axis=-1), requires_grad=True)
        truth = np.concatenate([rng.normal(size=(2, 5, 3)), rng.uniform(size=(2, 5, 3))], axis=-1)
        assert gradient_check(lambda: patch_losses(pred, truth, True)[1].sum(), [pred]) < 1e-6


class TestAuxLoss:
    @pytest.fixture
    def patches(self):
        rng = np.random.default_rng(7)
        pred = np.concatenate([rng.normal(size=(2, 3, 4, 3)), rng.uniform(size=(2, 3, 4, 3))], axis=-1)
        truth = np.concatenate([rng.normal(size=(2, 3, 4, 3)), rng.uniform(size=(2, 3, 4, 3))], axis=-1)
        return pred, truth

    def test_combines_terms(self, patches):
        pred, truth = patches
        geometric, color = patch_losses(pred, truth, with_color=True)
        expected = (geometric.data + 0.5 * color.data).mean()
        assert np.isclose(aux_loss(pred, truth, True, color_weight=0.5).item(), expected)

    def test_color_disabled_is_chamfer_only(self, patches):
        pred, truth = patches
        geometric, _ = patch_losses(pred, truth, with_color=False)
        assert np.isclose(aux_loss(pred, truth, False).item(), geometric.data.mean())

    def test_valid_mask_drops_padding(self, patches):
        pred, truth = patches
        valid = np.array([[True, True, False], [True, False, False]])
        per_patch, _ = patch_losses(pred, truth, with_color=False)
        expected = per_patch.data[valid].mean()
        assert np.isclose(aux_loss(pred, truth, False, valid=valid).item(), expected)

    def test_padding_gets_no_gradient(self, patches):
        pred, truth = patches
        tensor = Tensor(pred, requires_grad=True)
        valid = np.array([[True, True, False], [True, False, False]])
        aux_loss(tensor, truth, True, valid=valid).backward()
        assert np.all(tensor.grad[~valid] == 0.0)
        assert np.any(tensor.grad[valid] != 0.0)

    def test_no_real_patch_rejected(self, patches):
        pred, truth = patches
        with pytest.raises(InvalidArgumentError):
            aux_loss(pred, truth, False, valid=np.zeros((2, 3), dtype=bool))

    def test_valid_shape_checked(self, patches):
        pred, truth = patches
        with pytest.raises(InvalidArgumentError):
            aux_loss(pred, truth, False, valid=np.ones(3, dtype=bool))


class TestPatchPair:
    def test_empty_side_rejected(self):
        with pytest.raises(InvalidArgumentError):
            PatchPair(np.zeros((0, 3)), np.zeros((2, 3)))

    def test_width_mismatch_rejected(self):
        with pytest.raises(InvalidArgumentError):
            PatchPair(np.zeros((2, 3)), np.zeros((2, 6)))
