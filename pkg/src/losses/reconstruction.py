"""Chamfer and color reconstruction losses"""

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from src.autodiff import Tensor, as_tensor
from src.errors import InvalidArgumentError


@dataclass(frozen=True)
class PatchPair:
    """Predicted and ground-truth points of one patch, both centroid-relative.

    predicted is (k_pd, F) and ground_truth (k_gt, F) with F = 3 or 6.
    """
    predicted: Union[Tensor, np.ndarray]
    ground_truth: np.ndarray

    def __post_init__(self):
        pred_shape = self.predicted.shape
        gt_shape = np.shape(self.ground_truth)
        if len(pred_shape) != 2 or len(gt_shape) != 2:
            raise InvalidArgumentError(f"patches must be 2-D, got {pred_shape} and {gt_shape}")
        if pred_shape[0] == 0 or gt_shape[0] == 0:
            raise InvalidArgumentError("both sides of a patch pair must be non-empty")
        if pred_shape[1] != gt_shape[1] or pred_shape[1] not in (3, 6):
            raise InvalidArgumentError(f"feature widths disagree or are invalid: {pred_shape[1]} vs {gt_shape[1]}")

    @property
    def has_colors(self) -> bool:
        return self.predicted.shape[1] == 6


def squared_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(..., p, 3) x (..., q, 3) -> (..., p, q) squared L2 via explicit differences"""
    diff = a[..., :, None, :] - b[..., None, :, :]
    return np.einsum("...d,...d->...", diff, diff)


def nearest_neighbors(predicted_xyz: np.ndarray, truth_xyz: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nearest-neighbour indices in both directions, lowest index on ties.

    Returns:
        (pred_to_truth (..., k_pd), truth_to_pred (..., k_gt))
    """
    d = squared_distances(predicted_xyz, truth_xyz)
    return np.argmin(d, axis=-1), np.argmin(d, axis=-2)


def _flatten(predicted: Tensor, truth: np.ndarray):
    lead = predicted.shape[:-2]
    if truth.shape[:-2] != lead:
        raise InvalidArgumentError(f"leading shapes differ: {lead} vs {truth.shape[:-2]}")
    count = int(np.prod(lead)) if lead else 1
    flat_pred = predicted.reshape((count,) + predicted.shape[-2:])
    flat_truth = truth.reshape((count,) + truth.shape[-2:])
    return lead, count, flat_pred, flat_truth


def patch_losses(
    predicted: Union[Tensor, np.ndarray],
    ground_truth: np.ndarray,
    with_color: bool
) -> Tuple[Tensor, Optional[Tensor]]:
    """
    Per-patch Chamfer and color losses for arbitrarily batched patches.

    Args:
        predicted: (..., k_pd, F) predictions
        ground_truth: (..., k_gt, F) targets
        with_color: Also compute the color term (needs F = 6)

    Returns:
        (chamfer (...), color (...) or None)
    """
    predicted = as_tensor(predicted)
    truth = np.asarray(ground_truth, dtype=predicted.dtype)
    if predicted.shape[-2] == 0 or truth.shape[-2] == 0:
        raise InvalidArgumentError("chamfer needs non-empty point sets")
    if predicted.shape[-1] != truth.shape[-1]:
        raise InvalidArgumentError(f"feature widths differ: {predicted.shape[-1]} vs {truth.shape[-1]}")
    if with_color and predicted.shape[-1] != 6:
        raise InvalidArgumentError("color loss needs colored patches on both sides")

    lead, count, pred, gt = _flatten(predicted, truth)
    pred_xyz = pred[..., :3]
    gt_xyz = gt[..., :3]
    to_truth, to_pred = nearest_neighbors(pred_xyz.data, gt_xyz)
    rows = np.arange(count)[:, None]

    forward = pred_xyz - gt_xyz[rows, to_truth]
    backward = pred_xyz[rows, to_pred] - gt_xyz
    chamfer = (forward * forward).sum(axis=-1).mean(axis=-1) + (backward * backward).sum(axis=-1).mean(axis=-1)
    chamfer = chamfer.reshape(lead)

    color = None
    if with_color:
        delta = pred[..., 3:] - gt[..., 3:][rows, to_truth]
        color = (delta * delta).mean(axis=-1).mean(axis=-1).reshape(lead)
    return chamfer, color


def chamfer(pair: PatchPair) -> Tensor:
    """Squared-L2 symmetric Chamfer distance of one patch pair"""
    value, _ = patch_losses(pair.predicted, pair.ground_truth, with_color=False)
    return value


def color_loss(pair: PatchPair) -> Tensor:
    """Channel-mean squared color error against the geometric nearest ground-truth point"""
    if not pair.has_colors:
        raise InvalidArgumentError("color loss needs colored patches on both sides")
    _, value = patch_losses(pair.predicted, pair.ground_truth, with_color=True)
    return value


def aux_loss(
    predicted: Union[Tensor, np.ndarray],
    ground_truth: np.ndarray,
    color_enabled: bool,
    valid: Optional[np.ndarray] = None,
    color_weight: float = 1.0
) -> Tensor:
    """
    Mean over real patches of chamfer + color_weight * color.

    Args:
        predicted: (..., k, F) predicted patches
        ground_truth: (..., k, F) ground-truth patches
        color_enabled: Include the color term
        valid: Optional (...) bool selecting real patches; padding is dropped
        color_weight: Multiplier of the color term

    Returns:
        Scalar loss
    """
    per_patch, color = patch_losses(predicted, ground_truth, with_color=color_enabled)
    if color is not None:
        per_patch = per_patch + color * color_weight
    if valid is None:
        return per_patch.mean()
    valid = np.asarray(valid, dtype=bool)
    if valid.shape != per_patch.shape:
        raise InvalidArgumentError(f"valid mask {valid.shape} does not match patches {per_patch.shape}")
    count = int(valid.sum())
    if count == 0:
        raise InvalidArgumentError("aux_loss needs at least one real patch")
    return (per_patch * valid.astype(per_patch.dtype)).sum() * (1.0 / count)
