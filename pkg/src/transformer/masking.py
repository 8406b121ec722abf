"""Attention visibility masks for the RL and reconstruction passes"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.errors import InvalidArgumentError
from src.geometry.sampling import SeedLike, as_generator


@dataclass(frozen=True)
class AttentionMask:
    """Boolean visibility, row = attending position, column = attended position.

    In the reconstruction layout column 0 is the start-of-sequence slot and
    column t + 1 holds Morton token t. `hidden` lists the randomly hidden
    token indices (0-based, Morton order).
    """
    visible: np.ndarray
    n_real: int
    hidden: np.ndarray

    @property
    def size(self) -> int:
        return int(self.visible.shape[-1])

    @property
    def n_pad(self) -> int:
        return self.size - 1 - self.n_real


def prefix_count(n_real: int, prefix_fraction: float) -> int:
    """Leading tokens that are never hidden: ceil(prefix_fraction * n_real)"""
    # 1e-9 absorbs products like 0.15 * 20 = 3.0000000000000004
    return min(n_real, math.ceil(prefix_fraction * n_real - 1e-9))


def hidden_count(n_real: int, mask_ratio: float, prefix_fraction: float) -> int:
    """round(m * n_eligible) with halves rounded up"""
    n_eligible = n_real - prefix_count(n_real, prefix_fraction)
    return int(math.floor(mask_ratio * n_eligible + 0.5 + 1e-9))


def build_decoder_mask(
    n_real: int,
    n_pad: int,
    mask_ratio: float,
    prefix_fraction: float,
    seed: SeedLike
) -> AttentionMask:
    """
    Hybrid random + causal mask with a start-of-sequence column.

    Args:
        n_real: Real tokens in the sequence
        n_pad: Padding tokens after them
        mask_ratio: m, fraction of eligible tokens hidden
        prefix_fraction: Leading share of real tokens that is never hidden
        seed: Integer seed or Generator choosing the hidden tokens

    Returns:
        AttentionMask of size S = n_real + n_pad + 1
    """
    if n_real < 0 or n_pad < 0:
        raise InvalidArgumentError(f"token counts must be non-negative, got {n_real}, {n_pad}")
    if not 0.0 <= mask_ratio <= 1.0 or not 0.0 <= prefix_fraction <= 1.0:
        raise InvalidArgumentError("mask_ratio and prefix_fraction must lie in [0, 1]")

    size = n_real + n_pad + 1
    first_eligible = prefix_count(n_real, prefix_fraction)
    count = hidden_count(n_real, mask_ratio, prefix_fraction)
    rng = as_generator(seed)
    eligible = np.arange(first_eligible, n_real)
    hidden = np.sort(rng.choice(eligible, size=count, replace=False)) if count else np.zeros(0, dtype=np.int64)

    rows = np.arange(size)[:, None]
    cols = np.arange(size)[None, :]
    visible = cols < rows
    visible[:, 0] = True
    visible[:, hidden + 1] = False
    # predecessor stays visible, hidden or not
    last_real_row = n_real
    predecessor_rows = np.arange(1, last_real_row + 1)
    visible[predecessor_rows, predecessor_rows - 1] = True

    visible[:, last_real_row + 1:] = False
    visible[last_real_row + 1:, :] = False
    return AttentionMask(visible=visible, n_real=n_real, hidden=hidden.astype(np.int64))


def build_decoder_masks(
    n_real: Sequence[int],
    length: int,
    mask_ratio: float,
    prefix_fraction: float,
    rng: np.random.Generator
) -> np.ndarray:
    """
    Stack per-sample reconstruction masks for a padded batch.

    Args:
        n_real: Real token count per sample
        length: Padded token length (the mask is length + 1 wide)

    Returns:
        (B, length + 1, length + 1) bool
    """
    masks = []
    for count in n_real:
        count = int(count)
        masks.append(build_decoder_mask(count, length - count, mask_ratio, prefix_fraction, rng).visible)
    return np.stack(masks)


def build_encoder_mask(is_padding: np.ndarray) -> np.ndarray:
    """Bidirectional visibility between real tokens; padding rows and columns invisible"""
    real = ~np.asarray(is_padding, dtype=bool)
    return real[..., :, None] & real[..., None, :]
