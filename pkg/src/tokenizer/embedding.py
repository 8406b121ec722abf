"""Mini-PointNet patch tokenizer"""

from dataclasses import dataclass

import numpy as np

from src.autodiff import Module, MLP, Parameter, Tensor, concat
from src.errors import InvalidArgumentError
from .patching import PatchBatch

FIRST_WIDTHS = (64, 128)
SECOND_HIDDEN = 256


@dataclass
class TokenSequence:
    """Batched tokens ready for the transformer.

    tokens:       (B, n, D) Tensor; padding slots hold the learned pad embedding
    centroids:    (B, n, 3), zeros at padding slots
    is_padding:   (B, n) bool
    n_real:       (B,) counts
    """
    tokens: Tensor
    centroids: np.ndarray
    is_padding: np.ndarray
    n_real: np.ndarray

    @property
    def length(self) -> int:
        return int(self.tokens.shape[1])


class PatchEmbedding(Module):
    """
    Two pointwise MLPs with a max-pool after each.

    MLP1 maps F -> 64 -> 128 per point, the pooled 128-vector is
    concatenated back onto every point, MLP2 maps 256 -> 256 -> D and a
    final max-pool yields one token per patch.
    """

    def __init__(self, feature_dim: int, embed_dim: int, rng: np.random.Generator, dtype=np.float64):
        if feature_dim not in (3, 6):
            raise InvalidArgumentError(f"point features must be 3 or 6 wide, got {feature_dim}")
        self.feature_dim = feature_dim
        self.embed_dim = embed_dim
        self.dtype = dtype
        self.first = MLP((feature_dim,) + FIRST_WIDTHS, rng, dtype=dtype)
        self.second = MLP((2 * FIRST_WIDTHS[-1], SECOND_HIDDEN, embed_dim), rng, dtype=dtype)
        self.pad_embedding = Parameter(rng.normal(0.0, 0.02, size=embed_dim).astype(dtype))

    def embed(self, patches: np.ndarray) -> Tensor:
        """(..., k, F) patches -> (..., D) tokens, no padding handling"""
        if patches.shape[-1] != self.feature_dim:
            raise InvalidArgumentError(
                f"patch feature width {patches.shape[-1]} does not match tokenizer width {self.feature_dim}"
            )
        if patches.shape[-2] < 1:
            raise InvalidArgumentError("patches need at least one point")
        x = Tensor(np.asarray(patches, dtype=self.dtype))
        h = self.first(x)
        pooled = h.max(axis=-2, keepdims=True)
        spread = pooled * np.ones(h.shape[:-1] + (1,), dtype=self.dtype)
        h = self.second(concat([h, spread], axis=-1))
        return h.max(axis=-2)

    def forward(self, batch: PatchBatch) -> TokenSequence:
        """
        Embed every patch of a padded batch.

        Padding slots are replaced by the learned pad embedding; their
        placeholder patches receive no gradient.
        """
        raw = self.embed(batch.patches)
        pad = batch.is_padding[..., None].astype(self.dtype)
        tokens = raw * (1.0 - pad) + self.pad_embedding * pad
        return TokenSequence(tokens, batch.centroids, batch.is_padding, batch.n_real)


def embed_patches(batch: PatchBatch, tokenizer: PatchEmbedding) -> TokenSequence:
    return tokenizer(batch)
