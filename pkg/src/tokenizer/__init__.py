"""Patch tokenization: patchify, packing, mini-PointNet embedding, encodings"""

from .patching import patchify, patchify_batch, PatchBatch, pack_patch_sets
from .embedding import PatchEmbedding, TokenSequence, embed_patches
from .encodings import (
    frequencies,
    sinusoidal_features,
    positional_encoding,
    relative_directions,
    RelativeDirectionEncoding,
)

__all__ = [
    "patchify",
    "patchify_batch",
    "PatchBatch",
    "pack_patch_sets",
    "PatchEmbedding",
    "TokenSequence",
    "embed_patches",
    "frequencies",
    "sinusoidal_features",
    "positional_encoding",
    "relative_directions",
    "RelativeDirectionEncoding",
]
