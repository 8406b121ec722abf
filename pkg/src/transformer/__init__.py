"""Transformer encoder/decoder, attention masks, pooling and state fusion"""

from .masking import (
    AttentionMask,
    prefix_count,
    hidden_count,
    build_decoder_mask,
    build_decoder_masks,
    build_encoder_mask,
)
from .blocks import MultiHeadAttention, TransformerBlock, TransformerStack
from .encoder import (
    EncodeMode,
    EncoderOutput,
    SequencePool,
    StateFusion,
    PointPatchEncoder,
    encode,
    sequence_pool,
    fuse_state,
)

__all__ = [
    "AttentionMask",
    "prefix_count",
    "hidden_count",
    "build_decoder_mask",
    "build_decoder_masks",
    "build_encoder_mask",
    "MultiHeadAttention",
    "TransformerBlock",
    "TransformerStack",
    "EncodeMode",
    "EncoderOutput",
    "SequencePool",
    "StateFusion",
    "PointPatchEncoder",
    "encode",
    "sequence_pool",
    "fuse_state",
]
