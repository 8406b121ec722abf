"""Shared point-patch encoder: RL pass, masked reconstruction pass, pooling and state fusion"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from src.autodiff import Module, Linear, Parameter, Tensor, concat, masked_softmax
from src.errors import InvalidArgumentError
from src.models.config import EncoderConfig
from src.tokenizer import PatchBatch, PatchEmbedding, RelativeDirectionEncoding, TokenSequence, positional_encoding
from .blocks import TransformerStack
from .masking import build_encoder_mask


class EncodeMode(str, Enum):
    RL = "rl"
    RECONSTRUCTION = "reconstruction"


@dataclass
class EncoderOutput:
    """Encoded tokens (B, S, D); pooled (B, D) only in RL mode"""
    tokens: Tensor
    is_padding: np.ndarray
    n_real: np.ndarray
    pooled: Optional[Tensor] = None
    relative: Optional[Tensor] = None
    visible: Optional[np.ndarray] = None


class SequencePool(Module):
    """Softmax-weighted sum over real tokens with learned logits"""

    def __init__(self, width: int, rng: np.random.Generator, dtype=np.float64):
        self.score = Linear(width, 1, rng, dtype=dtype)

    def weights(self, tokens: Tensor, is_padding: np.ndarray) -> Tensor:
        real = ~np.asarray(is_padding, dtype=bool)
        if not np.all(real.any(axis=-1)):
            raise InvalidArgumentError("sequence_pool needs at least one non-padding token per sample")
        logits = self.score(tokens).reshape(tokens.shape[:-1])
        return masked_softmax(logits, real, axis=-1)

    def forward(self, tokens: Tensor, is_padding: np.ndarray) -> Tensor:
        """(B, S, D) -> (B, D)"""
        batch, length, width = tokens.shape
        w = self.weights(tokens, is_padding)
        return (w.reshape(batch, 1, length) @ tokens).reshape(batch, width)


class StateFusion(Module):
    """Linear projection of the low-dim state, concatenated after the pooled embedding"""

    def __init__(self, state_dim: int, width: int, rng: np.random.Generator, dtype=np.float64):
        self.state_dim = state_dim
        self.projection = Linear(state_dim, width, rng, dtype=dtype)

    def forward(self, pooled: Tensor, state: Optional[np.ndarray]) -> Tensor:
        if state is None:
            return pooled
        state = np.asarray(state, dtype=pooled.dtype).reshape(pooled.shape[0], self.state_dim)
        return concat([pooled, self.projection(Tensor(state))], axis=-1)


class PointPatchEncoder(Module):
    """
    Tokenizer, shared transformer encoder, reconstruction decoder and head.

    RL mode adds absolute sinusoidal encodings and attends bidirectionally
    over real tokens. Reconstruction mode prepends the SOS token, adds
    relative-direction encodings and runs encoder then decoder under the
    hybrid mask; row r of the decoder output predicts patch r. Either
    encoding is re-added to the tokens before every block, not only once
    at the input.
    """

    def __init__(self, config: EncoderConfig, rng: np.random.Generator, dtype=np.float64):
        self.config = config
        self.dtype = dtype
        width = config.embed_dim
        self.tokenizer = PatchEmbedding(config.point_feature_dim, width, rng, dtype=dtype)
        self.encoder = TransformerStack(width, config.num_layers, config.num_heads, config.mlp_ratio, rng, dtype)
        self.pool = SequencePool(width, rng, dtype=dtype)
        self.sos = Parameter(rng.normal(0.0, 0.02, size=width).astype(dtype))
        self.relative = RelativeDirectionEncoding(width, rng, dtype=dtype)
        self.decoder = TransformerStack(width, config.decoder_layers, config.num_heads, config.mlp_ratio, rng, dtype)
        self.head = Linear(width, config.patch_size * config.point_feature_dim, rng, dtype=dtype)

    @property
    def embed_dim(self) -> int:
        return self.config.embed_dim

    def rl_parameters(self):
        """Parameters the critic loss trains: tokenizer, encoder, pool"""
        return self.tokenizer.parameters() + self.encoder.parameters() + self.pool.parameters()

    def reconstruction_parameters(self):
        """Parameters only the auxiliary loss trains"""
        return [self.sos] + self.relative.parameters() + self.decoder.parameters() + self.head.parameters()

    def tokenize(self, batch: PatchBatch) -> TokenSequence:
        return self.tokenizer(batch)

    def encode(self, tokens: TokenSequence, mode: EncodeMode = EncodeMode.RL, visible: Optional[np.ndarray] = None) -> EncoderOutput:
        """
        Run the shared encoder.

        Args:
            tokens: Tokenized, Morton-ordered batch
            mode: rl or reconstruction
            visible: (B, S+1, S+1) decoder mask, required in reconstruction mode

        Returns:
            EncoderOutput
        """
        mode = EncodeMode(mode)
        if mode == EncodeMode.RL:
            if visible is not None:
                raise InvalidArgumentError("rl mode attends bidirectionally and takes no mask")
            position = Tensor(positional_encoding(tokens.centroids, self.embed_dim).astype(self.dtype))
            encoded = self.encoder(tokens.tokens, build_encoder_mask(tokens.is_padding), position)
            pooled = self.pool(encoded, tokens.is_padding)
            return EncoderOutput(encoded, tokens.is_padding, tokens.n_real, pooled=pooled)

        if visible is None:
            raise InvalidArgumentError("reconstruction mode needs a decoder mask")
        batch, length, width = tokens.tokens.shape
        if visible.shape[-1] != length + 1:
            raise InvalidArgumentError(f"mask size {visible.shape[-1]} does not fit {length} tokens + SOS")
        sos = self.sos * np.ones((batch, 1, 1), dtype=self.dtype)
        x = concat([sos, tokens.tokens], axis=1)

        target_rows = ~np.asarray(tokens.is_padding, dtype=bool)
        relative = self.relative(tokens.centroids, target_rows)
        relative = concat([relative, Tensor(np.zeros((batch, 1, width), dtype=self.dtype))], axis=1)

        encoded = self.encoder(x, visible, relative)
        is_padding = np.concatenate([np.zeros((batch, 1), dtype=bool), tokens.is_padding], axis=1)
        return EncoderOutput(encoded, is_padding, tokens.n_real, relative=relative, visible=visible)

    def decode_and_predict(self, encoded: EncoderOutput) -> Tensor:
        """
        Decode a reconstruction-mode encoding into patch predictions.

        Returns:
            (B, n, k, F) predictions in centroid-relative coordinates; only the
            first n_real[b] entries of sample b are meaningful
        """
        if encoded.visible is None or encoded.relative is None:
            raise InvalidArgumentError("decode_and_predict needs a reconstruction-mode encoding")
        decoded = self.decoder(encoded.tokens, encoded.visible, encoded.relative)
        batch, size, _ = decoded.shape
        rows = decoded[:, : size - 1]
        k, features = self.config.patch_size, self.config.point_feature_dim
        return self.head(rows).reshape(batch, size - 1, k, features)

    def sequence_pool(self, tokens: Tensor, is_padding: np.ndarray) -> Tensor:
        return self.pool(tokens, is_padding)

    def embed(self, batch: PatchBatch) -> Tensor:
        """Pooled RL embedding (B, D) of a patch batch"""
        return self.encode(self.tokenize(batch), EncodeMode.RL).pooled

    def reconstruct(self, batch: PatchBatch, visible: np.ndarray) -> Tensor:
        tokens = self.tokenize(batch)
        return self.decode_and_predict(self.encode(tokens, EncodeMode.RECONSTRUCTION, visible))


def encode(tokens: TokenSequence, mode: EncodeMode, model: PointPatchEncoder, mask: Optional[np.ndarray] = None) -> EncoderOutput:
    return model.encode(tokens, mode, mask)


def sequence_pool(tokens: Tensor, is_padding: np.ndarray, pool: SequencePool) -> Tensor:
    return pool(tokens, is_padding)


def fuse_state(pooled: Tensor, state: Optional[np.ndarray], fusion: StateFusion) -> Tensor:
    return fusion(pooled, state)
