"""Pre-norm transformer blocks"""

from typing import Optional

import numpy as np

from src.autodiff import Module, Linear, LayerNorm, Tensor, attention
from src.errors import InvalidArgumentError


class MultiHeadAttention(Module):
    def __init__(self, width: int, num_heads: int, rng: np.random.Generator, dtype=np.float64):
        if width % num_heads != 0:
            raise InvalidArgumentError(f"width {width} is not divisible by {num_heads} heads")
        self.num_heads = num_heads
        self.head_dim = width // num_heads
        self.qkv = Linear(width, 3 * width, rng, dtype=dtype)
        self.out = Linear(width, width, rng, dtype=dtype)

    def forward(self, x: Tensor, visible: Optional[np.ndarray] = None) -> Tensor:
        """
        Args:
            x: (B, S, D)
            visible: (B, S, S) or (S, S) bool, None for full visibility
        """
        batch, length, width = x.shape
        qkv = self.qkv(x).reshape(batch, length, 3, self.num_heads, self.head_dim)
        qkv = qkv.transpose(2, 0, 3, 1, 4)
        if visible is not None:
            visible = np.asarray(visible, dtype=bool)
            visible = visible[:, None] if visible.ndim == 3 else visible
        mixed = attention(qkv[0], qkv[1], qkv[2], visible)
        mixed = mixed.transpose(0, 2, 1, 3).reshape(batch, length, width)
        return self.out(mixed)


class TransformerBlock(Module):
    """x + attn(ln(x)), then x + ffn(ln(x)); ELU feed-forward of width mlp_ratio * D"""

    def __init__(self, width: int, num_heads: int, mlp_ratio: int, rng: np.random.Generator, dtype=np.float64):
        self.norm1 = LayerNorm(width, dtype=dtype)
        self.attn = MultiHeadAttention(width, num_heads, rng, dtype=dtype)
        self.norm2 = LayerNorm(width, dtype=dtype)
        self.fc1 = Linear(width, mlp_ratio * width, rng, dtype=dtype)
        self.fc2 = Linear(mlp_ratio * width, width, rng, dtype=dtype)

    def forward(self, x: Tensor, visible: Optional[np.ndarray] = None) -> Tensor:
        x = x + self.attn(self.norm1(x), visible)
        return x + self.fc2(self.fc1(self.norm2(x)).elu())


class TransformerStack(Module):
    """Blocks with the positional signal re-added before each one, then a final LayerNorm"""

    def __init__(
        self,
        width: int,
        depth: int,
        num_heads: int,
        mlp_ratio: int,
        rng: np.random.Generator,
        dtype=np.float64
    ):
        self.blocks = [TransformerBlock(width, num_heads, mlp_ratio, rng, dtype) for _ in range(depth)]
        self.norm = LayerNorm(width, dtype=dtype)

    def forward(self, x: Tensor, visible: Optional[np.ndarray] = None, position: Optional[Tensor] = None) -> Tensor:
        for block in self.blocks:
            if position is not None:
                x = x + position
            x = block(x, visible)
        return self.norm(x)
