"""Sinusoidal absolute-position and relative-direction encodings"""

import numpy as np

from src.autodiff import Module, Linear, Tensor
from src.errors import ConfigError

MIN_WAVELENGTH = 2.0
MAX_WAVELENGTH = 2.0e4


def _check_width(width: int):
    if width % 6 != 0:
        raise ConfigError(f"encoding width must be divisible by 6, got {width}", key_path="encoder.embed_dim")


def frequencies(width: int) -> np.ndarray:
    """Angular frequencies, one per sine/cosine pair, wavelengths geometric from 2 to 2e4"""
    _check_width(width)
    count = width // 6
    if count == 1:
        wavelengths = np.array([MIN_WAVELENGTH])
    else:
        wavelengths = MIN_WAVELENGTH * (MAX_WAVELENGTH / MIN_WAVELENGTH) ** (np.arange(count) / (count - 1))
    return 2.0 * np.pi / wavelengths


def sinusoidal_features(points: np.ndarray, width: int) -> np.ndarray:
    """
    Map 3-vectors to `width` sinusoidal channels.

    Each axis gets width/3 channels laid out as [sin(x w_0..w_F), cos(x w_0..w_F)];
    the x, y and z blocks are concatenated in that order.

    Args:
        points: (..., 3) coordinates, expected in [-1, 1]
        width: Output width D, divisible by 6

    Returns:
        (..., D) array
    """
    omega = frequencies(width)
    points = np.asarray(points, dtype=np.float64)
    blocks = []
    for axis in range(3):
        phase = points[..., axis:axis + 1] * omega
        blocks.append(np.sin(phase))
        blocks.append(np.cos(phase))
    return np.concatenate(blocks, axis=-1)


def positional_encoding(centroids: np.ndarray, width: int) -> np.ndarray:
    """Absolute encoding of centroid locations, added to tokens in RL mode"""
    return sinusoidal_features(centroids, width)


def relative_directions(sorted_centroids: np.ndarray) -> np.ndarray:
    """
    Unit directions between consecutive Morton-ordered centroids.

    Row 0 holds the absolute first centroid; row i >= 1 holds
    (c_i - c_{i-1}) / |c_i - c_{i-1}|, or zeros when the two coincide.
    """
    c = np.asarray(sorted_centroids, dtype=np.float64)
    out = np.empty_like(c)
    out[..., :1, :] = c[..., :1, :]
    delta = c[..., 1:, :] - c[..., :-1, :]
    norm = np.linalg.norm(delta, axis=-1, keepdims=True)
    out[..., 1:, :] = np.divide(delta, norm, out=np.zeros_like(delta), where=norm > 0.0)
    return out


class RelativeDirectionEncoding(Module):
    """phi(direction) followed by a learned linear projection"""

    def __init__(self, width: int, rng: np.random.Generator, dtype=np.float64):
        _check_width(width)
        self.width = width
        self.dtype = dtype
        self.projection = Linear(width, width, rng, dtype=dtype)

    def features(self, sorted_centroids: np.ndarray) -> np.ndarray:
        return sinusoidal_features(relative_directions(sorted_centroids), self.width)

    def forward(self, sorted_centroids: np.ndarray, valid: np.ndarray = None) -> Tensor:
        """
        Args:
            sorted_centroids: (..., n, 3) Morton-ordered centroids
            valid: Optional (..., n) bool; rows where it is False come out as zeros

        Returns:
            (..., n, D) encodings
        """
        encoded = self.projection(Tensor(self.features(sorted_centroids).astype(self.dtype)))
        if valid is None:
            return encoded
        keep = np.asarray(valid, dtype=self.dtype)[..., None]
        return encoded * keep
