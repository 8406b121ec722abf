"""Actor and twin-critic heads on top of the fused embedding"""

import math
from typing import Optional, Tuple

import numpy as np

from src.autodiff import MLP, Module, Tensor, concat, minimum

LOG_2 = math.log(2.0)
HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _widths(in_features: int, hidden: int, out_features: int, num_layers: int):
    return (in_features,) + (hidden,) * (num_layers - 1) + (out_features,)


def tanh_log_det(u: Tensor) -> Tensor:
    """log(1 - tanh(u)^2) in the overflow-free form 2 (log 2 - u - softplus(-2u))"""
    return ((-u * 2.0).softplus() * -1.0 - u + LOG_2) * 2.0


class Actor(Module):
    """
    Squashed Gaussian policy.

    An ELU MLP maps the embedding to a mean and a log-std per action
    dimension; log-std is clamped, the Gaussian sample is squashed by tanh
    and the log-probability carries the tanh Jacobian correction.
    """

    def __init__(
        self,
        embed_dim: int,
        action_dim: int,
        hidden_width: int,
        num_layers: int,
        rng: np.random.Generator,
        log_std_bounds: Tuple[float, float] = (-10.0, 2.0),
        dtype=np.float64
    ):
        self.action_dim = action_dim
        self.log_std_min, self.log_std_max = log_std_bounds
        self.dtype = dtype
        self.net = MLP(_widths(embed_dim, hidden_width, 2 * action_dim, num_layers), rng, dtype=dtype)

    def distribution(self, embedding: Tensor) -> Tuple[Tensor, Tensor]:
        """(mean, clamped log-std), each (B, A)"""
        out = self.net(embedding)
        mean = out[:, : self.action_dim]
        log_std = out[:, self.action_dim:].clamp(self.log_std_min, self.log_std_max)
        return mean, log_std

    def forward(
        self,
        embedding: Tensor,
        rng: Optional[np.random.Generator] = None,
        deterministic: bool = False,
        noise: Optional[np.ndarray] = None
    ) -> Tuple[Tensor, Tensor]:
        """
        Sample actions with the reparameterization trick.

        Args:
            embedding: (B, E) detached fused embedding
            rng: Noise source for stochastic sampling
            deterministic: Return tanh(mean) instead of a sample
            noise: Explicit standard-normal noise (B, A), overrides rng

        Returns:
            (actions (B, A) in (-1, 1), log_prob (B,))
        """
        mean, log_std = self.distribution(embedding)
        if deterministic:
            eps = np.zeros(mean.shape, dtype=self.dtype)
        elif noise is not None:
            eps = np.asarray(noise, dtype=self.dtype).reshape(mean.shape)
        else:
            eps = rng.standard_normal(mean.shape).astype(self.dtype)

        u = mean + log_std.exp() * eps
        gaussian = (log_std + (HALF_LOG_2PI + 0.5 * eps * eps)) * -1.0
        log_prob = (gaussian - tanh_log_det(u)).sum(axis=-1)
        return u.tanh(), log_prob


class QNetwork(Module):
    def __init__(self, in_features: int, hidden_width: int, num_layers: int, rng: np.random.Generator, dtype=np.float64):
        self.net = MLP(_widths(in_features, hidden_width, 1, num_layers), rng, dtype=dtype)

    def forward(self, embedding: Tensor, action: Tensor) -> Tensor:
        x = concat([embedding, action], axis=-1)
        return self.net(x).reshape(x.shape[0])


class TwinCritic(Module):
    """Two independent Q heads on [embedding, action]"""

    def __init__(
        self,
        embed_dim: int,
        action_dim: int,
        hidden_width: int,
        num_layers: int,
        rng: np.random.Generator,
        dtype=np.float64
    ):
        self.q1 = QNetwork(embed_dim + action_dim, hidden_width, num_layers, rng, dtype)
        self.q2 = QNetwork(embed_dim + action_dim, hidden_width, num_layers, rng, dtype)

    def forward(self, embedding: Tensor, action: Tensor) -> Tuple[Tensor, Tensor]:
        return self.q1(embedding, action), self.q2(embedding, action)

    def min_q(self, embedding: Tensor, action: Tensor) -> Tensor:
        q1, q2 = self(embedding, action)
        return minimum(q1, q2)

    def soft_update(self, source: "TwinCritic", tau: float):
        """theta' <- (1 - tau) theta' + tau theta, outside any optimizer"""
        for (name, target), (_, live) in zip(self.named_parameters(), source.named_parameters()):
            target.data = ((1.0 - tau) * target.data + tau * live.data).astype(target.dtype)
