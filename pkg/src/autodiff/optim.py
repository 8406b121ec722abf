"""Adam optimizer"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import InvalidArgumentError
from .nn import Parameter


@dataclass
class AdamState:
    """First/second moments per parameter plus the shared step count"""
    step: int = 0
    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)


def adam_step(
    params: Sequence[np.ndarray],
    grads: Sequence[Optional[np.ndarray]],
    state: AdamState,
    lr: float,
    betas: Tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8
) -> Tuple[List[np.ndarray], AdamState]:
    """
    One bias-corrected Adam update.

    Args:
        params: Current parameter arrays
        grads: Gradient per parameter; None is treated as zero
        state: Moments from previous steps (empty on the first call)
        lr: Learning rate
        betas: Moment decay rates
        eps: Denominator floor

    Returns:
        (new parameter arrays, new state)
    """
    if len(params) != len(grads):
        raise InvalidArgumentError(f"{len(params)} params but {len(grads)} grads")
    if not state.m:
        state = AdamState(0, [np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])
    beta1, beta2 = betas
    t = state.step + 1
    bias1 = 1.0 - beta1 ** t
    bias2 = 1.0 - beta2 ** t

    new_params, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if g is None:
            g = np.zeros_like(p)
        if g.shape != p.shape:
            raise InvalidArgumentError(f"gradient shape {g.shape} does not match parameter {p.shape}")
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        update = lr * (m / bias1) / (np.sqrt(v / bias2) + eps)
        new_params.append((p - update).astype(p.dtype))
        new_m.append(m.astype(p.dtype))
        new_v.append(v.astype(p.dtype))
    return new_params, AdamState(t, new_m, new_v)


class Adam:
    """Adam over a fixed list of Parameters, updating their data in place"""

    def __init__(
        self,
        params: Sequence[Parameter],
        lr: float,
        betas: Tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8
    ):
        if lr <= 0:
            raise InvalidArgumentError(f"learning rate must be positive, got {lr}")
        self.params = list(params)
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.state = AdamState()

    def zero_grad(self):
        for p in self.params:
            p.grad = None

    def step(self):
        new_params, self.state = adam_step(
            [p.data for p in self.params],
            [p.grad for p in self.params],
            self.state,
            self.lr,
            self.betas,
            self.eps
        )
        for p, data in zip(self.params, new_params):
            p.data = data

    def state_dict(self) -> Dict[str, np.ndarray]:
        state = {"step": np.array([self.state.step], dtype=np.int64)}
        for i, (m, v) in enumerate(zip(self.state.m, self.state.v)):
            state[f"m.{i}"] = m.copy()
            state[f"v.{i}"] = v.copy()
        return state

    def load_state_dict(self, state: Dict[str, np.ndarray]):
        step = int(np.asarray(state["step"]).reshape(-1)[0])
        if step == 0:
            self.state = AdamState()
            return
        m = [np.array(state[f"m.{i}"]) for i in range(len(self.params))]
        v = [np.array(state[f"v.{i}"]) for i in range(len(self.params))]
        for p, moment in zip(self.params, m):
            if moment.shape != p.shape:
                raise InvalidArgumentError(f"optimizer moment shape {moment.shape} does not match {p.shape}")
        self.state = AdamState(step, m, v)
