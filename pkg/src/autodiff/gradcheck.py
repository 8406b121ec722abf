"""Central finite-difference gradient checking"""

from typing import Callable, Optional, Sequence

import numpy as np

from .tensor import Tensor, no_grad


def numerical_gradient(
    fn: Callable[[], Tensor],
    wrt: Tensor,
    h: float = 1e-5,
    indices: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Central differences of a scalar function w.r.t. one tensor.

    Entries not listed in `indices` (flat positions) are left at zero.
    """
    grad = np.zeros(wrt.shape, dtype=np.float64)
    if not wrt.data.flags.c_contiguous:
        wrt.data = np.ascontiguousarray(wrt.data)
    flat = wrt.data.reshape(-1)
    grad_flat = grad.reshape(-1)
    positions = range(flat.size) if indices is None else indices
    with no_grad():
        for i in positions:
            original = flat[i]
            flat[i] = original + h
            plus = fn().item()
            flat[i] = original - h
            minus = fn().item()
            flat[i] = original
            grad_flat[i] = (plus - minus) / (2.0 * h)
    return grad


def gradient_check(
    fn: Callable[[], Tensor],
    inputs: Sequence[Tensor],
    h: float = 1e-5,
    samples: Optional[int] = None,
    seed: int = 0
) -> float:
    """
    Compare backward() against central differences.

    Args:
        fn: Zero-argument closure computing a scalar from `inputs`
        inputs: Tensors (requires_grad) to check
        h: Finite-difference step
        samples: If set, check only this many random entries per input
        seed: Picks the sampled entries

    Returns:
        Largest relative error over all inputs, scaled by the largest
        gradient magnitude of each input
    """
    for t in inputs:
        t.grad = None
    out = fn()
    out.backward()
    analytic = [np.zeros(t.shape) if t.grad is None else t.grad.astype(np.float64) for t in inputs]

    rng = np.random.default_rng(seed)
    worst = 0.0
    for t, a in zip(inputs, analytic):
        indices = None
        if samples is not None and samples < t.size:
            indices = rng.choice(t.size, size=samples, replace=False)
        n = numerical_gradient(fn, t, h, indices)
        if indices is not None:
            a = a.reshape(-1)[indices]
            n = n.reshape(-1)[indices]
        scale = max(np.abs(a).max(initial=0.0), np.abs(n).max(initial=0.0), 1e-12)
        worst = max(worst, float(np.abs(a - n).max(initial=0.0) / scale))
    return worst
