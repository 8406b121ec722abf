"""Multi-input and composite differentiable operations"""

from typing import Optional, Sequence

import numpy as np

from src.errors import InvalidArgumentError
from .tensor import Tensor, unbroadcast


def as_tensor(value, dtype=None) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(np.asarray(value, dtype=dtype))


def matmul(a: Tensor, b: Tensor) -> Tensor:
    return a @ b


def linear(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """
    Affine map over the last axis.

    Args:
        x: (..., in) input
        weight: (in, out) matrix
        bias: Optional (out,) vector

    Returns:
        (..., out) tensor
    """
    if x.shape[-1] != weight.shape[0]:
        raise InvalidArgumentError(f"linear: input width {x.shape[-1]} != weight rows {weight.shape[0]}")
    lead = x.shape[:-1]
    flat = x.data.reshape(-1, x.shape[-1])
    w = weight.data
    out = flat @ w
    if bias is not None:
        out = out + bias.data
    out = out.reshape(lead + (w.shape[1],))
    parents = (x, weight) if bias is None else (x, weight, bias)

    def backward(g):
        g2 = g.reshape(-1, w.shape[1])
        grads = [
            (g2 @ w.T).reshape(x.shape) if x.requires_grad else None,
            flat.T @ g2 if weight.requires_grad else None,
        ]
        if bias is not None:
            grads.append(g2.sum(axis=0) if bias.requires_grad else None)
        return tuple(grads)
    return Tensor.make(out, parents, backward, "linear")


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    if not tensors:
        raise InvalidArgumentError("concat of an empty sequence")
    arrays = [t.data for t in tensors]
    try:
        out = np.concatenate(arrays, axis=axis)
    except ValueError as exc:
        raise InvalidArgumentError(f"concat: {exc}")
    sizes = np.cumsum([a.shape[axis] for a in arrays])[:-1]

    def backward(g):
        return tuple(np.split(g, sizes, axis=axis))
    return Tensor.make(out, tuple(tensors), backward, "concat")


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    expanded = []
    for t in tensors:
        shape = list(t.shape)
        position = axis if axis >= 0 else len(shape) + 1 + axis
        shape.insert(position, 1)
        expanded.append(t.reshape(tuple(shape)))
    return concat(expanded, axis=axis)


def minimum(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise min; ties route the gradient to `a`"""
    a, b = as_tensor(a), as_tensor(b)
    x, y = a.data, b.data
    take_a = x <= y

    def backward(g):
        return (
            unbroadcast(g * take_a, x.shape) if a.requires_grad else None,
            unbroadcast(g * ~take_a, y.shape) if b.requires_grad else None,
        )
    return Tensor.make(np.minimum(x, y), (a, b), backward, "minimum")


def where(condition: np.ndarray, a: Tensor, b: Tensor) -> Tensor:
    """Select from `a` where condition holds, else from `b` (condition is constant)"""
    a, b = as_tensor(a), as_tensor(b)
    cond = np.asarray(condition, dtype=bool)
    out = np.where(cond, a.data, b.data)

    def backward(g):
        return (
            unbroadcast(np.where(cond, g, 0.0), a.shape) if a.requires_grad else None,
            unbroadcast(np.where(cond, 0.0, g), b.shape) if b.requires_grad else None,
        )
    return Tensor.make(out.astype(np.result_type(a.dtype, b.dtype)), (a, b), backward, "where")


def gather(x: Tensor, indices: np.ndarray, axis: int = 0) -> Tensor:
    """Index rows of `x` along `axis`; repeated indices accumulate gradient"""
    index = [slice(None)] * x.ndim
    index[axis] = np.asarray(indices, dtype=np.int64)
    return x[tuple(index)]


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)
    return Tensor.make(out, (x,), backward, "softmax")


def masked_softmax(x: Tensor, visible: np.ndarray, axis: int = -1) -> Tensor:
    """
    Softmax restricted to visible entries.

    Invisible entries get zero weight. A slice with no visible entry yields
    all zeros and passes no gradient.
    """
    visible = np.broadcast_to(np.asarray(visible, dtype=bool), x.shape)
    filled = np.where(visible, x.data, -np.inf)
    row_max = filled.max(axis=axis, keepdims=True)
    row_max = np.where(np.isfinite(row_max), row_max, 0.0)
    e = np.where(visible, np.exp(filled - row_max), 0.0)
    denom = e.sum(axis=axis, keepdims=True)
    out = np.divide(e, denom, out=np.zeros_like(e), where=denom > 0).astype(x.dtype)

    def backward(g):
        return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)
    return Tensor.make(out, (x,), backward, "masked_softmax")


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize the last axis to zero mean and unit variance, then scale and shift"""
    if gamma.shape != (x.shape[-1],) or beta.shape != (x.shape[-1],):
        raise InvalidArgumentError(f"layer_norm: affine shape {gamma.shape} does not match width {x.shape[-1]}")
    data = x.data
    centered = data - data.mean(axis=-1, keepdims=True)
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv
    out = xhat * gamma.data + beta.data
    lead_axes = tuple(range(data.ndim - 1))

    def backward(g):
        gx = None
        if x.requires_grad:
            g_hat = g * gamma.data
            gx = inv * (
                g_hat
                - g_hat.mean(axis=-1, keepdims=True)
                - xhat * (g_hat * xhat).mean(axis=-1, keepdims=True)
            )
        g_gamma = (g * xhat).sum(axis=lead_axes) if gamma.requires_grad else None
        g_beta = g.sum(axis=lead_axes) if beta.requires_grad else None
        return gx, g_gamma, g_beta
    return Tensor.make(out, (x, gamma, beta), backward, "layer_norm")


def attention(query: Tensor, key: Tensor, value: Tensor, visible: Optional[np.ndarray] = None) -> Tensor:
    """
    Scaled dot-product attention.

    Args:
        query: (..., S, d) queries
        key: (..., S, d) keys
        value: (..., S, dv) values
        visible: Boolean (..., S, S) visibility, broadcastable to the logits;
            None means every position is visible

    Returns:
        (..., S, dv) outputs; rows with nothing visible are zero
    """
    if query.shape[-1] != key.shape[-1] or key.shape[-2] != value.shape[-2]:
        raise InvalidArgumentError(
            f"attention: incompatible shapes q={query.shape} k={key.shape} v={value.shape}"
        )
    scale = 1.0 / np.sqrt(float(query.shape[-1]))
    logits = (query @ key.swapaxes(-1, -2)) * scale
    if visible is None:
        weights = softmax(logits, axis=-1)
    else:
        visible = np.asarray(visible, dtype=bool)
        try:
            np.broadcast_shapes(visible.shape, logits.shape)
        except ValueError:
            raise InvalidArgumentError(f"attention: mask {visible.shape} does not fit logits {logits.shape}")
        weights = masked_softmax(logits, visible, axis=-1)
    return weights @ value


def mse(prediction: Tensor, target: Tensor) -> Tensor:
    diff = prediction - target
    return (diff * diff).mean()
