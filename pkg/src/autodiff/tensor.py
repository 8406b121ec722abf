"""Reverse-mode tensor on top of numpy.

Every differentiable operation creates a node holding its parents and a
closure that maps the output gradient to one gradient per parent. The
graph is built only while gradient tracking is enabled (see `no_grad`) and
only through tensors that require gradients.
"""

import threading
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.errors import InvalidArgumentError


_grad_state = threading.local()

ArrayLike = Union[np.ndarray, float, int, Sequence]
BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]


def is_grad_enabled() -> bool:
    return getattr(_grad_state, "enabled", True)


class no_grad:
    """Context manager disabling graph construction on the current thread"""

    def __enter__(self):
        self._previous = is_grad_enabled()
        _grad_state.enabled = False
        return self

    def __exit__(self, *exc_info):
        _grad_state.enabled = self._previous
        return False


def unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to `shape`"""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, size in enumerate(shape) if size == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def _is_basic_index(index) -> bool:
    items = index if isinstance(index, tuple) else (index,)
    return all(isinstance(i, (int, np.integer, slice)) or i is None or i is Ellipsis for i in items)


class Tensor:
    """Dense tensor with an optional gradient accumulator"""

    def __init__(self, data: ArrayLike, requires_grad: bool = False, dtype=None):
        if isinstance(data, Tensor):
            data = data.data
        array = np.asarray(data, dtype=dtype)
        if dtype is None and not np.issubdtype(array.dtype, np.floating):
            array = array.astype(np.float64)
        self.data: np.ndarray = array
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.op = "leaf"
        self._parents: Tuple["Tensor", ...] = ()
        self._backward: Optional[BackwardFn] = None

    # ------------------------------------------------------------------ basics

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self) -> int:
        return int(self.data.size)

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float(self.data)

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        """Same values, cut from the graph"""
        return Tensor(self.data, requires_grad=False)

    def zero_grad(self):
        self.grad = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, op={self.op}, requires_grad={self.requires_grad})"

    def _const(self, value: ArrayLike) -> "Tensor":
        if isinstance(value, Tensor):
            return value
        return Tensor(np.asarray(value, dtype=self.data.dtype))

    @staticmethod
    def make(
        data: np.ndarray,
        parents: Sequence["Tensor"],
        backward: BackwardFn,
        op: str
    ) -> "Tensor":
        """Create an op output, wiring it into the graph when tracking applies"""
        out = Tensor(data)
        if is_grad_enabled() and any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
            out.op = op
        return out

    # --------------------------------------------------------------- backward

    def backward(self, grad: Optional[ArrayLike] = None):
        """
        Accumulate d(self)/d(leaf) into every reachable leaf's `.grad`.

        Args:
            grad: Upstream gradient; defaults to 1 for scalar outputs
        """
        if not self.requires_grad:
            raise InvalidArgumentError("backward() on a tensor that does not require grad")
        if grad is None:
            if self.data.size != 1:
                raise InvalidArgumentError("backward() without grad needs a scalar output")
            seed = np.ones_like(self.data)
        else:
            seed = np.asarray(grad, dtype=self.data.dtype).reshape(self.shape)

        grads = {id(self): seed}
        for node in reversed(topological_order(self)):
            node_grad = grads.pop(id(node), None)
            if node_grad is None:
                continue
            if node._backward is None:
                node.grad = node_grad.copy() if node.grad is None else node.grad + node_grad
                continue
            parent_grads = node._backward(node_grad)
            for parent, parent_grad in zip(node._parents, parent_grads):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + parent_grad
                else:
                    grads[key] = parent_grad

    # ------------------------------------------------------------ arithmetic

    def _binary(self, other, forward, grad_self, grad_other, op: str) -> "Tensor":
        other = self._const(other)
        try:
            np.broadcast_shapes(self.shape, other.shape)
        except ValueError:
            raise InvalidArgumentError(f"{op}: shapes {self.shape} and {other.shape} do not broadcast")
        a, b = self.data, other.data
        out_data = forward(a, b)

        def backward(g):
            return (
                unbroadcast(grad_self(g, a, b, out_data), a.shape) if self.requires_grad else None,
                unbroadcast(grad_other(g, a, b, out_data), b.shape) if other.requires_grad else None,
            )
        return Tensor.make(out_data, (self, other), backward, op)

    def __add__(self, other) -> "Tensor":
        return self._binary(other, np.add, lambda g, a, b, o: g, lambda g, a, b, o: g, "add")

    def __sub__(self, other) -> "Tensor":
        return self._binary(other, np.subtract, lambda g, a, b, o: g, lambda g, a, b, o: -g, "sub")

    def __mul__(self, other) -> "Tensor":
        return self._binary(other, np.multiply, lambda g, a, b, o: g * b, lambda g, a, b, o: g * a, "mul")

    def __truediv__(self, other) -> "Tensor":
        return self._binary(
            other,
            np.divide,
            lambda g, a, b, o: g / b,
            lambda g, a, b, o: -g * a / (b * b),
            "div"
        )

    def __radd__(self, other) -> "Tensor":
        return self._const(other) + self

    def __rsub__(self, other) -> "Tensor":
        return self._const(other) - self

    def __rmul__(self, other) -> "Tensor":
        return self._const(other) * self

    def __rtruediv__(self, other) -> "Tensor":
        return self._const(other) / self

    def __neg__(self) -> "Tensor":
        return Tensor.make(-self.data, (self,), lambda g: (-g,), "neg")

    def __pow__(self, exponent: float) -> "Tensor":
        if isinstance(exponent, Tensor):
            raise InvalidArgumentError("only scalar exponents are supported")
        x = self.data
        out = x ** exponent
        return Tensor.make(out, (self,), lambda g: (g * exponent * x ** (exponent - 1),), "pow")

    def __matmul__(self, other) -> "Tensor":
        other = self._const(other)
        a, b = self.data, other.data
        if a.ndim < 2 or b.ndim < 2:
            raise InvalidArgumentError("matmul needs operands with at least 2 dimensions")
        if a.shape[-1] != b.shape[-2]:
            raise InvalidArgumentError(f"matmul: shapes {a.shape} and {b.shape} are not aligned")
        try:
            out = np.matmul(a, b)
        except ValueError as exc:
            raise InvalidArgumentError(f"matmul: {exc}")

        def backward(g):
            ga = unbroadcast(np.matmul(g, np.swapaxes(b, -1, -2)), a.shape) if self.requires_grad else None
            gb = unbroadcast(np.matmul(np.swapaxes(a, -1, -2), g), b.shape) if other.requires_grad else None
            return ga, gb
        return Tensor.make(out, (self, other), backward, "matmul")

    # -------------------------------------------------------------- unary ops

    def exp(self) -> "Tensor":
        out = np.exp(self.data)
        return Tensor.make(out, (self,), lambda g: (g * out,), "exp")

    def log(self) -> "Tensor":
        x = self.data
        return Tensor.make(np.log(x), (self,), lambda g: (g / x,), "log")

    def tanh(self) -> "Tensor":
        out = np.tanh(self.data)
        return Tensor.make(out, (self,), lambda g: (g * (1.0 - out * out),), "tanh")

    def elu(self) -> "Tensor":
        x = self.data
        negative = np.expm1(np.minimum(x, 0.0))
        out = np.where(x > 0, x, negative)
        return Tensor.make(out, (self,), lambda g: (g * np.where(x > 0, 1.0, negative + 1.0),), "elu")

    def softplus(self) -> "Tensor":
        x = self.data
        out = np.logaddexp(0.0, x).astype(x.dtype)
        sigmoid = 0.5 * (1.0 + np.tanh(0.5 * x))
        return Tensor.make(out, (self,), lambda g: (g * sigmoid,), "softplus")

    def clamp(self, low: float, high: float) -> "Tensor":
        x = self.data
        inside = (x >= low) & (x <= high)
        return Tensor.make(np.clip(x, low, high), (self,), lambda g: (g * inside,), "clamp")

    # ------------------------------------------------------------ reductions

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        shape = self.shape
        out = self.data.sum(axis=axis, keepdims=keepdims)

        def backward(g):
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            return (np.broadcast_to(g, shape).copy(),)
        return Tensor.make(np.asarray(out), (self,), backward, "sum")

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        count = self.data.size if axis is None else np.prod([self.shape[a] for a in np.atleast_1d(axis)])
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / float(count))

    def max(self, axis: int, keepdims: bool = False) -> "Tensor":
        """Reduce-max over one axis; the gradient goes to the first maximal entry"""
        x = self.data
        index = np.expand_dims(np.argmax(x, axis=axis), axis)
        out = np.take_along_axis(x, index, axis=axis)
        if not keepdims:
            out = np.squeeze(out, axis=axis)

        def backward(g):
            if not keepdims:
                g = np.expand_dims(g, axis)
            grad = np.zeros_like(x)
            np.put_along_axis(grad, index, g, axis=axis)
            return (grad,)
        return Tensor.make(out, (self,), backward, "max")

    # ------------------------------------------------------------------ shape

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        original = self.shape
        try:
            out = self.data.reshape(shape)
        except ValueError as exc:
            raise InvalidArgumentError(f"reshape: {exc}")
        return Tensor.make(out, (self,), lambda g: (g.reshape(original),), "reshape")

    def transpose(self, *axes) -> "Tensor":
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        if not axes:
            axes = tuple(reversed(range(self.ndim)))
        inverse = tuple(np.argsort(axes))
        return Tensor.make(
            np.transpose(self.data, axes), (self,), lambda g: (np.transpose(g, inverse),), "transpose"
        )

    def swapaxes(self, a: int, b: int) -> "Tensor":
        axes = list(range(self.ndim))
        axes[a], axes[b] = axes[b], axes[a]
        return self.transpose(tuple(axes))

    def __getitem__(self, index) -> "Tensor":
        if isinstance(index, Tensor):
            index = index.data
        shape, dtype = self.shape, self.data.dtype
        out = self.data[index]
        basic = _is_basic_index(index)

        def backward(g):
            grad = np.zeros(shape, dtype=dtype)
            if basic:
                grad[index] = g
            else:
                np.add.at(grad, index, g)
            return (grad,)
        return Tensor.make(np.array(out), (self,), backward, "getitem")


def topological_order(root: Tensor) -> List[Tensor]:
    """Nodes reachable from root through grad-requiring edges, parents first"""
    order: List[Tensor] = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order
