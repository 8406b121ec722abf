"""Parameter containers and the layers the networks are built from"""

from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import InvalidArgumentError
from .tensor import Tensor
from . import ops


class Parameter(Tensor):
    """Tensor that always requires gradients and is found by Module traversal"""

    def __init__(self, data, dtype=None):
        super().__init__(np.array(data, dtype=dtype), requires_grad=True)


class Module:
    """
    Base class for anything owning parameters.

    Parameters are discovered from instance attributes in assignment order:
    Parameter values, nested Modules, and lists of Modules.
    """

    def forward(self, *args, **kwargs):
        raise NotImplementedError

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Parameter]]:
        for name, value in vars(self).items():
            full = f"{prefix}{name}"
            if isinstance(value, Parameter):
                yield full, value
            elif isinstance(value, Module):
                yield from value.named_parameters(full + ".")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{full}.{i}.")
                    elif isinstance(item, Parameter):
                        yield f"{full}.{i}", item

    def parameters(self) -> List[Parameter]:
        return [p for _, p in self.named_parameters()]

    def zero_grad(self):
        for p in self.parameters():
            p.grad = None

    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def state_dict(self) -> Dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: Dict[str, np.ndarray], strict: bool = True):
        """
        Copy arrays into the matching parameters in place.

        Raises:
            InvalidArgumentError: On missing/unexpected keys (strict) or shape mismatch
        """
        own = dict(self.named_parameters())
        if strict:
            missing = sorted(set(own) - set(state))
            unexpected = sorted(set(state) - set(own))
            if missing or unexpected:
                raise InvalidArgumentError(f"state dict mismatch: missing={missing} unexpected={unexpected}")
        for name, array in state.items():
            if name not in own:
                continue
            param = own[name]
            array = np.asarray(array)
            if array.shape != param.shape:
                raise InvalidArgumentError(f"shape mismatch for {name}: {array.shape} vs {param.shape}")
            param.data = array.astype(param.dtype, copy=True)

    def copy_from(self, other: "Module"):
        self.load_state_dict(other.state_dict())


def _uniform(rng: np.random.Generator, bound: float, shape, dtype) -> np.ndarray:
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class Linear(Module):
    """y = x W + b with W stored as (in, out)"""

    def __init__(
        self,
        in_features: int,
        out_features: int,
        rng: np.random.Generator,
        bias: bool = True,
        dtype=np.float64
    ):
        if in_features < 1 or out_features < 1:
            raise InvalidArgumentError(f"Linear needs positive sizes, got {in_features}x{out_features}")
        bound = 1.0 / np.sqrt(in_features)
        self.in_features = in_features
        self.out_features = out_features
        self.weight = Parameter(_uniform(rng, bound, (in_features, out_features), dtype))
        self.bias = Parameter(_uniform(rng, bound, (out_features,), dtype)) if bias else None

    def forward(self, x: Tensor) -> Tensor:
        return ops.linear(x, self.weight, self.bias)


class LayerNorm(Module):
    def __init__(self, width: int, eps: float = 1e-5, dtype=np.float64):
        self.eps = eps
        self.gamma = Parameter(np.ones(width, dtype=dtype))
        self.beta = Parameter(np.zeros(width, dtype=dtype))

    def forward(self, x: Tensor) -> Tensor:
        return ops.layer_norm(x, self.gamma, self.beta, self.eps)


class MLP(Module):
    """Stack of Linear layers with ELU between them (none after the last)"""

    def __init__(
        self,
        sizes: Sequence[int],
        rng: np.random.Generator,
        dtype=np.float64,
        final_activation: bool = False
    ):
        if len(sizes) < 2:
            raise InvalidArgumentError(f"MLP needs at least input and output sizes, got {list(sizes)}")
        self.layers = [Linear(a, b, rng, dtype=dtype) for a, b in zip(sizes[:-1], sizes[1:])]
        self.final_activation = final_activation

    def forward(self, x: Tensor) -> Tensor:
        last = len(self.layers) - 1
        for i, layer in enumerate(self.layers):
            x = layer(x)
            if i < last or self.final_activation:
                x = x.elu()
        return x


def parameters_of(*modules: Optional[Module]) -> List[Parameter]:
    """Concatenated parameter lists, skipping None, without duplicates"""
    seen = set()
    result: List[Parameter] = []
    for module in modules:
        if module is None:
            continue
        params = module.parameters() if isinstance(module, Module) else [module]
        for p in params:
            if id(p) not in seen:
                seen.add(id(p))
                result.append(p)
    return result
