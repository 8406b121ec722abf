"""Reverse-mode autodiff on numpy"""

from .tensor import Tensor, no_grad, is_grad_enabled, topological_order, unbroadcast
from .ops import (
    as_tensor,
    matmul,
    linear,
    concat,
    stack,
    minimum,
    where,
    gather,
    softmax,
    masked_softmax,
    layer_norm,
    attention,
    mse,
)
from .nn import Parameter, Module, Linear, LayerNorm, MLP, parameters_of
from .optim import Adam, AdamState, adam_step
from .gradcheck import gradient_check, numerical_gradient

__all__ = [
    "Tensor",
    "no_grad",
    "is_grad_enabled",
    "topological_order",
    "unbroadcast",
    "as_tensor",
    "matmul",
    "linear",
    "concat",
    "stack",
    "minimum",
    "where",
    "gather",
    "softmax",
    "masked_softmax",
    "layer_norm",
    "attention",
    "mse",
    "Parameter",
    "Module",
    "Linear",
    "LayerNorm",
    "MLP",
    "parameters_of",
    "Adam",
    "AdamState",
    "adam_step",
    "gradient_check",
    "numerical_gradient",
]
