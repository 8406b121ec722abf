"""Auxiliary reconstruction objective"""

from .reconstruction import (
    PatchPair,
    squared_distances,
    nearest_neighbors,
    patch_losses,
    chamfer,
    color_loss,
    aux_loss,
)

__all__ = [
    "PatchPair",
    "squared_distances",
    "nearest_neighbors",
    "patch_losses",
    "chamfer",
    "color_loss",
    "aux_loss",
]
