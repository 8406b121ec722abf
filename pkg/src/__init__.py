"""PointPatchRL - point-patch transformers for reinforcement learning on point clouds"""

__version__ = "0.1.0"
