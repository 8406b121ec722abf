"""CLI interface for PointPatchRL"""

from .main import cli, main

__all__ = ["cli", "main"]
