"""Policies: the SAC learner plus scripted and random baselines"""

from .base import BaseAgent
from .networks import Actor, QNetwork, TwinCritic, tanh_log_det
from .sac import SACAgent, Observation
from .scripted import ScriptedReachPolicy, RandomPolicy

__all__ = [
    "BaseAgent",
    "Actor",
    "QNetwork",
    "TwinCritic",
    "tanh_log_det",
    "SACAgent",
    "Observation",
    "ScriptedReachPolicy",
    "RandomPolicy",
]
