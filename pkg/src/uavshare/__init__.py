"""Reliability-aware spectrum sharing between high- and low-capacity UAVs."""

from .capacity import ConnectivityMode
from .scenario import ScenarioConfig, generate

__all__ = ["ConnectivityMode", "ScenarioConfig", "generate"]
__version__ = "0.1.0"
