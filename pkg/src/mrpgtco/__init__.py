"""Wireless sensor network lifetime simulator with game-theoretic, coverage-optimised clustering."""

from .config import ConfigError, NetworkConfig, Protocol, load_config, parse_config, scenario
from .engine import SimulationResult, run_simulation

__all__ = [
    "ConfigError",
    "NetworkConfig",
    "Protocol",
    "SimulationResult",
    "load_config",
    "parse_config",
    "run_simulation",
    "scenario",
]
__version__ = "0.1.0"
