"""Deterministic, seeded simulator of the Byzantine-resilient congested
clique with cloud assistance."""

from .adversary import AdversarySpec
from .engine import Simulation, run_simulation
from .model import (
    ConfigError,
    InputArray,
    MetricsLedger,
    Model,
    SimConfig,
    SimReport,
    SimulationFault,
)

__all__ = [
    "AdversarySpec",
    "ConfigError",
    "InputArray",
    "MetricsLedger",
    "Model",
    "SimConfig",
    "SimReport",
    "Simulation",
    "SimulationFault",
    "run_simulation",
]

__version__ = "0.1.0"
