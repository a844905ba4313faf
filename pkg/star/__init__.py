"""
Simulador do gate STAR: um gate de Mølmer-Sørensen entre qubits transmon
vestidos por Rabi, mediado por um ressonador compartilhado e tons de sideband.

Carrega os nomes principais do pacote.
"""

from .config import StarConfig, chip_config, load_config, loads_config
from .device import DeviceParams, GateSchedule, RabiPulse, SidebandConfig
from .errors import (
    ConfigError,
    DomainError,
    FitError,
    HygieneError,
    IntegrationError,
    LayoutError,
    ResourceError,
    StarError,
)
from .gate import IdealGate, ideal_gate_unitary, run_gate, unwind
from .lindblad import DissipationSettings, SolverSettings, evolve
from .operators import DensityMatrix, HilbertLayout, Ket, Operator

__version__ = "0.1.0"

__all__ = [
    "chip_config",
    "ConfigError",
    "DensityMatrix",
    "DeviceParams",
    "DissipationSettings",
    "DomainError",
    "evolve",
    "FitError",
    "GateSchedule",
    "HilbertLayout",
    "HygieneError",
    "IdealGate",
    "ideal_gate_unitary",
    "IntegrationError",
    "Ket",
    "LayoutError",
    "load_config",
    "loads_config",
    "Operator",

    "RabiPulse",
    "ResourceError",
    "run_gate",
    "SidebandConfig",
    "SolverSettings",
    "StarConfig",
    "StarError",
    "unwind",
]
