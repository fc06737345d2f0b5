"""Quantum Gaudin model, its master T-operator and the classical Calogero-Moser correspondence."""
from .gaudin import GaudinModel, TimeSpec

__version__ = "0.1.0"
__all__ = ["GaudinModel", "TimeSpec"]
