"""Gate-to-pulse compiler and exact simulator for a homogeneous Ising spin chain."""

from spinchain.chain import ChainConfig, Edge, Interior, energy, transition_frequency
from spinchain.dynamics import PulseSpec, QuantumState, apply_pulse, compare_states, two_level_evolution
from spinchain.symbolic import SymbolicPhase

__all__ = [
    "ChainConfig",
    "Edge",
    "Interior",
    "PulseSpec",
    "QuantumState",
    "SymbolicPhase",
    "apply_pulse",
    "compare_states",
    "energy",
    "transition_frequency",
    "two_level_evolution",
]

__version__ = "0.1.0"
