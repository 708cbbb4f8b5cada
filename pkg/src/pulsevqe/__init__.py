"""Pulse-level variational quantum eigensolver laboratory.

Builds hydrogen-cluster qubit Hamiltonians from first principles, models
cross-resonance pulse dynamics through an effective two-qubit Hamiltonian,
and runs CNOT-based and pulse-based VQE on a statevector simulator.
"""

from . import chem, qubitop, pulsemodel, simulator, vqe, cli

__all__ = ["chem", "qubitop", "pulsemodel", "simulator", "vqe", "cli"]
__version__ = "0.1.0"
