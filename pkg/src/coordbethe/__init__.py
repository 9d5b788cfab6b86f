"""Coordinate Bethe ansatz for XXX/XXZ spin chains, checked against exact diagonalization."""

from . import ansatz, basis, bethe, hamiltonian, oracle, weyl, xxz

__all__ = ["ansatz", "basis", "bethe", "hamiltonian", "oracle", "weyl", "xxz"]
__version__ = "0.1.0"
