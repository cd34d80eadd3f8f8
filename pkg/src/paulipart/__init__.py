"""Partition Pauli Hamiltonians into commuting families and compile their measurements."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .pauli import (
    Hamiltonian,
    HamiltonianTerm,
    PauliString,
    commutes_gc,
    commutes_qwc,
    multiply,
    parse_hamiltonian,
    parse_pauli,
)

__all__ = [
    "KERNEL_BACKEND",
    "Hamiltonian",
    "HamiltonianTerm",
    "PauliString",
    "commutes_gc",
    "commutes_qwc",
    "multiply",
    "parse_hamiltonian",
    "parse_pauli",
]


def corpus_path(name: str):
    """Path of a bundled corpus file."""
    from importlib.resources import files

    return files(__name__) / "corpus" / name
