"""Turn logical Clifford gates on stabilizer codes into schedules of Pauli
measurements with conditional corrections, then prove the schedules correct."""

from .pauli import (
    PauliOperator,
    commutes,
    hermitian_from_vectors,
    multiply,
    parse_pauli,
    weight,
)

__all__ = [
    "PauliOperator",
    "commutes",
    "hermitian_from_vectors",
    "multiply",
    "parse_pauli",
    "weight",
]
