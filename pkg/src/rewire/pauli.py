"""n-qubit Pauli operators in binary symplectic form with exact phase tracking.

An operator is stored as i^phase * X_x * Z_z where ``phase`` is an exponent of
i (mod 4) and ``x``, ``z`` are length-n bit vectors marking X- and Z-support.
A qubit with both bits set carries the letter Y under the convention
Y = i*X*Z, so the string "+Y" is stored as phase 1, x=(1,), z=(1,).

String grammar: optional sign prefix ("+", "-", "+i", "-i") followed by n
characters from {I, X, Y, Z}; the leftmost character is qubit 0. The sign is
mandatory on rendered output.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, PauliParseError

_SIGN_TO_PHASE = {"+": 0, "+i": 1, "-": 2, "-i": 3}
_PHASE_TO_SIGN = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


class PauliOperator:
    """Immutable signed Pauli operator on ``n`` qubits.

    Treat instances as values: the bit vectors are never mutated after
    construction, so operators are safe to share between threads.
    """

    __slots__ = ("n", "phase", "x", "z")

    def __init__(self, n: int, phase: int, x, z):
        x = np.asarray(x, dtype=np.uint8) & 1
        z = np.asarray(z, dtype=np.uint8) & 1
        if x.shape != (n,) or z.shape != (n,):
            raise DimensionError(
                f"support vectors must have length {n}, got {x.shape} and {z.shape}"
            )
        self.n = n
        self.phase = int(phase) % 4
        self.x = x
        self.z = z

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, 0, np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    def y_count(self) -> int:
        return int(np.count_nonzero(self.x & self.z))

    def sign_exponent(self) -> int:
        """Exponent of i on the rendered letter string (0:+, 1:+i, 2:-, 3:-i)."""
        return (self.phase - self.y_count()) % 4

    def is_hermitian(self) -> bool:
        """True when the rendered sign is +/- (the operator squares to +I)."""
        return self.sign_exponent() % 2 == 0

    def negated(self) -> "PauliOperator":
        return PauliOperator(self.n, self.phase + 2, self.x, self.z)

    def is_identity(self) -> bool:
        return self.phase == 0 and not self.x.any() and not self.z.any()

    def symplectic_row(self) -> np.ndarray:
        """The (x | z) row of length 2n, phase discarded."""
        return np.concatenate([self.x, self.z])

    def key(self) -> tuple:
        return (self.n, self.phase, self.x.tobytes(), self.z.tobytes())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __str__(self) -> str:
        letters = "".join(
            _BITS_LETTER[(int(a), int(b))] for a, b in zip(self.x, self.z)
        )
        return _PHASE_TO_SIGN[self.sign_exponent()] + letters

    def __repr__(self) -> str:
        return f"PauliOperator({str(self)!r})"


def parse_pauli(text: str) -> PauliOperator:
    """Parse a signed Pauli string such as "+XZZXI" or "-iY".

    Y at position q sets both x[q] and z[q] and contributes one factor of i
    to the phase.
    """
    if not isinstance(text, str) or not text:
        raise PauliParseError("empty Pauli string")
    sign = "+"
    body = text
    for prefix in ("+i", "-i", "+", "-"):
        if text.startswith(prefix):
            sign, body = prefix, text[len(prefix):]
            break
    if not body:
        raise PauliParseError(f"no Pauli letters after sign in {text!r}")
    n = len(body)
    x = np.zeros(n, dtype=np.uint8)
    z = np.zeros(n, dtype=np.uint8)
    for q, ch in enumerate(body):
        bits = _LETTER_BITS.get(ch)
        if bits is None:
            raise PauliParseError(
                f"invalid character {ch!r} at position {q} in {text!r}"
            )
        x[q], z[q] = bits
    y_count = int(np.count_nonzero(x & z))
    return PauliOperator(n, _SIGN_TO_PHASE[sign] + y_count, x, z)


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Exact product p*q, including the accumulated power of i.

    Reordering the Z-part of p past the X-part of q contributes
    (-1)^(p.z . q.x).
    """
    if p.n != q.n:
        raise DimensionError(f"operator sizes differ: {p.n} vs {q.n}")
    reorder = int(np.count_nonzero(p.z & q.x)) % 2
    return PauliOperator(p.n, p.phase + q.phase + 2 * reorder, p.x ^ q.x, p.z ^ q.z)


def commutes(p: PauliOperator, q: PauliOperator) -> int:
    """Symplectic commutator c(p, q): 0 when p and q commute, 1 otherwise."""
    if p.n != q.n:
        raise DimensionError(f"operator sizes differ: {p.n} vs {q.n}")
    return int(np.count_nonzero(p.x & q.z) + np.count_nonzero(p.z & q.x)) % 2


def hermitian_from_vectors(alpha_x, alpha_z) -> PauliOperator:
    """Build the Hermitian operator i^(alpha_x . alpha_z) X_{alpha_x} Z_{alpha_z}.

    The exponent is the GF(2) inner product, which makes the result square
    to +I.
    """
    alpha_x = np.asarray(alpha_x, dtype=np.uint8) & 1
    alpha_z = np.asarray(alpha_z, dtype=np.uint8) & 1
    if alpha_x.shape != alpha_z.shape:
        raise DimensionError(
            f"support vectors differ in length: {alpha_x.shape} vs {alpha_z.shape}"
        )
    inner = int(np.count_nonzero(alpha_x & alpha_z)) % 2
    return PauliOperator(len(alpha_x), inner, alpha_x, alpha_z)


def weight(p: PauliOperator) -> int:
    """Number of qubits on which the operator acts non-trivially."""
    return int(np.count_nonzero(p.x | p.z))


def from_symplectic_row(row, phase: int = 0) -> PauliOperator:
    """Inverse of symplectic_row: build an operator from an (x | z) row."""
    row = np.asarray(row, dtype=np.uint8) & 1
    if row.size % 2:
        raise DimensionError(f"symplectic row length {row.size} is odd")
    n = row.size // 2
    return PauliOperator(n, phase, row[:n], row[n:])


def hermitian_from_row(row) -> PauliOperator:
    """Build the Hermitian representative of an (x | z) row."""
    row = np.asarray(row, dtype=np.uint8) & 1
    n = row.size // 2
    return hermitian_from_vectors(row[:n], row[n:])
