"""Dense linear algebra over GF(2): row reduction, rank, affine solving.

Matrices are 2-D numpy uint8 arrays with entries in {0, 1}. Everything here
is small (at most ~(n+2k) x 2n with n <= 31), so plain Gaussian elimination
is used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError


def as_gf2(a) -> np.ndarray:
    return np.atleast_2d(np.asarray(a, dtype=np.uint8) & 1)


def rref(m) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the list of pivot columns.

    Deterministic: pivots are chosen left-to-right, first available row.
    """
    work = as_gf2(m).copy()
    rows, cols = work.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        hits = np.nonzero(work[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
        other = np.nonzero(work[:, c])[0]
        for o in other:
            if o != r:
                work[o] ^= work[r]
        pivots.append(c)
        r += 1
    return work, pivots


def rank(m) -> int:
    """Row rank over GF(2)."""
    return len(rref(m)[1])


def nullspace(m) -> np.ndarray:
    """Basis of the right nullspace, one vector per row.

    Basis vectors are indexed by the free columns in ascending order; each
    has a 1 in its own free column, so they are linearly independent.
    """
    work, pivots = rref(m)
    cols = work.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            basis[i, p] = work[r, f]
    return basis


def in_rowspace(vec, basis_rref, pivots) -> bool:
    """Whether vec lies in the row space described by an rref and its pivots."""
    residual = np.asarray(vec, dtype=np.uint8) & 1
    residual = residual.copy()
    for r, p in enumerate(pivots):
        if residual[p]:
            residual ^= basis_rref[r]
    return not residual.any()


@dataclass(frozen=True)
class AffineSolutionSpace:
    """All solutions of a linear system: particular + span(nullspace_basis).

    Members are enumerated deterministically in lexicographic order over the
    nullspace coefficient vector (coefficient of basis vector 0 is the most
    significant bit of the member index).
    """

    particular: np.ndarray
    nullspace_basis: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), np.uint8))

    @property
    def dimension(self) -> int:
        return int(self.nullspace_basis.shape[0])

    @property
    def size(self) -> int:
        return 1 << self.dimension

    def member(self, index: int) -> np.ndarray:
        if not 0 <= index < self.size:
            raise IndexError(f"member index {index} outside [0, {self.size})")
        v = self.particular.copy()
        r = self.dimension
        for j in range(r):
            if (index >> (r - 1 - j)) & 1:
                v ^= self.nullspace_basis[j]
        return v

    def __iter__(self):
        for i in range(self.size):
            yield self.member(i)


def solve_affine(m, rhs) -> AffineSolutionSpace | None:
    """Solve M v = rhs over GF(2).

    Returns None when rhs is outside the column space; otherwise a particular
    solution (free variables set to 0) together with the full nullspace basis.
    """
    m = as_gf2(m)
    rhs = np.asarray(rhs, dtype=np.uint8) & 1
    rows, cols = m.shape
    if rhs.shape != (rows,):
        raise DimensionError(f"rhs length {rhs.shape} does not match {rows} rows")
    augmented = np.concatenate([m, rhs.reshape(-1, 1)], axis=1)
    work, pivots = rref(augmented)
    if cols in pivots:
        return None
    particular = np.zeros(cols, dtype=np.uint8)
    for r, p in enumerate(pivots):
        particular[p] = work[r, cols]
    return AffineSolutionSpace(particular, nullspace(m))


def build_lambda(generator_rows, alpha_row, logical_rows) -> np.ndarray:
    """Stack the constraint matrix: stabilizer rows, optional alpha row, then
    alternating X/Z logical rows.

    Every row is an (x | z) vector of length 2n. Multiplying the result by
    the column (beta_Z ; beta_X) yields, row-wise, the commutator of the row
    operator with the candidate operator X_{beta_X} Z_{beta_Z}: the X block
    of each row pairs with beta_Z and the Z block with beta_X.
    """
    rows = [np.asarray(r, dtype=np.uint8) & 1 for r in generator_rows]
    if alpha_row is not None:
        rows.append(np.asarray(alpha_row, dtype=np.uint8) & 1)
    rows.extend(np.asarray(r, dtype=np.uint8) & 1 for r in logical_rows)
    widths = {r.shape for r in rows}
    if len(widths) > 1:
        raise DimensionError(f"inconsistent row widths: {sorted(widths)}")
    return np.stack(rows) if rows else np.zeros((0, 0), dtype=np.uint8)


def pairing_matrix(rows) -> np.ndarray:
    """Swap the x and z halves of each (x | z) row.

    The dot product of a swapped row with another row is the symplectic
    commutator of the two underlying operators.
    """
    m = as_gf2(rows)
    n = m.shape[1] // 2
    return np.concatenate([m[:, n:], m[:, :n]], axis=1)
