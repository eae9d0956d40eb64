"""Brute-force statevector checks for schedules at small qubit counts.

This module exists to be obviously correct, not fast: it materializes the
codespace, applies projective measurements with their conditional Pauli
corrections, and reads the induced logical action off the transformed basis.
Comparisons are made on conjugated operators, never raw amplitudes, so global
phases cannot create false mismatches.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, EngineInvariantError
from .pauli import PauliOperator
from .rewiring import LogicalAction

_NORM_TOL = 1e-10
_OP_TOL = 1e-8


def apply_pauli(state: np.ndarray, op: PauliOperator) -> np.ndarray:
    """Apply i^phase X_x Z_z to a statevector. Qubit 0 is the most
    significant index bit, matching the leftmost string position."""
    n = op.n
    dim = 1 << n
    if state.shape[-1] != dim:
        raise DimensionError(f"state has dimension {state.shape[-1]}, operator needs {dim}")
    xmask = 0
    zmask = 0
    for q in range(n):
        if op.x[q]:
            xmask |= 1 << (n - 1 - q)
        if op.z[q]:
            zmask |= 1 << (n - 1 - q)
    idx = np.arange(dim)
    src = idx ^ xmask
    signs = np.where(np.bitwise_count(src & zmask) & 1, -1.0, 1.0)
    return (1j**op.phase) * signs * np.take(state, src, axis=-1)


def codespace_basis(code) -> np.ndarray:
    """Columns: an orthonormal logical-Z eigenbasis of the codespace.

    Column w is stabilized by every generator and by (-1)^{w_j} Z_L^(j);
    columns with w != 0 are built as X_L words applied to column 0, which
    makes the logical operators act as exact k-qubit Pauli matrices on the
    returned basis.
    """
    n, k = code.n, code.k
    if n > 15:
        raise ValueError(f"dense codespace limited to n <= 15, got {n}")
    dim = 1 << n
    projectors = list(code.generators) + list(code.logical_zs)
    zero = None
    for seed in range(dim):
        v = np.zeros(dim, dtype=complex)
        v[seed] = 1.0
        for g in projectors:
            v = (v + apply_pauli(v, g)) / 2
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            zero = v / norm
            break
    if zero is None:
        raise EngineInvariantError("all computational seeds project to zero: invalid code")

    columns = []
    for w in range(1 << k):
        v = zero
        for j in range(k):
            if (w >> (k - 1 - j)) & 1:
                v = apply_pauli(v, code.logical_xs[j])
        columns.append(v)
    basis = np.stack(columns, axis=1)

    gram = basis.conj().T @ basis
    if not np.allclose(gram, np.eye(1 << k), atol=_NORM_TOL):
        raise EngineInvariantError("codespace basis is not orthonormal")
    for g in code.generators:
        if not np.allclose(apply_pauli(basis.T, g).T, basis, atol=_NORM_TOL):
            raise EngineInvariantError(f"basis not stabilized by {g}")
    return basis


def _measure(state: np.ndarray, op: PauliOperator, outcome: int) -> np.ndarray:
    """Projective measurement, renormalized. The outcome probability must be
    exactly one half: every scheduled observable anticommutes with a current
    stabilizer."""
    moved = apply_pauli(state, op)
    p_plus = (1 + np.vdot(state, moved).real) / 2
    if abs(p_plus - 0.5) > _NORM_TOL:
        raise EngineInvariantError(f"measurement of {op} has probability {p_plus}, not 1/2")
    new = (state + outcome * moved) / np.sqrt(2)
    norm = np.linalg.norm(new)
    if abs(norm - 1.0) > _NORM_TOL:
        raise EngineInvariantError("zero-norm branch after projection")
    return new


def _schedule_steps(schedule):
    steps = []
    for step in schedule.steps:
        steps.append((step.measure, step.correct))
    return steps


def apply_schedule(states: np.ndarray, schedule, outcomes="fixed", rng=None) -> np.ndarray:
    """Run the schedule on each column: project, correct on -1, apply the
    trailing Pauli fix-up.

    ``outcomes`` is "fixed" (+1 everywhere), "sampled" (fair coin per step,
    shared by all columns), or an explicit sequence of +/-1.
    """
    single = states.ndim == 1
    columns = states.reshape(-1, 1) if single else states
    steps = _schedule_steps(schedule)
    if outcomes == "fixed":
        chosen = [1] * len(steps)
    elif outcomes == "sampled":
        rng = rng or np.random.default_rng()
        chosen = [1 if rng.integers(2) else -1 for _ in steps]
    else:
        chosen = list(outcomes)
        if len(chosen) != len(steps):
            raise DimensionError(f"{len(chosen)} outcomes for {len(steps)} steps")

    out = []
    for c in range(columns.shape[1]):
        v = columns[:, c]
        for (measured, correction), o in zip(steps, chosen):
            v = _measure(v, measured, o)
            if o < 0:
                v = apply_pauli(v, correction)
        fixup = getattr(schedule, "pauli_fixup", None)
        if fixup is not None and not fixup.is_identity():
            v = apply_pauli(v, fixup)
        out.append(v)
    result = np.stack(out, axis=1)
    return result[:, 0] if single else result


def _dense_logical(k: int, op: PauliOperator) -> np.ndarray:
    m = np.array([[1]], dtype=complex)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    for q in range(k):
        f = np.eye(2, dtype=complex)
        if op.x[q]:
            f = f @ x
        if op.z[q]:
            f = f @ z
        m = np.kron(m, f)
    return (1j**op.phase) * m


def oracle_action(code, schedule, check_closed_form: bool | None = None) -> LogicalAction:
    """Logical action inferred by conjugating logical operators through the
    schedule's effect on the codespace.

    When enabled (default for n <= 12), each measure-and-correct step is also
    compared against its closed-form unitary (I + g*g_m)/sqrt(2) on the
    current codespace.
    """
    n, k = code.n, code.k
    if check_closed_form is None:
        check_closed_form = n <= 12
    basis = codespace_basis(code)

    if check_closed_form:
        moved = basis.copy()
        for measured, correction in _schedule_steps(schedule):
            for c in range(moved.shape[1]):
                v = moved[:, c]
                channel = _measure(v, measured, +1)
                closed = (v + apply_pauli(apply_pauli(v, correction), measured)) / np.sqrt(2)
                if np.linalg.norm(channel - closed) > _OP_TOL:
                    raise EngineInvariantError(
                        f"closed-form unitary disagrees with measurement of {measured}"
                    )
                moved[:, c] = channel
        fixup = schedule.pauli_fixup
        if fixup is not None and not fixup.is_identity():
            moved = apply_pauli(moved.T, fixup).T
    else:
        moved = apply_schedule(basis, schedule, outcomes="fixed")

    v_matrix = basis.conj().T @ moved
    if not np.allclose(v_matrix @ v_matrix.conj().T, np.eye(1 << k), atol=_OP_TOL):
        raise EngineInvariantError("schedule does not act unitarily on the codespace")

    def image_of(physical: PauliOperator) -> PauliOperator:
        sigma = basis.conj().T @ apply_pauli(basis.T, physical).T
        moved_sigma = v_matrix @ sigma @ v_matrix.conj().T
        return _match_pauli(k, moved_sigma)

    return LogicalAction(
        tuple(image_of(op) for op in code.logical_xs),
        tuple(image_of(op) for op in code.logical_zs),
    )


def _match_pauli(k: int, matrix: np.ndarray) -> PauliOperator:
    """Identify a matrix as +/- one k-qubit Pauli word, within tolerance."""
    dim = 1 << k
    found = None
    for bits in range(1 << (2 * k)):
        x = [(bits >> (2 * q)) & 1 for q in range(k)]
        z = [(bits >> (2 * q + 1)) & 1 for q in range(k)]
        word = PauliOperator(k, int(np.count_nonzero(np.array(x) & np.array(z))), x, z)
        coef = np.trace(_dense_logical(k, word).conj().T @ matrix) / dim
        if abs(coef) < _OP_TOL:
            continue
        if found is not None:
            raise EngineInvariantError("conjugated logical is not a single Pauli word")
        if abs(coef.imag) > _OP_TOL or abs(abs(coef.real) - 1) > _OP_TOL:
            raise EngineInvariantError(f"conjugated logical has coefficient {coef}")
        sign = 0 if coef.real > 0 else 2
        found = PauliOperator(k, word.phase + sign, word.x, word.z)
    if found is None:
        raise EngineInvariantError("conjugated logical vanished")
    return found
