"""Synthesis and exact simulation of elementary code rewirings.

An elementary rewiring replaces one stabilizer generator g_m through the
three-step measure-and-correct cycle g_m -> g -> g' -> g_m, returning the
code to itself while acting on the logical qubits as a Clifford. Everything
here tracks signs exactly; measurement outcomes are pinned to +1 on the
deterministic path and the all-branches simulator proves that choice loses
nothing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import gf2
from .errors import DimensionError, EngineInvariantError, SynthesisError
from .pauli import PauliOperator, commutes, hermitian_from_vectors, multiply

Targets = tuple[tuple[int, int], ...]


def normalize_targets(targets, k: int) -> Targets:
    """Validate one (a_j, b_j) commutation-target pair per logical qubit."""
    targets = tuple((int(a), int(b)) for a, b in targets)
    if len(targets) != k:
        raise DimensionError(f"need {k} target pairs, got {len(targets)}")
    if any(a not in (0, 1) or b not in (0, 1) for a, b in targets):
        raise ValueError(f"targets must be bits: {targets}")
    return targets


@dataclass(frozen=True)
class RewiringPair:
    """Observables (g, g') replacing generator number m (1-based)."""

    m: int
    g: PauliOperator
    g_prime: PauliOperator
    targets: Targets

    def negated_second(self) -> "RewiringPair":
        return RewiringPair(self.m, self.g, self.g_prime.negated(), self.targets)


@dataclass
class TableauState:
    """Signed stabilizer generators and logical representatives."""

    generators: list[PauliOperator]
    logical_xs: list[PauliOperator]
    logical_zs: list[PauliOperator]

    @classmethod
    def from_code(cls, code) -> "TableauState":
        return cls(
            generators=list(code.generators),
            logical_xs=list(code.logical_xs),
            logical_zs=list(code.logical_zs),
        )

    @property
    def k(self) -> int:
        return len(self.logical_xs)

    def copy(self) -> "TableauState":
        return TableauState(list(self.generators), list(self.logical_xs), list(self.logical_zs))

    def logicals_interleaved(self) -> list[PauliOperator]:
        out = []
        for lx, lz in zip(self.logical_xs, self.logical_zs):
            out.extend([lx, lz])
        return out


# ---------------------------------------------------------------------------
# logical actions


def _xz_word(k: int, x_bits, z_bits, x_ops, z_ops, phase: int = 0) -> PauliOperator:
    acc = PauliOperator(k, phase, np.zeros(k, np.uint8), np.zeros(k, np.uint8))
    for j in range(k):
        if x_bits[j]:
            acc = multiply(acc, x_ops[j])
    for j in range(k):
        if z_bits[j]:
            acc = multiply(acc, z_ops[j])
    return acc


@dataclass(frozen=True)
class LogicalAction:
    """How a schedule permutes the logical Pauli frame.

    Images are k-qubit Pauli operators: x_images[j] is the image of the j-th
    logical X, z_images[j] of the j-th logical Z. Every image renders with a
    plain +/- sign; +/-i phases never survive extraction.
    """

    x_images: tuple[PauliOperator, ...]
    z_images: tuple[PauliOperator, ...]

    @property
    def k(self) -> int:
        return len(self.x_images)

    @classmethod
    def identity(cls, k: int) -> "LogicalAction":
        xs = tuple(_single(k, q, "X") for q in range(k))
        zs = tuple(_single(k, q, "Z") for q in range(k))
        return cls(xs, zs)

    def image(self, op: PauliOperator) -> PauliOperator:
        """Image of an arbitrary k-qubit Pauli word under the action."""
        if op.n != self.k:
            raise DimensionError(f"operand acts on {op.n} qubits, action on {self.k}")
        return _xz_word(self.k, op.x, op.z, self.x_images, self.z_images, op.phase)

    def then(self, later: "LogicalAction") -> "LogicalAction":
        """The action of applying self first and ``later`` afterwards."""
        return LogicalAction(
            tuple(later.image(op) for op in self.x_images),
            tuple(later.image(op) for op in self.z_images),
        )

    def symplectic(self) -> np.ndarray:
        """2k x 2k matrix over GF(2); column order X_1, Z_1, ..., X_k, Z_k."""
        k = self.k
        m = np.zeros((2 * k, 2 * k), dtype=np.uint8)
        for c, op in enumerate(self._columns()):
            for j in range(k):
                m[2 * j, c] = op.x[j]
                m[2 * j + 1, c] = op.z[j]
        return m

    def signs(self) -> np.ndarray:
        """Sign bit per column: 0 for +, 1 for -."""
        return np.array([op.sign_exponent() // 2 for op in self._columns()], dtype=np.uint8)

    def _columns(self):
        for lx, lz in zip(self.x_images, self.z_images):
            yield lx
            yield lz

    def is_symplectic(self) -> bool:
        a = self.symplectic()
        j = _pairing_form(self.k)
        return np.array_equal((a.T @ j @ a) % 2, j) and all(
            op.is_hermitian() for op in self._columns()
        )

    def to_json(self) -> dict:
        return {
            "symplectic": self.symplectic().tolist(),
            "signs": self.signs().tolist(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "LogicalAction":
        m = np.asarray(doc["symplectic"], dtype=np.uint8)
        signs = list(doc["signs"])
        k = m.shape[0] // 2
        cols = []
        for c in range(2 * k):
            x = m[0::2, c]
            z = m[1::2, c]
            y_count = int(np.count_nonzero(x & z))
            cols.append(PauliOperator(k, y_count + 2 * int(signs[c]), x, z))
        return cls(tuple(cols[0::2]), tuple(cols[1::2]))


def _single(k: int, q: int, letter: str, negative: bool = False) -> PauliOperator:
    x = np.zeros(k, np.uint8)
    z = np.zeros(k, np.uint8)
    phase = 2 if negative else 0
    if letter in ("X", "Y"):
        x[q] = 1
    if letter in ("Z", "Y"):
        z[q] = 1
    if letter == "Y":
        phase += 1
    return PauliOperator(k, phase, x, z)


def _pairing_form(k: int) -> np.ndarray:
    j = np.zeros((2 * k, 2 * k), dtype=np.uint8)
    for q in range(k):
        j[2 * q, 2 * q + 1] = 1
        j[2 * q + 1, 2 * q] = 1
    return j


# Exact square-root conventions, pinned once for the whole package:
#   sqrt(Z): X -> +Y, Z -> Z        (t*sqrt(t) flips the Y)
#   sqrt(X): X -> X,  Z -> +Y
#   sqrt(Y): X -> -Z, Z -> +X
_SQRT_TABLE = {
    ("Z", "sqrt"): ("+Y", "+Z"),
    ("Z", "t_sqrt"): ("-Y", "+Z"),
    ("X", "sqrt"): ("+X", "+Y"),
    ("X", "t_sqrt"): ("+X", "-Y"),
    ("Y", "sqrt"): ("-Z", "+X"),
    ("Y", "t_sqrt"): ("+Z", "-X"),
}


def sqrt_action(k: int, qubit: int, axis: str, variant: str = "sqrt") -> LogicalAction:
    """Exact sqrt(t) (or t*sqrt(t)) acting on one logical qubit of k."""
    try:
        ximg, zimg = _SQRT_TABLE[(axis, variant)]
    except KeyError:
        raise ValueError(f"unknown sqrt action {(axis, variant)}") from None
    identity = LogicalAction.identity(k)
    xs = list(identity.x_images)
    zs = list(identity.z_images)
    xs[qubit] = _single(k, qubit, ximg[1], ximg[0] == "-")
    zs[qubit] = _single(k, qubit, zimg[1], zimg[0] == "-")
    return LogicalAction(tuple(xs), tuple(zs))


def classify_t_type(action: LogicalAction) -> tuple[str, str, int]:
    """Classify a single-qubit-supported action as (axis, variant, qubit).

    Returns ("identity", "", -1) for the identity. Raises SynthesisError when
    the action is not of sqrt(t) type.
    """
    identity = LogicalAction.identity(action.k)
    touched = [
        q
        for q in range(action.k)
        if action.x_images[q] != identity.x_images[q]
        or action.z_images[q] != identity.z_images[q]
    ]
    if not touched:
        return ("identity", "", -1)
    if len(touched) != 1:
        raise SynthesisError(f"action touches qubits {touched}, not of sqrt-type")
    q = touched[0]
    for (axis, variant), (ximg, zimg) in _SQRT_TABLE.items():
        if (
            action.x_images[q] == _single(action.k, q, ximg[1], ximg[0] == "-")
            and action.z_images[q] == _single(action.k, q, zimg[1], zimg[0] == "-")
        ):
            return (axis, variant, q)
    raise SynthesisError("action on one qubit is not any sqrt(t) or t*sqrt(t)")


# ---------------------------------------------------------------------------
# observable synthesis


def solution_to_observable(vec) -> PauliOperator:
    """Interpret a solver column (alpha_Z ; alpha_X) as the Hermitian observable."""
    vec = np.asarray(vec, dtype=np.uint8)
    n = vec.size // 2
    return hermitian_from_vectors(vec[n:], vec[:n])


def find_first_observable(code, m: int) -> gf2.AffineSolutionSpace:
    """All g commuting with every generator except number m and all logicals.

    ``m`` is 1-based; the right-hand side 1 sits in row m of the constraint
    system. Valid codes always admit solutions.
    """
    num = code.num_generators
    if not 1 <= m <= num:
        raise ValueError(f"generator index m={m} outside 1..{num}")
    lam = gf2.build_lambda(code.generator_rows(), None, code.logical_rows())
    rhs = np.zeros(num + 2 * code.k, dtype=np.uint8)
    rhs[m - 1] = 1
    space = gf2.solve_affine(lam, rhs)
    if space is None:
        raise EngineInvariantError(
            f"first-observable system unsolvable for {code.name} at m={m}; "
            "the code cannot be valid"
        )
    return space


def find_second_observable(code, m: int, g: PauliOperator, targets) -> gf2.AffineSolutionSpace:
    """All g' anticommuting with g and generator m, hitting the commutation targets."""
    targets = normalize_targets(targets, code.k)
    violations = _first_condition_violations(code, m, g)
    if violations:
        raise SynthesisError("g does not solve the first-step system: " + "; ".join(violations))
    num = code.num_generators
    lam = gf2.build_lambda(code.generator_rows(), g.symplectic_row(), code.logical_rows())
    rhs = np.zeros(num + 1 + 2 * code.k, dtype=np.uint8)
    rhs[m - 1] = 1
    rhs[num] = 1
    for j, (a, b) in enumerate(targets):
        rhs[num + 1 + 2 * j] = a
        rhs[num + 1 + 2 * j + 1] = b
    space = gf2.solve_affine(lam, rhs)
    if space is None:
        raise EngineInvariantError(
            f"second-observable system unsolvable for {code.name} at m={m}"
        )
    return space


def _first_condition_violations(code, m: int, g: PauliOperator) -> list[str]:
    out = []
    for j, gen in enumerate(code.generators, start=1):
        expected = 1 if j == m else 0
        if commutes(g, gen) != expected:
            out.append(f"c(g, generator {j}) = {1 - expected}, expected {expected}")
    for j, op in enumerate(code.logicals_interleaved()):
        if commutes(g, op):
            out.append(f"g anticommutes with logical operator {j}")
    return out


def check_pair(code, pair: RewiringPair) -> list[str]:
    """All violated conditions of the rewiring-pair definition (empty = valid)."""
    violations = []
    if not pair.g.is_hermitian():
        violations.append("g is not Hermitian")
    if not pair.g_prime.is_hermitian():
        violations.append("g' is not Hermitian")
    violations.extend(_first_condition_violations(code, pair.m, pair.g))
    for j, gen in enumerate(code.generators, start=1):
        expected = 1 if j == pair.m else 0
        if commutes(pair.g_prime, gen) != expected:
            violations.append(f"c(g', generator {j}) = {1 - expected}, expected {expected}")
    if commutes(pair.g, pair.g_prime) != 1:
        violations.append("g and g' commute; they must anticommute")
    targets = normalize_targets(pair.targets, code.k)
    for j, (a, b) in enumerate(targets):
        if commutes(pair.g_prime, code.logical_xs[j]) != a:
            violations.append(f"c(g', X_L[{j}]) != {a}")
        if commutes(pair.g_prime, code.logical_zs[j]) != b:
            violations.append(f"c(g', Z_L[{j}]) != {b}")
    return violations


def synthesize_pair(code, m: int, targets, alpha_index: int = 0, beta_index: int = 0) -> RewiringPair:
    """Deterministically pick a rewiring pair from the two solution spaces."""
    first = find_first_observable(code, m)
    g = solution_to_observable(first.member(alpha_index))
    second = find_second_observable(code, m, g, targets)
    g_prime = solution_to_observable(second.member(beta_index))
    pair = RewiringPair(m, g, g_prime, normalize_targets(targets, code.k))
    violations = check_pair(code, pair)
    if violations:
        raise EngineInvariantError("synthesized pair invalid: " + "; ".join(violations))
    return pair


# ---------------------------------------------------------------------------
# measurement updates


def measurement_step(
    state: TableauState,
    measured: PauliOperator,
    outcome: int = +1,
    apply_correction: bool = True,
) -> TableauState:
    """One projective measurement with (optionally) its conditional correction.

    The correction is the unique current generator anticommuting with the
    measured observable, applied as a physical Pauli when the outcome is -1.
    """
    if not measured.is_hermitian():
        raise SynthesisError(f"measured observable {measured} is not Hermitian")
    hits = [i for i, gen in enumerate(state.generators) if commutes(measured, gen)]
    if len(hits) != 1:
        raise EngineInvariantError(
            f"measured observable anticommutes with {len(hits)} generators, need exactly 1"
        )
    m_idx = hits[0]
    correction = state.generators[m_idx]

    new = state.copy()
    new.generators[m_idx] = measured if outcome > 0 else measured.negated()
    for ops in (new.logical_xs, new.logical_zs):
        for i, h in enumerate(ops):
            if commutes(measured, h):
                ops[i] = multiply(correction, h)
    if outcome < 0 and apply_correction:
        # conjugation by the correction Pauli: sign flip on anticommuting ops
        for i, gen in enumerate(new.generators):
            if commutes(correction, gen):
                new.generators[i] = gen.negated()
        for ops in (new.logical_xs, new.logical_zs):
            for i, h in enumerate(ops):
                if commutes(correction, h):
                    ops[i] = h.negated()
    return new


def lemma1_update(
    state: TableauState, measured: PauliOperator, correction: PauliOperator
) -> TableauState:
    """Deterministic (+1 outcome) measurement update with a designated correction.

    The designated correction must be a current generator anticommuting with
    the measured observable, and no other generator may anticommute.
    """
    try:
        m_idx = state.generators.index(correction)
    except ValueError:
        raise SynthesisError(f"correction {correction} is not a current generator") from None
    if not commutes(measured, correction):
        raise SynthesisError("measurement not anticommuting with designated correction")
    for i, gen in enumerate(state.generators):
        if i != m_idx and commutes(measured, gen):
            raise SynthesisError("measurement anticommutes with a second generator")
    return measurement_step(state, measured, outcome=+1)


def canonical_signed_form(generators) -> tuple[PauliOperator, ...]:
    """Unique signed generator list for a stabilizer group (rref with phases)."""
    ops = list(generators)
    if not ops:
        return ()
    width = 2 * ops[0].n
    r = 0
    for col in range(width):
        pivot = next(
            (i for i in range(r, len(ops)) if ops[i].symplectic_row()[col]), None
        )
        if pivot is None:
            continue
        ops[r], ops[pivot] = ops[pivot], ops[r]
        for i in range(len(ops)):
            if i != r and ops[i].symplectic_row()[col]:
                ops[i] = multiply(ops[r], ops[i])
        r += 1
        if r == len(ops):
            break
    return tuple(ops)


def extract_logical_action(
    initial_xs, initial_zs, final_xs, final_zs, generators
) -> LogicalAction:
    """Reduce final logicals modulo the signed stabilizer group and express
    them over the initial logicals.

    Raises EngineInvariantError when a final logical is not expressible
    ("logical leaked outside code") or when the residual phase is +/-i
    ("phase convention violation").
    """
    k = len(initial_xs)
    n = initial_xs[0].n if k else 0
    gen_rows = [g.symplectic_row() for g in generators]
    logical_ops = []
    for lx, lz in zip(initial_xs, initial_zs):
        logical_ops.extend([lx, lz])
    basis = np.array(gen_rows + [op.symplectic_row() for op in logical_ops], dtype=np.uint8)
    if basis.size == 0:
        basis = np.zeros((0, 2 * n), dtype=np.uint8)

    num_gens = len(generators)

    def reduce(final: PauliOperator) -> PauliOperator:
        space = gf2.solve_affine(basis.T, final.symplectic_row())
        if space is None:
            raise EngineInvariantError(f"logical leaked outside code: {final}")
        coeffs = space.member(0)
        u, w = coeffs[:num_gens], coeffs[num_gens:]
        word = PauliOperator.identity(n)
        for i in range(num_gens):
            if u[i]:
                word = multiply(word, generators[i])
        for r in range(2 * k):
            if w[r]:
                word = multiply(word, logical_ops[r])
        if not (np.array_equal(word.x, final.x) and np.array_equal(word.z, final.z)):
            raise EngineInvariantError("reduction mismatch (solver bug)")
        delta = (final.phase - word.phase) % 4
        image = PauliOperator.identity(k)
        for r in range(2 * k):
            if w[r]:
                image = multiply(image, _single(k, r // 2, "X" if r % 2 == 0 else "Z"))
        image = PauliOperator(k, image.phase + delta, image.x, image.z)
        if not image.is_hermitian():
            raise EngineInvariantError(
                f"phase convention violation: image of {final} has a +/-i sign"
            )
        return image

    action = LogicalAction(
        tuple(reduce(op) for op in final_xs),
        tuple(reduce(op) for op in final_zs),
    )
    if not action.is_symplectic():
        raise EngineInvariantError("extracted action violates the symplectic condition")
    return action


# ---------------------------------------------------------------------------
# elementary rewirings


def elementary_rewiring(state: TableauState, pair: RewiringPair) -> tuple[TableauState, LogicalAction]:
    """Run the three measure-and-correct steps of a rewiring pair.

    Returns the final state and the induced action relative to the logical
    representatives held by ``state`` on entry. The signed stabilizer group is
    asserted to be restored exactly.
    """
    m_idx = pair.m - 1
    if not 0 <= m_idx < len(state.generators):
        raise ValueError(f"pair replaces generator {pair.m}, state has {len(state.generators)}")
    problems = _state_pair_violations(state, pair)
    if problems:
        raise SynthesisError("pair does not validate against state: " + "; ".join(problems))

    gm = state.generators[m_idx]
    s1 = lemma1_update(state, pair.g, gm)
    s2 = lemma1_update(s1, pair.g_prime, s1.generators[m_idx])
    s3 = lemma1_update(s2, gm, s2.generators[m_idx])

    if canonical_signed_form(s3.generators) != canonical_signed_form(state.generators):
        raise EngineInvariantError("elementary rewiring did not restore the stabilizer group")
    action = extract_logical_action(
        state.logical_xs, state.logical_zs, s3.logical_xs, s3.logical_zs, state.generators
    )
    return s3, action


def _state_pair_violations(state: TableauState, pair: RewiringPair) -> list[str]:
    out = []
    for op, label in ((pair.g, "g"), (pair.g_prime, "g'")):
        if not op.is_hermitian():
            out.append(f"{label} is not Hermitian")
        for i, gen in enumerate(state.generators, start=1):
            expected = 1 if i == pair.m else 0
            if commutes(op, gen) != expected:
                out.append(f"c({label}, generator {i}) != {expected}")
    if commutes(pair.g, pair.g_prime) != 1:
        out.append("g and g' must anticommute")
    for i, h in enumerate(state.logicals_interleaved()):
        if commutes(pair.g, h):
            out.append(f"g anticommutes with current logical {i}")
    return out


@dataclass(frozen=True)
class BranchReport:
    """Result of simulating every sign-outcome combination of one rewiring."""

    ok: bool
    divergent: tuple[tuple[int, int, int], ...]
    action: LogicalAction


def simulate_all_branches(state: TableauState, pair: RewiringPair) -> BranchReport:
    """Check that all 8 outcome branches agree after corrections."""
    m_idx = pair.m - 1
    gm = state.generators[m_idx]
    sequence = (pair.g, pair.g_prime, gm)

    def run(outcomes):
        st = state
        for measured, o in zip(sequence, outcomes):
            st = measurement_step(st, measured, outcome=o)
        return st

    reference = run((+1, +1, +1))
    ref_key = _state_key(reference)
    ref_action = extract_logical_action(
        state.logical_xs, state.logical_zs,
        reference.logical_xs, reference.logical_zs, state.generators,
    )
    divergent = []
    for outcomes in itertools.product((+1, -1), repeat=3):
        st = run(outcomes)
        if _state_key(st) != ref_key:
            divergent.append(outcomes)
            continue
        action = extract_logical_action(
            state.logical_xs, state.logical_zs, st.logical_xs, st.logical_zs, state.generators
        )
        if action != ref_action:
            divergent.append(outcomes)
    return BranchReport(not divergent, tuple(divergent), ref_action)


def _state_key(state: TableauState):
    return (
        tuple(op.key() for op in state.generators),
        tuple(op.key() for op in state.logical_xs),
        tuple(op.key() for op in state.logical_zs),
    )


def fix_sign(code, pair: RewiringPair, desired: str = "sqrt") -> RewiringPair:
    """Return the pair (possibly with g' negated) inducing the exact variant.

    ``desired`` is "sqrt" for the exact square root or "t_sqrt" for the
    t*sqrt(t) companion. Only defined for pairs whose targets touch a single
    logical qubit.
    """
    if desired not in ("sqrt", "t_sqrt"):
        raise ValueError(f"desired must be 'sqrt' or 't_sqrt', got {desired!r}")
    _, action = elementary_rewiring(TableauState.from_code(code), pair)
    axis, variant, _ = classify_t_type(action)
    if axis == "identity":
        raise SynthesisError("identity action has no sqrt variant to fix")
    if variant == desired:
        return pair
    flipped = pair.negated_second()
    _, action = elementary_rewiring(TableauState.from_code(code), flipped)
    _, variant, _ = classify_t_type(action)
    if variant != desired:
        raise EngineInvariantError("negating g' did not produce the desired variant")
    return flipped
