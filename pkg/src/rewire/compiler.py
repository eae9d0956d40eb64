"""Lower logical Clifford programs to measurement/correction schedules.

Gate programs use the grammar ``stmt := GATE idx (idx)?`` with statements
separated by ";" or newlines. Each single-qubit Clifford generator costs one
elementary rewiring (3 measurements); CNOT costs three rewirings plus a
square-root cleanup on each participant (9 measurements). Residual signs are
absorbed into one trailing logical-Pauli fix-up applied as a physical Pauli
string.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .codes import (
    DistanceResult,
    code_hash,
    distance_of_generators,
    validate,
)
from .errors import (
    DistanceBudgetError,
    EngineInvariantError,
    SchemaError,
    SynthesisError,
    ValidationFailure,
)
from .pauli import PauliOperator, commutes, multiply, parse_pauli
from .rewiring import (
    LogicalAction,
    RewiringPair,
    TableauState,
    check_pair,
    elementary_rewiring,
    extract_logical_action,
    find_first_observable,
    find_second_observable,
    fix_sign,
    lemma1_update,
    measurement_step,
    normalize_targets,
    simulate_all_branches,
    solution_to_observable,
    sqrt_action,
    synthesize_pair,
)

# ---------------------------------------------------------------------------
# gate programs

_SINGLE_QUBIT_GATES = ("H", "S", "Sdg", "SX", "SXdg", "SY", "SYdg", "X", "Y", "Z")
_CANONICAL = {name.lower(): name for name in _SINGLE_QUBIT_GATES + ("CNOT",)}


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.name} " + " ".join(str(q) for q in self.qubits)


@dataclass(frozen=True)
class GateProgram:
    gates: tuple[Gate, ...]

    def __str__(self) -> str:
        return "; ".join(str(g) for g in self.gates)

    def __len__(self) -> int:
        return len(self.gates)


def parse_program(text: str, k: int | None = None) -> GateProgram:
    """Parse a gate program, optionally validating qubit indices against k."""
    gates = []
    statements = [s.strip() for chunk in text.split("\n") for s in chunk.split(";")]
    for stmt in statements:
        if not stmt:
            continue
        tokens = stmt.split()
        name = _CANONICAL.get(tokens[0].lower())
        if name is None:
            raise SynthesisError(f"unknown gate {tokens[0]!r} in statement {stmt!r}")
        arity = 2 if name == "CNOT" else 1
        if len(tokens) != arity + 1:
            raise SynthesisError(f"gate {name} takes {arity} qubit index(es): {stmt!r}")
        try:
            qubits = tuple(int(t) for t in tokens[1:])
        except ValueError:
            raise SynthesisError(f"non-integer qubit index in {stmt!r}") from None
        if any(q < 0 for q in qubits):
            raise SynthesisError(f"negative qubit index in {stmt!r}")
        if name == "CNOT" and qubits[0] == qubits[1]:
            raise SynthesisError(f"CNOT control equals target in {stmt!r}")
        if k is not None and any(q >= k for q in qubits):
            raise SynthesisError(f"qubit index out of range (k={k}) in {stmt!r}")
        gates.append(Gate(name, qubits))
    return GateProgram(tuple(gates))


def conjugation_action(op: PauliOperator) -> LogicalAction:
    """The Clifford action of conjugating by a (logical) Pauli operator."""
    k = op.n
    identity = LogicalAction.identity(k)
    xs = tuple(
        img.negated() if commutes(op, img) else img for img in identity.x_images
    )
    zs = tuple(
        img.negated() if commutes(op, img) else img for img in identity.z_images
    )
    return LogicalAction(xs, zs)


_SQRT_GATE_TABLE = {
    "S": ("Z", "sqrt"),
    "Sdg": ("Z", "t_sqrt"),
    "SX": ("X", "sqrt"),
    "SXdg": ("X", "t_sqrt"),
    "SY": ("Y", "sqrt"),
    "SYdg": ("Y", "t_sqrt"),
}

_AXIS_TARGETS = {"Z": (1, 0), "X": (0, 1), "Y": (1, 1)}


def gate_action(gate: Gate, k: int) -> LogicalAction:
    """Exact conjugation action of one gate on k logical qubits."""
    if any(q >= k for q in gate.qubits):
        raise SynthesisError(f"gate {gate} outside k={k} logical qubits")
    if gate.name in _SQRT_GATE_TABLE:
        axis, variant = _SQRT_GATE_TABLE[gate.name]
        return sqrt_action(k, gate.qubits[0], axis, variant)
    if gate.name in ("X", "Y", "Z"):
        return conjugation_action(_logical_letter(k, gate.qubits[0], gate.name))
    if gate.name == "H":
        q = gate.qubits[0]
        identity = LogicalAction.identity(k)
        xs = list(identity.x_images)
        zs = list(identity.z_images)
        xs[q], zs[q] = zs[q], xs[q]
        return LogicalAction(tuple(xs), tuple(zs))
    if gate.name == "CNOT":
        c, t = gate.qubits
        identity = LogicalAction.identity(k)
        xs = list(identity.x_images)
        zs = list(identity.z_images)
        xs[c] = multiply(xs[c], identity.x_images[t])
        zs[t] = multiply(identity.z_images[c], zs[t])
        return LogicalAction(tuple(xs), tuple(zs))
    raise SynthesisError(f"unknown gate {gate.name}")


def _logical_letter(k: int, q: int, letter: str) -> PauliOperator:
    x = np.zeros(k, np.uint8)
    z = np.zeros(k, np.uint8)
    phase = 0
    if letter in ("X", "Y"):
        x[q] = 1
    if letter in ("Z", "Y"):
        z[q] = 1
    if letter == "Y":
        phase = 1
    return PauliOperator(k, phase, x, z)


def program_action(program: GateProgram, k: int) -> LogicalAction:
    action = LogicalAction.identity(k)
    for gate in program.gates:
        action = action.then(gate_action(gate, k))
    return action


def solve_pauli_fixup(achieved: LogicalAction, target: LogicalAction) -> PauliOperator:
    """The logical Pauli whose conjugation turns ``achieved`` into ``target``.

    Requires equal symplectic parts; the sign discrepancies always admit a
    solution because the achieved images form a complete symplectic frame.
    """
    if not np.array_equal(achieved.symplectic(), target.symplectic()):
        raise SynthesisError("actions differ beyond signs; no Pauli fix-up exists")
    k = achieved.k
    columns = list(achieved.x_images) + list(achieved.z_images)
    wanted = list(target.x_images) + list(target.z_images)
    rows = []
    rhs = []
    for col, want in zip(columns, wanted):
        rows.append(np.concatenate([col.z, col.x]))
        rhs.append((col.sign_exponent() - want.sign_exponent()) // 2 % 2)
    from . import gf2

    space = gf2.solve_affine(np.array(rows, dtype=np.uint8), np.array(rhs, dtype=np.uint8))
    if space is None:
        raise EngineInvariantError("sign-fixup system unsolvable for a symplectic frame")
    v = space.member(0)
    fx, fz = v[:k], v[k:]
    fixup = PauliOperator(k, int(np.count_nonzero(fx & fz)), fx, fz)
    if achieved.then(conjugation_action(fixup)) != target:
        raise EngineInvariantError("computed Pauli fix-up does not realize the target")
    return fixup


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class ScheduleStep:
    measure: PauliOperator
    correct: PauliOperator

    def to_json(self) -> dict:
        return {"measure": str(self.measure), "correct_on_minus": str(self.correct)}

    @classmethod
    def from_json(cls, doc: dict) -> "ScheduleStep":
        return cls(parse_pauli(doc["measure"]), parse_pauli(doc["correct_on_minus"]))


@dataclass(frozen=True)
class AuditEntry:
    generators: tuple[PauliOperator, ...]
    distance: DistanceResult
    css: bool

    def to_json(self) -> dict:
        return {
            "generators": [str(g) for g in self.generators],
            "distance": self.distance.to_json(),
            "css": self.css,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "AuditEntry":
        return cls(
            tuple(parse_pauli(s) for s in doc["generators"]),
            DistanceResult.from_json(doc["distance"]),
            bool(doc["css"]),
        )


@dataclass(frozen=True)
class Schedule:
    """An ordered list of measure/correct-on-minus steps with audit data.

    Steps group into consecutive triples, one per elementary rewiring:
    measure g, g', g_m with corrections g_m, g, g'.
    """

    code_name: str
    code_sha256: str
    steps: tuple[ScheduleStep, ...]
    pauli_fixup: PauliOperator
    claimed_action: LogicalAction
    audit: tuple[AuditEntry, ...]

    def to_json(self) -> dict:
        return {
            "code": {"name": self.code_name, "sha256": self.code_sha256},
            "steps": [s.to_json() for s in self.steps],
            "pauli_fixup": str(self.pauli_fixup),
            "claimed_action": self.claimed_action.to_json(),
            "audit": [a.to_json() for a in self.audit],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Schedule":
        try:
            return cls(
                code_name=doc["code"]["name"],
                code_sha256=doc["code"]["sha256"],
                steps=tuple(ScheduleStep.from_json(s) for s in doc["steps"]),
                pauli_fixup=parse_pauli(doc["pauli_fixup"]),
                claimed_action=LogicalAction.from_json(doc["claimed_action"]),
                audit=tuple(AuditEntry.from_json(a) for a in doc["audit"]),
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed schedule document: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "Schedule":
        return cls.from_json(json.loads(text))


def _is_css_set(gens) -> bool:
    return all((not g.x.any()) or (not g.z.any()) for g in gens)


# ---------------------------------------------------------------------------
# distance-aware synthesis


def _resolve_gm(code, gm_policy) -> int:
    if gm_policy == "last" or gm_policy is None:
        return code.num_generators
    if gm_policy == "gauge":
        if not getattr(code, "gauge_fixed_indices", ()):
            raise SynthesisError(
                "gauge policy needs a gauge-fixed code (one carrying "
                "gauge_fixed_stabilizers metadata)"
            )
        return code.gauge_fixed_indices[0] + 1
    m = int(gm_policy)
    if not 1 <= m <= code.num_generators:
        raise SynthesisError(f"gm index {m} outside 1..{code.num_generators}")
    return m


@dataclass
class _SearchBest:
    min_distance: int = -1
    alpha_index: int | None = None
    beta_index: int | None = None

    def to_json(self) -> dict:
        return {
            "min_intermediate_distance": self.min_distance,
            "alpha_index": self.alpha_index,
            "beta_index": self.beta_index,
        }


def synthesize_constrained(
    code, m: int, targets, *, min_distance: int | None = None, budget: int = 128
) -> RewiringPair:
    """Pick a rewiring pair; when ``min_distance`` is set, search the affine
    solution spaces in deterministic order for observables whose intermediate
    codes meet the bound.

    The search charges one budget unit per intermediate-code distance audit
    and raises DistanceBudgetError (carrying the best candidate found) when
    the budget or the solution spaces are exhausted.
    """
    targets = normalize_targets(targets, code.k)
    if min_distance is None:
        return synthesize_pair(code, m, targets)

    depth = min(max(3, min_distance - 1), code.n)
    gen_rows = code.generator_rows()
    n = code.n
    first = find_first_observable(code, m)
    best = _SearchBest()
    remaining = budget

    for i in range(first.size):
        if remaining <= 0:
            break
        g = solution_to_observable(first.member(i))
        rows_a = gen_rows.copy()
        rows_a[m - 1] = g.symplectic_row()
        d_a = distance_of_generators(n, rows_a, None, depth)
        remaining -= 1
        if d_a.value > best.min_distance:
            best = _SearchBest(d_a.value, i, None)
        if not d_a.meets(min_distance):
            continue
        second = find_second_observable(code, m, g, targets)
        for j in range(second.size):
            if remaining <= 0:
                break
            g2 = solution_to_observable(second.member(j))
            rows_b = gen_rows.copy()
            rows_b[m - 1] = g2.symplectic_row()
            d_b = distance_of_generators(n, rows_b, None, depth)
            remaining -= 1
            pair_min = min(d_a.value, d_b.value)
            if pair_min > best.min_distance:
                best = _SearchBest(pair_min, i, j)
            if d_b.meets(min_distance):
                pair = RewiringPair(m, g, g2, targets)
                violations = check_pair(code, pair)
                if violations:
                    raise EngineInvariantError(
                        "constrained synthesis produced invalid pair: " + "; ".join(violations)
                    )
                return pair
    raise DistanceBudgetError(
        f"distance constraint >= {min_distance} unsatisfiable within budget {budget} "
        f"(best intermediate distance found: {best.min_distance})",
        best=best.to_json(),
    )


# ---------------------------------------------------------------------------
# gate compilation


@dataclass(frozen=True)
class GateCompilation:
    rewirings: tuple[RewiringPair, ...]
    fixup: PauliOperator  # logical, on k qubits
    rewiring_action: LogicalAction  # composite action excluding the fix-up


def compile_gate(
    code, gate: Gate, *, min_distance: int | None = None, gm="last", budget: int = 128
) -> GateCompilation:
    """Lower one gate to sign-fixed rewiring pairs plus a logical Pauli fix-up."""
    k = code.k
    target = gate_action(gate, k)

    if gate.name in ("X", "Y", "Z"):
        fixup = _logical_letter(k, gate.qubits[0], gate.name)
        return GateCompilation((), fixup, LogicalAction.identity(k))

    m = _resolve_gm(code, gm)

    if gate.name in _SQRT_GATE_TABLE or gate.name == "H":
        axis, variant = _SQRT_GATE_TABLE.get(gate.name, ("Y", "sqrt"))
        q = gate.qubits[0]
        targets = [(0, 0)] * k
        targets[q] = _AXIS_TARGETS[axis]
        pair = synthesize_constrained(
            code, m, targets, min_distance=min_distance, budget=budget
        )
        pair = fix_sign(code, pair, variant)
        achieved = sqrt_action(k, q, axis, variant)
        fixup = solve_pauli_fixup(achieved, target)
        return GateCompilation((pair,), fixup, achieved)

    if gate.name == "CNOT":
        return _compile_cnot(code, gate, m, min_distance, budget)
    raise SynthesisError(f"unknown gate {gate.name}")


def _compile_cnot(code, gate: Gate, m: int, min_distance, budget) -> GateCompilation:
    k = code.k
    c, t = gate.qubits
    targets = [(0, 0)] * k
    targets[c] = (1, 0)
    targets[t] = (0, 1)
    entangler = synthesize_constrained(
        code, m, targets, min_distance=min_distance, budget=budget
    )
    _, action1 = elementary_rewiring(TableauState.from_code(code), entangler)

    # X_c must map to +/- Y_c X_t and Z_t to +/- Z_c Y_t; read the signs and
    # choose the square-root variants that make both images positive.
    eps1 = _word_sign(action1.x_images[c], x_support={c, t}, z_support={c})
    eps2 = _word_sign(action1.z_images[t], x_support={t}, z_support={c, t})
    variant_c = "sqrt" if eps1 else "t_sqrt"  # exact S maps Y -> -X
    variant_t = "sqrt" if eps2 else "t_sqrt"  # exact sqrt(X) maps Y -> -Z

    cleanup_c = [(0, 0)] * k
    cleanup_c[c] = _AXIS_TARGETS["Z"]
    pair_c = fix_sign(
        code,
        synthesize_constrained(code, m, cleanup_c, min_distance=min_distance, budget=budget),
        variant_c,
    )
    cleanup_t = [(0, 0)] * k
    cleanup_t[t] = _AXIS_TARGETS["X"]
    pair_t = fix_sign(
        code,
        synthesize_constrained(code, m, cleanup_t, min_distance=min_distance, budget=budget),
        variant_t,
    )

    composite = action1.then(sqrt_action(k, c, "Z", variant_c)).then(
        sqrt_action(k, t, "X", variant_t)
    )
    fixup = solve_pauli_fixup(composite, gate_action(gate, k))
    return GateCompilation((entangler, pair_c, pair_t), fixup, composite)


def _word_sign(op: PauliOperator, x_support: set, z_support: set) -> bool:
    """True when op is minus the expected word; asserts the expected support."""
    k = op.n
    expected_x = {q for q in range(k) if op.x[q]}
    expected_z = {q for q in range(k) if op.z[q]}
    if expected_x != x_support or expected_z != z_support:
        raise EngineInvariantError(
            f"image {op} has support {expected_x}/{expected_z}, "
            f"expected {x_support}/{z_support}"
        )
    return op.sign_exponent() // 2 == 1


# ---------------------------------------------------------------------------
# program compilation


def compile_program(
    code,
    program: GateProgram | str,
    *,
    min_distance: int | None = None,
    gm="last",
    budget: int = 128,
) -> Schedule:
    """Compile a whole program into one schedule with a trailing Pauli fix-up.

    The claimed action is asserted three ways before the schedule is
    returned: composed per-gate actions, a sequential tableau re-simulation,
    and the program's target action must all agree exactly.
    """
    report = validate(code)
    if not report.ok:
        raise ValidationFailure(
            "cannot compile on an invalid code: "
            + "; ".join(c.name for c in report.failures)
        )
    if isinstance(program, str):
        program = parse_program(program, k=code.k)
    else:
        for gate in program.gates:
            if any(q >= code.k for q in gate.qubits):
                raise SynthesisError(f"gate {gate} outside k={code.k}")

    depth = min(max(3, (min_distance - 1) if min_distance else 0), code.n)
    audit_cache: dict = {}

    def audit_entry(gens) -> AuditEntry:
        key = tuple(op.key() for op in gens)
        if key not in audit_cache:
            rows = np.stack([op.symplectic_row() for op in gens])
            audit_cache[key] = AuditEntry(
                generators=tuple(gens),
                distance=distance_of_generators(code.n, rows, None, depth),
                css=_is_css_set(gens),
            )
        return audit_cache[key]

    state = TableauState.from_code(code)
    steps: list[ScheduleStep] = []
    audit: list[AuditEntry] = []
    total_action = LogicalAction.identity(code.k)
    pending_fixup = PauliOperator.identity(code.k)

    for gate in program.gates:
        comp = compile_gate(code, gate, min_distance=min_distance, gm=gm, budget=budget)
        for pair in comp.rewirings:
            m_idx = pair.m - 1
            gm_signed = state.generators[m_idx]
            s1 = lemma1_update(state, pair.g, gm_signed)
            audit.append(audit_entry(s1.generators))
            s2 = lemma1_update(s1, pair.g_prime, s1.generators[m_idx])
            audit.append(audit_entry(s2.generators))
            s3 = lemma1_update(s2, gm_signed, s2.generators[m_idx])
            audit.append(audit_entry(s3.generators))
            steps.extend(
                [
                    ScheduleStep(pair.g, gm_signed),
                    ScheduleStep(pair.g_prime, pair.g),
                    ScheduleStep(gm_signed, pair.g_prime),
                ]
            )
            state = s3
        pending_fixup = multiply(comp.fixup, comp.rewiring_action.image(pending_fixup))
        total_action = total_action.then(comp.rewiring_action)

    claimed = total_action.then(conjugation_action(pending_fixup))
    target = program_action(program, code.k)
    if claimed != target:
        raise EngineInvariantError("composed action does not match the program target")
    sequential = extract_logical_action(
        code.logical_xs, code.logical_zs, state.logical_xs, state.logical_zs, code.generators
    )
    if sequential != total_action:
        raise EngineInvariantError("sequential simulation disagrees with composed actions")

    physical_fixup = PauliOperator.identity(code.n)
    for j in range(code.k):
        if pending_fixup.x[j]:
            physical_fixup = multiply(physical_fixup, code.logical_xs[j])
    for j in range(code.k):
        if pending_fixup.z[j]:
            physical_fixup = multiply(physical_fixup, code.logical_zs[j])

    return Schedule(
        code_name=code.name,
        code_sha256=code_hash(code),
        steps=tuple(steps),
        pauli_fixup=physical_fixup,
        claimed_action=claimed,
        audit=tuple(audit),
    )


# ---------------------------------------------------------------------------
# Clifford decomposition

_DAGGERS = {
    "H": "H",
    "S": "Sdg",
    "Sdg": "S",
    "SX": "SXdg",
    "SXdg": "SX",
    "SY": "SYdg",
    "SYdg": "SY",
    "X": "X",
    "Y": "Y",
    "Z": "Z",
    "CNOT": "CNOT",
}


def decompose_clifford(action: LogicalAction) -> GateProgram:
    """Write an action as a gate program via symplectic elimination.

    The returned program recomposes to the input exactly, signs included.
    """
    if not action.is_symplectic():
        raise SynthesisError("input action violates the symplectic condition")
    k = action.k
    applied: list[Gate] = []
    current = action

    def push(name: str, *qubits: int):
        nonlocal current
        gate = Gate(name, qubits)
        applied.append(gate)
        current = current.then(gate_action(gate, k))

    for j in range(k):
        alpha = current.x_images[j]
        if not any(alpha.x[q] for q in range(j, k)):
            q = next(q for q in range(j, k) if alpha.z[q])
            push("H", q)
            alpha = current.x_images[j]
        q0 = next(q for q in range(j, k) if alpha.x[q])
        if q0 != j:
            push("CNOT", j, q0)
            push("CNOT", q0, j)
            push("CNOT", j, q0)
            alpha = current.x_images[j]
        for q in range(j + 1, k):
            if alpha.x[q]:
                push("CNOT", j, q)
        alpha = current.x_images[j]
        if alpha.z[j]:
            push("S", j)
            alpha = current.x_images[j]
        for q in range(j + 1, k):
            if alpha.z[q]:
                push("H", q)
                push("CNOT", j, q)
        alpha = current.x_images[j]
        assert list(alpha.x) == [1 if q == j else 0 for q in range(k)] and not any(
            alpha.z[q] for q in range(k)
        )

        beta = current.z_images[j]
        if beta.x[j]:
            push("SX", j)
            beta = current.z_images[j]
        for q in range(j + 1, k):
            if beta.x[q]:
                if beta.z[q]:
                    push("S", q)
                push("H", q)
                beta = current.z_images[j]
        for q in range(j + 1, k):
            if beta.z[q]:
                push("CNOT", q, j)
        beta = current.z_images[j]
        assert list(beta.z) == [1 if q == j else 0 for q in range(k)] and not beta.x.any()

        minus_x = current.x_images[j].sign_exponent() == 2
        minus_z = current.z_images[j].sign_exponent() == 2
        if minus_x and minus_z:
            push("Y", j)
        elif minus_x:
            push("Z", j)
        elif minus_z:
            push("X", j)

    if current != LogicalAction.identity(k):
        raise EngineInvariantError("elimination did not reach the identity action")
    inverse = [Gate(_DAGGERS[g.name], g.qubits) for g in reversed(applied)]
    return GateProgram(tuple(inverse))


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class Verdict:
    discrepancies: tuple[str, ...]
    action: LogicalAction | None = None

    @property
    def ok(self) -> bool:
        return not self.discrepancies

    def __str__(self) -> str:
        if self.ok:
            return "pass"
        return "fail:\n  " + "\n  ".join(self.discrepancies)


def verify_schedule(
    code,
    schedule: Schedule,
    expected: GateProgram | LogicalAction | None = None,
    *,
    branches: str = "all",
    samples: int = 0,
    reaudit: bool = True,
) -> Verdict:
    """Independently re-simulate a schedule and re-check every claim.

    ``branches`` is "all" (enumerate the 8 outcome branches of each rewiring
    triple), "sample" (run ``samples`` random full-schedule outcome
    assignments), or "none". The code hash must match the schedule.
    """
    if code_hash(code) != schedule.code_sha256:
        raise SchemaError(
            f"schedule was compiled for {schedule.code_name} "
            f"({schedule.code_sha256[:12]}...), which does not hash-match this code"
        )
    problems: list[str] = []
    if len(schedule.steps) % 3:
        return Verdict((f"step count {len(schedule.steps)} is not a multiple of 3",))

    css_input = code.is_css()
    state = TableauState.from_code(code)
    recomputed_gens: list[tuple[PauliOperator, ...]] = []

    for t in range(len(schedule.steps) // 3):
        s1, s2, s3 = schedule.steps[3 * t : 3 * t + 3]
        hits = [i for i, g in enumerate(state.generators) if commutes(s1.measure, g)]
        if len(hits) != 1:
            problems.append(f"triple {t}: first observable anticommutes with {len(hits)} generators")
            break
        m_idx = hits[0]
        gm_signed = state.generators[m_idx]
        if s1.correct != gm_signed:
            problems.append(f"triple {t}: step 1 correction is not the replaced generator")
        if s2.correct != s1.measure:
            problems.append(f"triple {t}: step 2 correction must be the step-1 observable")
        if s3.correct != s2.measure:
            problems.append(f"triple {t}: step 3 correction must be the step-2 observable")
        if s3.measure != gm_signed:
            problems.append(f"triple {t}: step 3 must re-measure the replaced generator")
        if problems:
            break

        targets = tuple(
            (commutes(s2.measure, lx), commutes(s2.measure, lz))
            for lx, lz in zip(code.logical_xs, code.logical_zs)
        )
        pair = RewiringPair(m_idx + 1, s1.measure, s2.measure, targets)
        pair_problems = check_pair(code, pair)
        if pair_problems:
            problems.append(f"triple {t}: " + "; ".join(pair_problems))
            break

        if css_input and not any(
            op.x.any() and op.z.any() for op in (s1.measure, s2.measure, s3.measure)
        ):
            problems.append(
                f"triple {t}: CSS input code but no measured observable mixes X and Z"
            )

        if branches == "all":
            report = simulate_all_branches(state, pair)
            if not report.ok:
                problems.append(f"triple {t}: branches diverge at outcomes {report.divergent}")

        try:
            st1 = lemma1_update(state, s1.measure, gm_signed)
            recomputed_gens.append(tuple(st1.generators))
            st2 = lemma1_update(st1, s2.measure, st1.generators[m_idx])
            recomputed_gens.append(tuple(st2.generators))
            st3 = lemma1_update(st2, s3.measure, st2.generators[m_idx])
            recomputed_gens.append(tuple(st3.generators))
        except (SynthesisError, EngineInvariantError) as exc:
            problems.append(f"triple {t}: re-simulation failed: {exc}")
            break
        state = st3

    if problems:
        return Verdict(tuple(problems))

    fixup = schedule.pauli_fixup
    for i, g in enumerate(code.generators):
        if commutes(fixup, g):
            problems.append(f"pauli_fixup anticommutes with generator {i}: not logical")
    final_xs = [op.negated() if commutes(fixup, op) else op for op in state.logical_xs]
    final_zs = [op.negated() if commutes(fixup, op) else op for op in state.logical_zs]
    try:
        final_action = extract_logical_action(
            code.logical_xs, code.logical_zs, final_xs, final_zs, code.generators
        )
    except EngineInvariantError as exc:
        return Verdict(tuple(problems + [f"action extraction failed: {exc}"]))

    if final_action != schedule.claimed_action:
        problems.append("re-simulated action differs from claimed_action")
    if expected is not None:
        want = expected if isinstance(expected, LogicalAction) else program_action(expected, code.k)
        if final_action != want:
            problems.append("re-simulated action differs from the expected gate action")

    if branches == "sample" and samples > 0:
        problems.extend(_sampled_branches(code, schedule, state, samples))

    if reaudit:
        if len(schedule.audit) != len(schedule.steps):
            problems.append(
                f"audit has {len(schedule.audit)} entries for {len(schedule.steps)} steps"
            )
        else:
            for i, (entry, gens) in enumerate(zip(schedule.audit, recomputed_gens)):
                if entry.generators != gens:
                    problems.append(f"audit step {i}: recorded generator set differs")
                    continue
                rows = np.stack([op.symplectic_row() for op in gens])
                depth = entry.distance.value if entry.distance.exact else entry.distance.value - 1
                redo = distance_of_generators(code.n, rows, None, depth)
                if (redo.value, redo.exact) != (entry.distance.value, entry.distance.exact):
                    problems.append(
                        f"audit step {i}: distance recomputes to {redo}, recorded {entry.distance}"
                    )
                if entry.css != _is_css_set(gens):
                    problems.append(f"audit step {i}: CSS flag recomputes differently")

    return Verdict(tuple(problems), final_action)


def _sampled_branches(code, schedule: Schedule, reference_state, trials: int) -> list[str]:
    problems = []
    rng = np.random.default_rng(0x5EED)
    ref = (
        tuple(op.key() for op in reference_state.generators),
        tuple(op.key() for op in reference_state.logical_xs),
        tuple(op.key() for op in reference_state.logical_zs),
    )
    for trial in range(trials):
        st = TableauState.from_code(code)
        for step in schedule.steps:
            outcome = +1 if rng.integers(2) else -1
            hits = [i for i, g in enumerate(st.generators) if commutes(step.measure, g)]
            if len(hits) != 1 or st.generators[hits[0]] not in (step.correct, step.correct.negated()):
                problems.append(f"trial {trial}: correction mismatch mid-schedule")
                break
            st = measurement_step(st, step.measure, outcome)
        else:
            key = (
                tuple(op.key() for op in st.generators),
                tuple(op.key() for op in st.logical_xs),
                tuple(op.key() for op in st.logical_zs),
            )
            if key != ref:
                problems.append(f"trial {trial}: sampled outcomes changed the final state")
    return problems
