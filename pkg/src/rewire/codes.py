"""Stabilizer and subsystem codes: validation, distance, gauge fixing, I/O.

Code file schema (JSON, UTF-8)::

    {
      "name": str, "n": int,
      "stabilizers": [signed Pauli strings],
      "logical_x": [...], "logical_z": [...],        # index-aligned pairs
      "gauge_x": [...], "gauge_z": [...],            # subsystem codes only
      "gauge_fixed_stabilizers": [int, ...]          # optional bookkeeping
    }

``gauge_fixed_stabilizers`` records which stabilizer rows of a gauge-fixed
code were promoted gauge operators, so generator-selection policies that need
them survive a save/load round trip.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .errors import SchemaError, ValidationFailure
from .pauli import PauliOperator, commutes, parse_pauli
from .parallel import map_chunks


@dataclass(frozen=True)
class StabilizerCode:
    """An [[n, k]] stabilizer code: generators plus chosen logical pairs."""

    name: str
    n: int
    generators: tuple[PauliOperator, ...]
    logical_xs: tuple[PauliOperator, ...]
    logical_zs: tuple[PauliOperator, ...]
    gauge_fixed_indices: tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return len(self.logical_xs)

    @property
    def num_generators(self) -> int:
        return len(self.generators)

    def generator_rows(self) -> np.ndarray:
        return _rows(self.generators, self.n)

    def logical_rows(self) -> np.ndarray:
        """Interleaved X/Z logical rows: X_1, Z_1, ..., X_k, Z_k."""
        interleaved = []
        for lx, lz in zip(self.logical_xs, self.logical_zs):
            interleaved.extend([lx, lz])
        return _rows(interleaved, self.n)

    def logicals_interleaved(self) -> tuple[PauliOperator, ...]:
        out = []
        for lx, lz in zip(self.logical_xs, self.logical_zs):
            out.extend([lx, lz])
        return tuple(out)

    def is_css(self) -> bool:
        return all(_is_pure_type(g) for g in self.generators)


@dataclass(frozen=True)
class SubsystemCode:
    """A stabilizer code together with gauge-qubit logical pairs.

    ``logical_xs``/``logical_zs`` are the retained (bare) logical pairs;
    ``gauge_xs``/``gauge_zs`` the pairs designated as gauge qubits.
    """

    name: str
    n: int
    generators: tuple[PauliOperator, ...]
    logical_xs: tuple[PauliOperator, ...]
    logical_zs: tuple[PauliOperator, ...]
    gauge_xs: tuple[PauliOperator, ...]
    gauge_zs: tuple[PauliOperator, ...]

    @property
    def k(self) -> int:
        return len(self.logical_xs)

    @property
    def num_gauge_qubits(self) -> int:
        return len(self.gauge_xs)

    def combined_code(self) -> StabilizerCode:
        """View with gauge pairs appended to the logical pairs."""
        return StabilizerCode(
            name=self.name,
            n=self.n,
            generators=self.generators,
            logical_xs=self.logical_xs + self.gauge_xs,
            logical_zs=self.logical_zs + self.gauge_zs,
        )

    def generator_rows(self) -> np.ndarray:
        return _rows(self.generators, self.n)

    def gauge_rows(self) -> np.ndarray:
        return _rows(self.gauge_xs + self.gauge_zs, self.n)

    def is_css(self) -> bool:
        return all(_is_pure_type(g) for g in self.generators)


def _rows(ops, n) -> np.ndarray:
    if not ops:
        return np.zeros((0, 2 * n), dtype=np.uint8)
    return np.stack([op.symplectic_row() for op in ops])


def _is_pure_type(op: PauliOperator) -> bool:
    return not op.x.any() or not op.z.any()


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> tuple[Check, ...]:
        return tuple(c for c in self.checks if not c.ok)

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            status = "pass" if c.ok else "FAIL"
            suffix = f" ({c.detail})" if c.detail and not c.ok else ""
            lines.append(f"{status}  {c.name}{suffix}")
        return "\n".join(lines)


def validate(code) -> ValidationReport:
    """Check every structural invariant, reporting each violating pair."""
    if isinstance(code, SubsystemCode):
        checks = list(_validate_stabilizer(code.combined_code()).checks)
        ok = len(code.gauge_xs) == len(code.gauge_zs) and code.num_gauge_qubits >= 1
        checks.append(
            Check(
                "gauge_count",
                ok,
                f"{len(code.gauge_xs)} gauge X vs {len(code.gauge_zs)} gauge Z",
            )
        )
        return ValidationReport(tuple(checks))
    return _validate_stabilizer(code)


def _validate_stabilizer(code: StabilizerCode) -> ValidationReport:
    checks: list[Check] = []
    gens = code.generators
    n = code.n

    sized = all(op.n == n for op in gens + code.logical_xs + code.logical_zs)
    checks.append(Check("operator_sizes", sized, f"all operators must act on {n} qubits"))
    if not sized:
        return ValidationReport(tuple(checks))

    counts_ok = (
        len(code.logical_xs) == len(code.logical_zs)
        and len(gens) + code.k == n
    )
    checks.append(
        Check(
            "counts",
            counts_ok,
            f"{len(gens)} generators + {code.k} logical pairs vs n={n}",
        )
    )

    bad_sign = next((i for i, g in enumerate(gens) if not g.is_hermitian()), None)
    checks.append(
        Check(
            "generator_signs",
            bad_sign is None,
            "" if bad_sign is None else f"generator {bad_sign} has phase +/-i",
        )
    )

    noncommuting = next(
        (
            (i, j)
            for i in range(len(gens))
            for j in range(i + 1, len(gens))
            if commutes(gens[i], gens[j])
        ),
        None,
    )
    checks.append(
        Check(
            "generators_commute",
            noncommuting is None,
            "" if noncommuting is None else f"generators {noncommuting} anticommute",
        )
    )

    independent = gf2.rank(code.generator_rows()) == len(gens) if gens else True
    checks.append(Check("generators_independent", independent))

    logicals = code.logicals_interleaved()
    bad_lsign = next((i for i, op in enumerate(logicals) if not op.is_hermitian()), None)
    checks.append(
        Check(
            "logical_signs",
            bad_lsign is None,
            "" if bad_lsign is None else f"logical operator {bad_lsign} has phase +/-i",
        )
    )

    violation = next(
        (
            (i, j)
            for i in range(len(gens))
            for j, op in enumerate(logicals)
            if commutes(gens[i], op)
        ),
        None,
    )
    checks.append(
        Check(
            "logicals_commute_with_generators",
            violation is None,
            ""
            if violation is None
            else f"generator {violation[0]} anticommutes with logical {violation[1]}",
        )
    )

    pairing_bad = None
    k = code.k
    for i in range(k):
        for j in range(k):
            if commutes(code.logical_xs[i], code.logical_zs[j]) != (1 if i == j else 0):
                pairing_bad = f"c(X_L[{i}], Z_L[{j}]) != {1 if i == j else 0}"
            if j > i and commutes(code.logical_xs[i], code.logical_xs[j]):
                pairing_bad = f"c(X_L[{i}], X_L[{j}]) = 1"
            if j > i and commutes(code.logical_zs[i], code.logical_zs[j]):
                pairing_bad = f"c(Z_L[{i}], Z_L[{j}]) = 1"
    checks.append(Check("logical_pairing", pairing_bad is None, pairing_bad or ""))

    return ValidationReport(tuple(checks))


# ---------------------------------------------------------------------------
# distance


@dataclass(frozen=True)
class DistanceResult:
    """Exact distance, or the lower bound proven by exhausting low weights."""

    value: int
    exact: bool

    def meets(self, bound: int) -> bool:
        return self.value >= bound

    def to_json(self) -> dict:
        return {"exact": self.value} if self.exact else {"at_least": self.value}

    @classmethod
    def from_json(cls, doc: dict) -> "DistanceResult":
        if "exact" in doc:
            return cls(int(doc["exact"]), True)
        if "at_least" in doc:
            return cls(int(doc["at_least"]), False)
        raise SchemaError(f"distance entry must carry 'exact' or 'at_least': {doc}")

    def __str__(self) -> str:
        return str(self.value) if self.exact else f">= {self.value}"


_LETTER_XZ = np.array([(1, 0), (1, 1), (0, 1)], dtype=np.uint8)  # X, Y, Z


def distance(code, max_weight: int) -> DistanceResult:
    """Brute-force (dressed) distance by weight-ordered enumeration.

    Minimum weight of a Pauli that commutes with every stabilizer generator
    yet lies outside the group generated by the stabilizers (plus the gauge
    operators, for a subsystem code).
    """
    if isinstance(code, SubsystemCode):
        stab = code.generator_rows()
        group = np.vstack([stab, code.gauge_rows()]) if code.num_gauge_qubits else stab
        return distance_of_generators(code.n, stab, group, max_weight)
    return distance_of_generators(code.n, code.generator_rows(), None, max_weight)


def distance_of_generators(n, stabilizer_rows, group_rows, max_weight) -> DistanceResult:
    """Distance of the code defined by a generator set alone.

    ``group_rows`` defaults to the stabilizer rows; pass a larger span to
    compute a dressed distance.
    """
    if max_weight > n:
        max_weight = n
    stab = gf2.as_gf2(stabilizer_rows) if len(stabilizer_rows) else np.zeros((0, 2 * n), np.uint8)
    if group_rows is None:
        group_rows = stab
    pair_t = gf2.pairing_matrix(stab).T.astype(np.uint8) if stab.shape[0] else None
    group_rref, group_pivots = gf2.rref(group_rows)

    for w in range(1, max_weight + 1):
        if _weight_class_has_logical(n, w, pair_t, group_rref, group_pivots):
            return DistanceResult(w, exact=True)
    return DistanceResult(max_weight + 1, exact=False)


def _weight_class_has_logical(n, w, pair_t, group_rref, group_pivots) -> bool:
    letters = np.array(list(itertools.product(range(3), repeat=w)), dtype=np.intp)
    letter_bits = _LETTER_XZ[letters]  # (3^w, w, 2)
    combos = list(itertools.combinations(range(n), w))
    chunk_size = max(1, 4096 // max(1, letter_bits.shape[0]))
    chunks = [combos[i : i + chunk_size] for i in range(0, len(combos), chunk_size)]

    def check(chunk) -> bool:
        block = _candidate_block(n, chunk, letter_bits)
        if pair_t is not None:
            syndromes = (block @ pair_t) % 2
            block = block[~syndromes.any(axis=1)]
        if not block.shape[0]:
            return False
        residual = block.copy()
        for r, p in enumerate(group_pivots):
            mask = residual[:, p] == 1
            residual[mask] ^= group_rref[r]
        return bool(residual.any(axis=1).any())

    return any(map_chunks(check, chunks))


def _candidate_block(n, combos, letter_bits) -> np.ndarray:
    per = letter_bits.shape[0]
    block = np.zeros((len(combos) * per, 2 * n), dtype=np.uint8)
    for i, combo in enumerate(combos):
        rows = block[i * per : (i + 1) * per]
        for j, q in enumerate(combo):
            rows[:, q] = letter_bits[:, j, 0]
            rows[:, n + q] = letter_bits[:, j, 1]
    return block


# ---------------------------------------------------------------------------
# gauge fixing


def gauge_fix(code: SubsystemCode, choices, name: str | None = None) -> StabilizerCode:
    """Promote chosen gauge operators to stabilizers.

    ``choices`` holds one entry per gauge qubit: "X" or "Z" appends that gauge
    logical to the generators (dropping its partner); None keeps the pair,
    promoting it to a logical pair of the result.
    """
    r = code.num_gauge_qubits
    if len(choices) != r:
        raise ValueError(f"need exactly {r} gauge choices, got {len(choices)}")
    normalized = []
    for i, c in enumerate(choices):
        if c is None:
            normalized.append(None)
        elif isinstance(c, str) and c.upper() in ("X", "Z"):
            normalized.append(c.upper())
        else:
            raise ValueError(f"gauge choice {i} must be 'X', 'Z' or None, got {c!r}")
    if all(c is None for c in normalized):
        raise ValueError("at least one gauge qubit must be fixed")

    new_gens = list(code.generators)
    fixed_indices = []
    kept_x, kept_z = list(code.logical_xs), list(code.logical_zs)
    for i, c in enumerate(normalized):
        if c is None:
            kept_x.append(code.gauge_xs[i])
            kept_z.append(code.gauge_zs[i])
        else:
            fixed_indices.append(len(new_gens))
            new_gens.append(code.gauge_xs[i] if c == "X" else code.gauge_zs[i])

    result = StabilizerCode(
        name=name or f"{code.name}+fix",
        n=code.n,
        generators=tuple(new_gens),
        logical_xs=tuple(kept_x),
        logical_zs=tuple(kept_z),
        gauge_fixed_indices=tuple(fixed_indices),
    )
    report = validate(result)
    if not report.ok:
        raise ValidationFailure(
            "gauge fix produced an invalid code: "
            + "; ".join(f"{c.name}: {c.detail}" for c in report.failures)
        )
    return result


# ---------------------------------------------------------------------------
# load / save


def save_code(code) -> dict:
    doc = {
        "name": code.name,
        "n": code.n,
        "stabilizers": [str(g) for g in code.generators],
        "logical_x": [str(op) for op in code.logical_xs],
        "logical_z": [str(op) for op in code.logical_zs],
    }
    if isinstance(code, SubsystemCode):
        doc["gauge_x"] = [str(op) for op in code.gauge_xs]
        doc["gauge_z"] = [str(op) for op in code.gauge_zs]
    elif code.gauge_fixed_indices:
        doc["gauge_fixed_stabilizers"] = list(code.gauge_fixed_indices)
    return doc


def load_code(doc: dict, check: bool = True):
    """Build and validate a code from its JSON document.

    Raises SchemaError for structural problems and ValidationFailure when the
    operators do not form a valid code. ``check=False`` skips the validation
    step so callers can produce their own report.
    """
    if not isinstance(doc, dict):
        raise SchemaError("code document must be a JSON object")
    for key in ("name", "n", "stabilizers", "logical_x", "logical_z"):
        if key not in doc:
            raise SchemaError(f"code document missing required key {key!r}")
    name = doc["name"]
    n = doc["n"]
    if not isinstance(name, str) or not isinstance(n, int) or n < 1:
        raise SchemaError("'name' must be a string and 'n' a positive integer")

    def ops(key):
        values = doc[key] if key in doc else []
        if not isinstance(values, list):
            raise SchemaError(f"{key!r} must be a list of Pauli strings")
        parsed = []
        for i, s in enumerate(values):
            op = parse_pauli(s)
            if op.n != n:
                raise SchemaError(f"{key}[{i}] acts on {op.n} qubits, expected {n}")
            parsed.append(op)
        return tuple(parsed)

    has_gauge = "gauge_x" in doc or "gauge_z" in doc
    if has_gauge and ("gauge_x" not in doc or "gauge_z" not in doc):
        raise SchemaError("gauge_x and gauge_z must be given together")

    if has_gauge:
        code = SubsystemCode(
            name=name,
            n=n,
            generators=ops("stabilizers"),
            logical_xs=ops("logical_x"),
            logical_zs=ops("logical_z"),
            gauge_xs=ops("gauge_x"),
            gauge_zs=ops("gauge_z"),
        )
    else:
        fixed = doc.get("gauge_fixed_stabilizers", [])
        if not isinstance(fixed, list) or not all(
            isinstance(i, int) and 0 <= i < len(doc["stabilizers"]) for i in fixed
        ):
            raise SchemaError("'gauge_fixed_stabilizers' must list stabilizer indices")
        code = StabilizerCode(
            name=name,
            n=n,
            generators=ops("stabilizers"),
            logical_xs=ops("logical_x"),
            logical_zs=ops("logical_z"),
            gauge_fixed_indices=tuple(fixed),
        )
    if check:
        report = validate(code)
        if not report.ok:
            raise ValidationFailure(
                "invalid code: " + "; ".join(f"{c.name} ({c.detail})" for c in report.failures)
            )
    return code


def code_hash(code) -> str:
    """Stable content hash of the canonical code document."""
    import hashlib

    payload = json.dumps(save_code(code), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


# ---------------------------------------------------------------------------
# catalog


def _op(n: int, letter: str, support) -> PauliOperator:
    chars = ["I"] * n
    for q in support:
        chars[q] = letter
    return parse_pauli("+" + "".join(chars))


def _toy2() -> StabilizerCode:
    return StabilizerCode(
        name="toy2",
        n=2,
        generators=(parse_pauli("+ZZ"),),
        logical_xs=(parse_pauli("+XX"),),
        logical_zs=(parse_pauli("+ZI"),),
    )


def _ff4() -> StabilizerCode:
    return StabilizerCode(
        name="ff4",
        n=4,
        generators=(parse_pauli("+XXXX"), parse_pauli("+ZZZZ")),
        logical_xs=(parse_pauli("+XXII"), parse_pauli("+XIXI")),
        logical_zs=(parse_pauli("+ZIZI"), parse_pauli("+ZZII")),
    )


def _five() -> StabilizerCode:
    base = "XZZXI"
    gens = tuple(
        parse_pauli("+" + base[-s:] + base[:-s]) for s in range(4)
    )
    return StabilizerCode(
        name="five",
        n=5,
        generators=gens,
        logical_xs=(parse_pauli("+XXXXX"),),
        logical_zs=(parse_pauli("+ZZZZZ"),),
    )


def _hamming_support(n_bits: int, bit: int):
    return [q for q in range(2**n_bits - 1) if (q + 1) >> bit & 1]


def _steane() -> StabilizerCode:
    xs = tuple(_op(7, "X", _hamming_support(3, b)) for b in range(3))
    zs = tuple(_op(7, "Z", _hamming_support(3, b)) for b in range(3))
    return StabilizerCode(
        name="steane",
        n=7,
        generators=xs + zs,
        logical_xs=(_op(7, "X", range(7)),),
        logical_zs=(_op(7, "Z", range(7)),),
    )


def _pair_support(i: int, j: int):
    return [q for q in range(15) if (q + 1) >> i & 1 and (q + 1) >> j & 1]


def _qrm15_parent() -> SubsystemCode:
    xs = tuple(_op(15, "X", _hamming_support(4, b)) for b in range(4))
    zs = tuple(_op(15, "Z", _hamming_support(4, b)) for b in range(4))
    pairs = list(itertools.combinations(range(4), 2))
    gauge_zs = tuple(_op(15, "Z", _pair_support(i, j)) for i, j in pairs)
    gauge_xs = tuple(
        _op(15, "X", _pair_support(*[b for b in range(4) if b not in (i, j)]))
        for i, j in pairs
    )
    return SubsystemCode(
        name="qrm15-parent",
        n=15,
        generators=xs + zs,
        logical_xs=(_op(15, "X", range(15)),),
        logical_zs=(_op(15, "Z", range(15)),),
        gauge_xs=gauge_xs,
        gauge_zs=gauge_zs,
    )


def _qrm15() -> StabilizerCode:
    return gauge_fix(_qrm15_parent(), ["Z"] * 6, name="qrm15")


_CATALOG_BUILDERS = {
    "toy2": _toy2,
    "ff4": _ff4,
    "five": _five,
    "steane": _steane,
    "qrm15": _qrm15,
    "qrm15-parent": _qrm15_parent,
}

_CATALOG_BLURBS = {
    "toy2": "two-qubit worked-example code",
    "ff4": "four-qubit error-detecting code",
    "five": "five-qubit perfect code",
    "steane": "seven-qubit CSS code from the [7,4] Hamming code",
    "qrm15": "15-qubit punctured Reed-Muller code (transversal T)",
    "qrm15-parent": "15-qubit subsystem parent of qrm15 with six gauge qubits",
}

_catalog_cache: dict = {}


def catalog_names() -> tuple[str, ...]:
    return tuple(_CATALOG_BUILDERS)


def catalog_code(name: str):
    if name not in _CATALOG_BUILDERS:
        raise KeyError(f"unknown catalog code {name!r}; have {', '.join(_CATALOG_BUILDERS)}")
    if name not in _catalog_cache:
        _catalog_cache[name] = _CATALOG_BUILDERS[name]()
    return _catalog_cache[name]


def catalog_blurb(name: str) -> str:
    return _CATALOG_BLURBS.get(name, "")
