"""Command-line surface: codes, validate, synthesize, simulate, distance.

Exit codes: 0 on success, 1 on a verification or constraint failure, 2 on a
usage or input error. Reports are human-readable text by default; --json
emits the full report object. Verdict fields are deterministic for identical
inputs; wall-clock timings live in a separate "timings" section. The env var
REWIRE_THREADS caps internal parallelism (0 = auto).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from . import codes as code_model
from .codes import (
    catalog_blurb,
    catalog_code,
    catalog_names,
    code_hash,
    distance,
    load_code,
    save_code,
    validate,
)
from .compiler import Schedule, compile_program, parse_program, verify_schedule
from .errors import (
    DistanceBudgetError,
    PauliParseError,
    RewireError,
    SchemaError,
    SynthesisError,
    ValidationFailure,
)
from .oracle import oracle_action

_USAGE_ERROR = 2
_CHECK_FAILED = 1


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "verdicts": self.verdicts,
            "timings": self.timings,
            "artifacts": self.artifacts,
        }

    def emit(self, as_json: bool) -> None:
        if as_json:
            print(json.dumps(self.to_json(), indent=2, sort_keys=True))
            return
        for key, value in self.verdicts.items():
            if isinstance(value, list):
                print(f"{key}:")
                for item in value:
                    print(f"  - {item}")
            else:
                print(f"{key}: {value}")
        for path in self.artifacts:
            print(f"wrote {path}")


def _resolve_code(spec: str):
    if spec in catalog_names():
        return catalog_code(spec)
    try:
        with open(spec, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"{spec!r} is neither a catalog code nor a readable file") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON in {spec}: {exc}") from exc
    return load_code(doc)


def _distance_label(code) -> str:
    result = distance(code, max_weight=min(4, code.n))
    return str(result)


def cmd_codes(args) -> int:
    if args.action == "list":
        report = Report(command="codes list")
        listing = []
        for name in catalog_names():
            code = catalog_code(name)
            label = f"[[{code.n},{code.k},{_distance_label(code)}]]"
            listing.append(f"{name}  {label}  {catalog_blurb(name)}")
        report.verdicts["catalog"] = listing
        report.emit(args.json)
        return 0
    try:
        code = catalog_code(args.name)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    print(json.dumps(save_code(code), indent=2, sort_keys=True))
    return 0


def cmd_validate(args) -> int:
    started = time.perf_counter()
    with open(args.code, encoding="utf-8") as fh:
        doc = json.load(fh)
    code = load_code(doc, check=False)
    report_obj = validate(code)
    report = Report(command="validate", inputs={"code": code_hash(code)})
    report.verdicts["code"] = code.name
    report.verdicts["valid"] = report_obj.ok
    if not report_obj.ok:
        report.verdicts["violations"] = [
            f"{c.name}: {c.detail}" if c.detail else c.name for c in report_obj.failures
        ]
    report.timings["total_s"] = round(time.perf_counter() - started, 6)
    report.emit(args.json)
    return 0 if report_obj.ok else _CHECK_FAILED


def cmd_synthesize(args) -> int:
    started = time.perf_counter()
    code = _resolve_code(args.code)
    gm = args.gm
    if gm not in ("last", "gauge"):
        gm = int(gm)
    report = Report(command="synthesize", inputs={"code": code_hash(code)})
    report.verdicts["code"] = code.name
    report.verdicts["program"] = args.program
    try:
        schedule = compile_program(
            code,
            args.program,
            min_distance=args.min_distance,
            gm=gm,
            budget=args.budget,
        )
    except DistanceBudgetError as exc:
        report.verdicts["synthesized"] = False
        report.verdicts["failure"] = str(exc)
        report.verdicts["best_found"] = exc.best
        report.timings["total_s"] = round(time.perf_counter() - started, 6)
        report.emit(args.json)
        return _CHECK_FAILED
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(schedule.dumps() + "\n")
    report.artifacts.append(args.out)
    report.verdicts["synthesized"] = True
    report.verdicts["measurements"] = len(schedule.steps)
    report.verdicts["min_intermediate_distance"] = min(
        (entry.distance.value for entry in schedule.audit), default=None
    )
    report.verdicts["claimed_action"] = schedule.claimed_action.to_json()
    report.timings["total_s"] = round(time.perf_counter() - started, 6)
    report.emit(args.json)
    return 0


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    code = _resolve_code(args.code)
    with open(args.schedule, encoding="utf-8") as fh:
        schedule = Schedule.loads(fh.read())
    branches = args.branches[0] if args.branches else "all"
    samples = int(args.branches[1]) if args.branches and len(args.branches) > 1 else 20
    expected = parse_program(args.expect, k=code.k) if args.expect else None

    verdict = verify_schedule(
        code, schedule, expected, branches=branches, samples=samples
    )
    report = Report(
        command="simulate",
        inputs={"code": code_hash(code), "schedule": schedule.code_sha256},
    )
    report.verdicts["schedule_valid"] = verdict.ok
    if verdict.discrepancies:
        report.verdicts["discrepancies"] = list(verdict.discrepancies)
    ok = verdict.ok
    if args.oracle:
        action = oracle_action(code, schedule)
        agreed = action == schedule.claimed_action
        report.verdicts["oracle_agrees"] = agreed
        ok = ok and agreed
    report.timings["total_s"] = round(time.perf_counter() - started, 6)
    report.emit(args.json)
    return 0 if ok else _CHECK_FAILED


def cmd_distance(args) -> int:
    started = time.perf_counter()
    code = _resolve_code(args.code)
    result = distance(code, max_weight=args.max_weight)
    report = Report(command="distance", inputs={"code": code_hash(code)})
    report.verdicts["code"] = code.name
    report.verdicts["distance"] = result.to_json()
    report.verdicts["display"] = str(result)
    report.timings["total_s"] = round(time.perf_counter() - started, 6)
    report.emit(args.json)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rewire",
        description="Compile logical Clifford gates into measure-and-correct "
        "schedules on stabilizer codes, and verify them.",
        epilog="REWIRE_THREADS caps internal parallelism (0 = auto).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    codes_p = sub.add_parser("codes", help="list or show built-in codes")
    codes_sub = codes_p.add_subparsers(dest="action", required=True)
    codes_sub.add_parser("list", help="list catalog codes").add_argument(
        "--json", action="store_true"
    )
    show = codes_sub.add_parser("show", help="emit a catalog code document")
    show.add_argument("name")

    val = sub.add_parser("validate", help="validate a code file")
    val.add_argument("--code", required=True, help="path to a code JSON file")
    val.add_argument("--json", action="store_true")

    syn = sub.add_parser("synthesize", help="compile a gate program to a schedule")
    syn.add_argument("--code", required=True, help="catalog name or code file")
    syn.add_argument("--program", required=True, help='e.g. "H 0; CNOT 0 1"')
    syn.add_argument("--min-distance", type=int, default=None)
    syn.add_argument("--gm", default="last", help='"last", "gauge", or a 1-based index')
    syn.add_argument("--budget", type=int, default=128)
    syn.add_argument("--out", required=True, help="schedule JSON output path")
    syn.add_argument("--json", action="store_true")

    sim = sub.add_parser("simulate", help="re-simulate and verify a schedule")
    sim.add_argument("--code", required=True)
    sim.add_argument("--schedule", required=True)
    sim.add_argument(
        "--branches",
        nargs="+",
        default=["all"],
        metavar=("MODE", "N"),
        help='"all", "none", or "sample N"',
    )
    sim.add_argument("--oracle", action="store_true", help="dense statevector cross-check")
    sim.add_argument("--expect", default=None, help="gate program the schedule should implement")
    sim.add_argument("--json", action="store_true")

    dist = sub.add_parser("distance", help="brute-force code distance")
    dist.add_argument("--code", required=True)
    dist.add_argument("--max-weight", type=int, default=4)
    dist.add_argument("--json", action="store_true")
    return parser


_HANDLERS = {
    "codes": cmd_codes,
    "validate": cmd_validate,
    "synthesize": cmd_synthesize,
    "simulate": cmd_simulate,
    "distance": cmd_distance,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and args.branches:
        mode = args.branches[0]
        if mode not in ("all", "none", "sample") or (
            mode == "sample" and len(args.branches) != 2
        ):
            parser.error('--branches takes "all", "none", or "sample N"')
    try:
        return _HANDLERS[args.command](args)
    except (SchemaError, ValidationFailure, PauliParseError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    except (SynthesisError, RewireError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
