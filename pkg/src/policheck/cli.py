"""Command-line front end: check, bench, convert, emit-smt.

Exit codes for ``check``: 0 the implication is valid, 1 invalid (the
counterexample is printed as JSON), 2 unknown, 3 and up usage or IO errors.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from pathlib import Path

from .automata.solve import Budget, NativeBackend, warm_up
from .bench import CSV_COMMENT, CSV_HEADER, FAMILIES, run_point
from .cloud import default_registry, perm_specs_to_policy_set, read_perms_file
from .errors import PolicyError, TypeMismatch
from .policyjson import dump_policy_json, load_policy_json, load_registry_config
from .smtlib import SmtBackend, SolverConfig, emit_implication

EXIT_VALID = 0
EXIT_INVALID = 1
EXIT_UNKNOWN = 2
EXIT_ERROR = 3


class _Parser(argparse.ArgumentParser):
    # usage errors must not collide with the verdict exit codes
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def _build_parser() -> _Parser:
    parser = _Parser(prog="policheck", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("check", help="decide whether one policy set implies another")
    pc.add_argument("--policies", required=True, help="policy JSON for the left side (P)")
    pc.add_argument("--against", required=True, help="policy JSON for the right side (Q)")
    pc.add_argument("--direction", choices=("pq", "qp"), default="pq")
    pc.add_argument("--backend", choices=("native", "smt"), default="native")
    pc.add_argument("--solver-cmd", help="external solver command line (smt backend)")
    pc.add_argument("--timeout", type=float, default=60.0, help="seconds per query")
    pc.add_argument("--max-states", type=int, default=1_000_000)
    pc.add_argument("--registry", help="JSON config with tenant/service enumerations")

    pb = sub.add_parser("bench", help="run a benchmark family, CSV on stdout")
    pb.add_argument("--family", choices=FAMILIES, required=True)
    pb.add_argument("--n", required=True, help="comma-separated sizes, e.g. 10,100,1000")
    pb.add_argument("--backend", choices=("native", "smt"), default="native")
    pb.add_argument("--solver-cmd")
    pb.add_argument("--repeats", type=int, default=1)
    pb.add_argument("--timeout", type=float, default=60.0)
    pb.add_argument("--max-states", type=int, default=1_000_000)

    pv = sub.add_parser("convert", help="convert a .perms file to policy JSON")
    pv.add_argument("--input", required=True, help="perm-spec lines, one per line")
    pv.add_argument("--tenant", required=True, help="tenant of the principals")
    pv.add_argument("--decision", choices=("allow", "deny"), default="allow")
    pv.add_argument("--username", help="username for lines that do not carry one")
    pv.add_argument("--registry", help="JSON config with tenant/service enumerations")
    pv.add_argument("-o", "--output", help="write here instead of stdout")

    pe = sub.add_parser("emit-smt", help="write the SMT-LIB2 problem for an implication")
    pe.add_argument("--policies", required=True)
    pe.add_argument("--against", required=True)
    pe.add_argument("--registry")
    pe.add_argument("-o", "--output", required=True)
    return parser


def _load_registry(path: str | None):
    if path is None:
        return default_registry()
    return load_registry_config(Path(path).read_bytes())


def _load_sets(args, registry):
    p = load_policy_json(Path(args.policies).read_bytes(), registry)
    q = load_policy_json(Path(args.against).read_bytes(), registry)
    if p.policy_type != q.policy_type:
        raise TypeMismatch(
            f"--policies is {p.policy_type.name!r} but --against is "
            f"{q.policy_type.name!r}"
        )
    return p, q


def _make_backend(args):
    if args.backend == "native":
        return NativeBackend()
    if not args.solver_cmd:
        raise PolicyError("--backend smt requires --solver-cmd")
    parts = shlex.split(args.solver_cmd)
    if not parts:
        raise PolicyError("--solver-cmd is empty")
    return SmtBackend(
        SolverConfig(executable=parts[0], args=tuple(parts[1:]), timeout=args.timeout)
    )


def _counterexample_json(cex) -> str:
    obj = {path: cex.value_for(path) for path, _ in cex.policy_type.flat_components}
    return json.dumps(obj)


def cmd_check(args) -> int:
    registry = _load_registry(args.registry)
    p, q = _load_sets(args, registry)
    if args.direction == "qp":
        p, q = q, p
    backend = _make_backend(args)
    budget = Budget(max_states=args.max_states, timeout=args.timeout)
    verdict = backend.check_implication(p, q, budget)
    if verdict.is_valid:
        print("valid")
        return EXIT_VALID
    if verdict.is_invalid:
        print("invalid")
        print(_counterexample_json(verdict.counterexample))
        return EXIT_INVALID
    print(f"unknown ({verdict.reason})")
    return EXIT_UNKNOWN


def cmd_bench(args) -> int:
    try:
        sizes = [int(tok) for tok in args.n.split(",") if tok.strip()]
    except ValueError:
        raise PolicyError(f"--n must be a comma-separated integer list: {args.n!r}")
    if not sizes or any(s < 1 for s in sizes):
        raise PolicyError("--n sizes must be positive")
    if args.repeats < 1:
        raise PolicyError("--repeats must be positive")
    backend = _make_backend(args)
    budget = Budget(max_states=args.max_states, timeout=args.timeout)
    if args.backend == "native":
        warm_up()
    print(CSV_COMMENT)
    print(CSV_HEADER)
    for n in sizes:
        for repeat in range(args.repeats):
            record = run_point(args.family, n, repeat, backend, budget)
            print(record.to_csv_row(), flush=True)
    return 0


def cmd_convert(args) -> int:
    registry = _load_registry(args.registry)
    pt = registry["tapis_files"]
    text = Path(args.input).read_text(encoding="utf-8")
    pairs = read_perms_file(text, default_username=args.username)
    entries = [(username, args.tenant, raw) for username, raw in pairs]
    ps = perm_specs_to_policy_set(entries, pt, decision=args.decision)
    doc = dump_policy_json(ps)
    if args.output:
        Path(args.output).write_text(doc, encoding="utf-8")
    else:
        sys.stdout.write(doc)
    return 0


def cmd_emit_smt(args) -> int:
    registry = _load_registry(args.registry)
    p, q = _load_sets(args, registry)
    script = emit_implication(p, q)
    Path(args.output).write_text(script.text, encoding="utf-8")
    return 0


_COMMANDS = {
    "check": cmd_check,
    "bench": cmd_bench,
    "convert": cmd_convert,
    "emit-smt": cmd_emit_smt,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_ERROR
    except PolicyError as exc:
        print(f"policheck: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"policheck: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
