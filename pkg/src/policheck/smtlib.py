"""SMT-LIB2 emission and external-solver subprocess driver.

An implication query "does P imply Q?" is rendered as a quantifier-free
string problem: one String variable per flattened component, charset and
length domains as bounded regular-expression memberships, glob atoms as
regex memberships, enum atoms as equality disjunctions, and the assertion
``P and not Q``.  ``unsat`` therefore means the implication is Valid and a
model of ``sat`` decodes into a counterexample request.

The emitted grammar is deliberately narrow and documented in the README;
any solver speaking standard SMT-LIB2 strings (z3, cvc5, ...) works.
"""

from __future__ import annotations

import os
import subprocess
import tempfile
import time
from dataclasses import dataclass

from .core import (
    MatchingStrategy,
    PolicySet,
    PolicyType,
    Request,
    StringComponentDef,
    StringEnumComponentDef,
    WILDCARD,
    _match_prevalidated,
    permitted,
)
from .errors import ModelParseError, SolverSpawnFailure, TypeMismatch
from .formula import And, Atom, FalseFormula, Formula, Not, Or, TrueFormula, encode_policy_set
from .automata.solve import Budget, Verdict, VerdictKind, VerdictStats


@dataclass(frozen=True)
class SolverConfig:
    """How to run one external solver: executable, args, wall-clock timeout.

    If any argument contains ``{file}`` the script is written to a temporary
    file and the placeholder substituted; otherwise the script is piped to
    the solver's stdin.
    """

    executable: str
    args: tuple[str, ...] = ()
    timeout: float = 60.0
    name: str = ""

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("solver timeout must be positive")

    @property
    def label(self) -> str:
        return self.name or os.path.basename(self.executable)


@dataclass(frozen=True)
class SmtScript:
    text: str
    variable_map: tuple[tuple[str, str], ...]  # component path -> variable name
    logic: str
    policy_type: PolicyType

    def variable_for(self, path: str) -> str:
        for p, v in self.variable_map:
            if p == path:
                return v
        raise KeyError(path)


def _smt_quote(s: str) -> str:
    out = []
    for c in s:
        if c == '"':
            out.append('""')
        elif 0x20 <= ord(c) <= 0x7E:
            out.append(c)
        else:
            out.append("\\u{%x}" % ord(c))
    return '"' + "".join(out) + '"'


def _smt_unquote(lit: str) -> str:
    if len(lit) < 2 or lit[0] != '"' or lit[-1] != '"':
        raise ModelParseError(f"not a string literal: {lit!r}")
    body = lit[1:-1]
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == '"':
            if i + 1 < len(body) and body[i + 1] == '"':
                out.append('"')
                i += 2
                continue
            raise ModelParseError(f"stray quote in string literal: {lit!r}")
        if c == "\\" and body[i : i + 3] == "\\u{":
            end = body.find("}", i + 3)
            if end < 0:
                raise ModelParseError(f"unterminated unicode escape: {lit!r}")
            out.append(chr(int(body[i + 3 : end], 16)))
            i = end + 1
            continue
        if c == "\\" and i + 5 < len(body) and body[i + 1] == "u":
            out.append(chr(int(body[i + 2 : i + 6], 16)))
            i += 6
            continue
        out.append(c)
        i += 1
    return "".join(out)


def _charset_regex(chars: tuple[str, ...]) -> str:
    """Union of contiguous codepoint ranges; compact and solver-friendly."""
    if not chars:
        return "re.none"
    cps = sorted(ord(c) for c in chars)
    runs: list[tuple[int, int]] = []
    lo = hi = cps[0]
    for cp in cps[1:]:
        if cp == hi + 1:
            hi = cp
        else:
            runs.append((lo, hi))
            lo = hi = cp
    runs.append((lo, hi))
    pieces = []
    for lo, hi in runs:
        if lo == hi:
            pieces.append(f"(str.to_re {_smt_quote(chr(lo))})")
        else:
            pieces.append(f"(re.range {_smt_quote(chr(lo))} {_smt_quote(chr(hi))})")
    if len(pieces) == 1:
        return pieces[0]
    return "(re.union " + " ".join(pieces) + ")"


def _glob_regex(comp: StringComponentDef, pattern: str) -> str:
    cs = _charset_regex(comp.charset.concrete_chars)
    loop = f"((_ re.loop 0 {comp.max_len}) {cs})"
    pieces: list[str] = []
    for i, seg in enumerate(pattern.split(WILDCARD)):
        if i > 0:
            pieces.append(loop)
        if seg:
            pieces.append(f"(str.to_re {_smt_quote(seg)})")
    if not pieces:
        return f"(str.to_re {_smt_quote('')})"
    if len(pieces) == 1:
        return pieces[0]
    return "(re.++ " + " ".join(pieces) + ")"


def _atom_term(atom: Atom, var: str) -> str:
    comp = atom.domain
    if isinstance(comp, StringEnumComponentDef):
        if WILDCARD not in atom.pattern:
            members = [atom.pattern]
        else:
            members = [
                v for v in comp.values if _match_prevalidated(comp, atom.pattern, v)
            ]
        if not members:
            return "false"
        eqs = [f"(= {var} {_smt_quote(m)})" for m in members]
        return eqs[0] if len(eqs) == 1 else "(or " + " ".join(eqs) + ")"
    if comp.strategy is MatchingStrategy.EXACT or WILDCARD not in atom.pattern:
        return f"(= {var} {_smt_quote(atom.pattern)})"
    return f"(str.in_re {var} {_glob_regex(comp, atom.pattern)})"


def _formula_term(f: Formula, varmap: dict[str, str]) -> str:
    if isinstance(f, TrueFormula):
        return "true"
    if isinstance(f, FalseFormula):
        return "false"
    if isinstance(f, Atom):
        return _atom_term(f, varmap[f.component_path])
    if isinstance(f, Not):
        return f"(not {_formula_term(f.child, varmap)})"
    if isinstance(f, And):
        return "(and " + " ".join(_formula_term(c, varmap) for c in f.children) + ")"
    if isinstance(f, Or):
        return "(or " + " ".join(_formula_term(c, varmap) for c in f.children) + ")"
    raise TypeError(f"not a formula: {f!r}")


def emit_implication(p: PolicySet, q: PolicySet) -> SmtScript:
    """Script whose satisfiability refutes "P implies Q".

    ``unsat`` means Valid; a model of ``sat`` is a counterexample request.
    Output is byte-identical for identical inputs.
    """
    if p.policy_type != q.policy_type:
        raise TypeMismatch("policy sets have different policy types")
    pt = p.policy_type
    varmap = {path: path for path, _ in pt.flat_components}
    lines = [
        "(set-option :produce-models true)",
        "(set-logic QF_S)",
    ]
    for path, _ in pt.flat_components:
        lines.append(f"(declare-fun {varmap[path]} () String)")
    for path, comp in pt.flat_components:
        var = varmap[path]
        if isinstance(comp, StringEnumComponentDef):
            eqs = [f"(= {var} {_smt_quote(v)})" for v in comp.values]
            dom = eqs[0] if len(eqs) == 1 else "(or " + " ".join(eqs) + ")"
            lines.append(f"(assert {dom})")
        else:
            cs = _charset_regex(comp.charset.concrete_chars)
            lines.append(f"(assert (str.in_re {var} ((_ re.loop 0 {comp.max_len}) {cs})))")
    lines.append(f"(assert {_formula_term(encode_policy_set(p), varmap)})")
    lines.append(f"(assert (not {_formula_term(encode_policy_set(q), varmap)}))")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return SmtScript(
        text="\n".join(lines) + "\n",
        variable_map=tuple(varmap.items()),
        logic="QF_S",
        policy_type=pt,
    )


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c in "()":
            tokens.append(c)
            i += 1
        elif c.isspace():
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == '"':
            j = i + 1
            while j < n:
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        j += 2
                        continue
                    break
                j += 1
            if j >= n:
                raise ModelParseError("unterminated string literal in solver output")
            tokens.append(text[i : j + 1])
            i = j + 1
        elif c == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise ModelParseError("unterminated quoted symbol in solver output")
            tokens.append(text[i : j + 1])
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '();"|':
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


def _parse_sexprs(tokens: list[str]) -> list:
    out: list = []
    stack: list[list] = [out]
    for tok in tokens:
        if tok == "(":
            node: list = []
            stack[-1].append(node)
            stack.append(node)
        elif tok == ")":
            if len(stack) == 1:
                raise ModelParseError("unbalanced parentheses in solver output")
            stack.pop()
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ModelParseError("unbalanced parentheses in solver output")
    return out


def _collect_model_values(nodes: list, acc: dict[str, str]) -> None:
    for node in nodes:
        if not isinstance(node, list):
            continue
        if len(node) >= 5 and node[0] == "define-fun" and node[3] == "String":
            name = node[1]
            if isinstance(name, str) and name.startswith("|") and name.endswith("|"):
                name = name[1:-1]
            value = node[4]
            if isinstance(name, str) and isinstance(value, str) and value.startswith('"'):
                acc[name] = _smt_unquote(value)
        else:
            _collect_model_values(node, acc)


def _default_value(comp) -> str:
    if isinstance(comp, StringEnumComponentDef):
        return comp.values[0]
    return ""


def _decode_model(script: SmtScript, model_text: str) -> Request:
    values_by_var: dict[str, str] = {}
    _collect_model_values(_parse_sexprs(_tokenize(model_text)), values_by_var)
    values = []
    for path, comp in script.policy_type.flat_components:
        var = script.variable_for(path)
        values.append(values_by_var.get(var, _default_value(comp)))
    try:
        return Request(script.policy_type, tuple(values))
    except Exception as exc:
        raise ModelParseError(f"model does not form a valid request: {exc}") from exc


def run_solver(script: SmtScript, cfg: SolverConfig) -> Verdict:
    """Execute one solver subprocess on the script and decode its verdict.

    ``unsat`` maps to Valid, ``sat`` to Invalid with the model decoded as a
    counterexample, anything else (including timeout, crash, or unparsable
    output) to Unknown with a reason.  The subprocess is always reaped.
    """
    t0 = time.monotonic()
    uses_file = any("{file}" in a for a in cfg.args)
    tmp_path = None
    argv = [cfg.executable]
    try:
        if uses_file:
            fd, tmp_path = tempfile.mkstemp(suffix=".smt2", text=True)
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(script.text)
            argv += [a.replace("{file}", tmp_path) for a in cfg.args]
        else:
            argv += list(cfg.args)
        try:
            proc = subprocess.Popen(
                argv,
                stdin=None if uses_file else subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
            )
        except OSError as exc:
            raise SolverSpawnFailure(f"cannot start solver {cfg.executable!r}: {exc}") from exc
        try:
            stdout, _ = proc.communicate(
                input=None if uses_file else script.text, timeout=cfg.timeout
            )
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.communicate()
            return Verdict(
                VerdictKind.UNKNOWN,
                reason="timeout",
                stats=VerdictStats(0, time.monotonic() - t0),
            )
        finally:
            if proc.poll() is None:
                proc.kill()
                proc.communicate()
    finally:
        if tmp_path is not None:
            try:
                os.unlink(tmp_path)
            except OSError:
                pass

    elapsed = time.monotonic() - t0
    stats = VerdictStats(0, elapsed)
    verdict_line = None
    rest_start = 0
    pos = 0
    for line in stdout.splitlines(keepends=True):
        word = line.strip()
        pos += len(line)
        if word in ("sat", "unsat", "unknown"):
            verdict_line = word
            rest_start = pos
            break
    if verdict_line is None:
        rc = proc.returncode
        reason = f"solver-exit-{rc}" if rc != 0 else "no-verdict"
        return Verdict(VerdictKind.UNKNOWN, reason=reason, stats=stats)
    if verdict_line == "unsat":
        return Verdict(VerdictKind.VALID, stats=stats)
    if verdict_line == "unknown":
        return Verdict(VerdictKind.UNKNOWN, reason="solver-reported-unknown", stats=stats)
    try:
        cex = _decode_model(script, stdout[rest_start:])
    except ModelParseError as exc:
        return Verdict(VerdictKind.UNKNOWN, reason=f"model-parse-error: {exc}", stats=stats)
    return Verdict(VerdictKind.INVALID, counterexample=cex, stats=stats)


class SmtBackend:
    """Implication backend that shells out to one configured SMT solver.

    A ``sat`` model is re-checked against the reference evaluator before it
    is reported: a solver whose model does not actually witness the failure
    yields Unknown instead of a bogus Invalid.
    """

    def __init__(self, config: SolverConfig):
        self.config = config

    @property
    def name(self) -> str:
        return f"smt:{self.config.label}"

    def check_implication(
        self, p: PolicySet, q: PolicySet, budget: Budget | None = None
    ) -> Verdict:
        script = emit_implication(p, q)
        cfg = self.config
        if budget is not None and budget.timeout != cfg.timeout:
            cfg = SolverConfig(cfg.executable, cfg.args, budget.timeout, cfg.name)
        verdict = run_solver(script, cfg)
        if verdict.is_invalid:
            cex = verdict.counterexample
            if not (permitted(p, cex) and not permitted(q, cex)):
                return Verdict(
                    VerdictKind.UNKNOWN,
                    reason="model-validation-failed",
                    stats=verdict.stats,
                )
        return verdict
