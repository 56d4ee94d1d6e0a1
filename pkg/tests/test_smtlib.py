"""Script emission, model parsing, and the solver subprocess driver."""

import random
import shutil
import subprocess
import sys
import time

import psutil
import pytest

from conftest import solver_cmd
from helpers import random_policy_set, small_string_type
from policheck import (
    CharSet,
    MatchingStrategy,
    Policy,
    PolicySet,
    PolicyType,
    StringComponentDef,
    StringEnumComponentDef,
    permitted,
)
from policheck.automata import Budget, VerdictKind, brute_force_implication
from policheck.errors import SolverSpawnFailure, TypeMismatch
from policheck.smtlib import (
    SmtBackend,
    SmtScript,
    SolverConfig,
    _smt_quote,
    _smt_unquote,
    emit_implication,
    run_solver,
)

W = MatchingStrategy.WILDCARD


def _backend(name: str, timeout: float = 20.0) -> SmtBackend:
    exe, args = solver_cmd(name)
    return SmtBackend(SolverConfig(executable=exe, args=args, timeout=timeout, name=name))


@pytest.fixture(scope="module")
def tiny_sets():
    comp = StringComponentDef("x", CharSet.from_string("ab*"), 2, W)
    en = StringEnumComponentDef("m", ("GET", "POST"), W)
    pt = PolicyType("tiny", (comp, en))
    p = PolicySet(pt, (Policy(pt, ("a*", "GET"), "allow"),))
    q = PolicySet(
        pt,
        (Policy(pt, ("*", "*"), "allow"), Policy(pt, ("ab", "*"), "deny")),
    )
    return p, q


GOLDEN_TINY_PQ = """\
(set-option :produce-models true)
(set-logic QF_S)
(declare-fun x () String)
(declare-fun m () String)
(assert (str.in_re x ((_ re.loop 0 2) (re.range "a" "b"))))
(assert (or (= m "GET") (= m "POST")))
(assert (or (and (str.in_re x (re.++ (str.to_re "a") ((_ re.loop 0 2) (re.range "a" "b")))) (= m "GET"))))
(assert (not (and (or (and (str.in_re x ((_ re.loop 0 2) (re.range "a" "b"))) (or (= m "GET") (= m "POST")))) (not (or (and (= x "ab") (or (= m "GET") (= m "POST"))))))))
(check-sat)
(get-model)
"""


class TestEmission:
    def test_golden_script(self, tiny_sets):
        p, q = tiny_sets
        assert emit_implication(p, q).text == GOLDEN_TINY_PQ

    def test_byte_identical_across_runs(self, tiny_sets):
        p, q = tiny_sets
        assert emit_implication(p, q).text == emit_implication(p, q).text

    def test_empty_allow_asserts_false(self, tiny_sets):
        p, _ = tiny_sets
        empty = PolicySet(p.policy_type, ())
        script = emit_implication(empty, empty)
        assert "(assert false)" in script.text
        assert "(assert (not false))" in script.text

    def test_single_check_sat_and_models_enabled(self, tiny_sets):
        p, q = tiny_sets
        text = emit_implication(p, q).text
        assert text.count("(check-sat)") == 1
        assert text.count("(set-logic") == 1
        assert "(set-option :produce-models true)" in text

    def test_one_variable_per_flat_component(self, cliff2):
        p, q = cliff2
        script = emit_implication(p, q)
        assert [path for path, _ in script.variable_map] == ["user", "path", "action"]
        assert script.text.count("declare-fun") == 3

    def test_type_mismatch(self, tiny_sets, cliff2):
        p, _ = tiny_sets
        q, _ = cliff2
        with pytest.raises(TypeMismatch):
            emit_implication(p, q)

    def test_charset_ranges_are_merged(self, cliff1):
        p, q = cliff1
        text = emit_implication(p, q).text
        assert '(re.range "0" "9")' in text
        assert '(re.range "a" "z")' in text


class TestQuoting:
    def test_round_trip_plain(self):
        for s in ("", "abc", "a b", "/path/x"):
            assert _smt_unquote(_smt_quote(s)) == s

    def test_round_trip_quotes_and_unicode(self):
        for s in ('say "hi"', "café", "☃", 'mix "q" ü'):
            assert _smt_unquote(_smt_quote(s)) == s

    def test_unquote_doubled_quote(self):
        assert _smt_unquote('"a""b"') == 'a"b'

    def test_unquote_unicode_escape(self):
        assert _smt_unquote('"\\u{2603}"') == "☃"
        assert _smt_unquote('"\\u0041"') == "A"


class TestRunSolver:
    def test_unsat_maps_to_valid(self, tiny_sets):
        p, q = tiny_sets
        v = run_solver(emit_implication(p, q), _backend("unsat.py").config)
        assert v.kind is VerdictKind.VALID

    def test_sat_model_decodes(self, tiny_sets):
        p, q = tiny_sets
        v = run_solver(emit_implication(p, q), _backend("refsolver.py").config)
        assert v.kind is VerdictKind.INVALID
        cex = v.counterexample
        assert permitted(p, cex) and not permitted(q, cex)

    def test_unknown_stub(self, tiny_sets):
        p, q = tiny_sets
        v = run_solver(emit_implication(p, q), _backend("unknown.py").config)
        assert v.kind is VerdictKind.UNKNOWN
        assert v.reason == "solver-reported-unknown"

    def test_timeout_kills_and_reports(self, tiny_sets):
        p, q = tiny_sets
        cfg = _backend("hang.py", timeout=1.5).config
        t0 = time.monotonic()
        v = run_solver(emit_implication(p, q), cfg)
        assert v.kind is VerdictKind.UNKNOWN
        assert v.reason == "timeout"
        assert time.monotonic() - t0 < 10

    def test_no_zombie_after_timeout(self, tiny_sets):
        p, q = tiny_sets
        me = psutil.Process()
        before = {c.pid for c in me.children(recursive=True)}
        run_solver(emit_implication(p, q), _backend("hang.py", timeout=1.0).config)
        leftover = [
            c for c in me.children(recursive=True)
            if c.pid not in before and c.is_running() and c.status() != psutil.STATUS_ZOMBIE
        ]
        assert leftover == []

    def test_crash_reports_exit_code(self, tiny_sets):
        p, q = tiny_sets
        v = run_solver(emit_implication(p, q), _backend("crash.py").config)
        assert v.kind is VerdictKind.UNKNOWN
        assert v.reason == "solver-exit-4"

    def test_garbage_model_is_unknown(self, tiny_sets):
        p, q = tiny_sets
        v = run_solver(emit_implication(p, q), _backend("badmodel.py").config)
        assert v.kind is VerdictKind.UNKNOWN
        assert v.reason.startswith("model-parse-error")

    def test_spawn_failure_raises(self, tiny_sets):
        p, q = tiny_sets
        cfg = SolverConfig(executable="/nonexistent/solver-binary", timeout=5.0)
        with pytest.raises(SolverSpawnFailure):
            run_solver(emit_implication(p, q), cfg)

    def test_file_argument_mode(self, tiny_sets):
        p, q = tiny_sets
        exe, args = solver_cmd("refsolver.py")
        cfg = SolverConfig(executable=exe, args=args + ("{file}",), timeout=20.0)
        v = run_solver(emit_implication(p, q), cfg)
        assert v.kind is VerdictKind.INVALID


class TestModelParsing:
    def _script(self, pt) -> SmtScript:
        return emit_implication(PolicySet(pt, ()), PolicySet(pt, ()))

    def test_z3_style_model_wrapper(self, tiny_sets):
        p, _ = tiny_sets
        script = self._script(p.policy_type)
        out = 'sat\n(model\n  (define-fun x () String "ab")\n  (define-fun m () String "GET")\n)\n'
        from policheck.smtlib import _decode_model

        cex = _decode_model(script, out.split("\n", 1)[1])
        assert cex.values == ("ab", "GET")

    def test_missing_variable_defaults(self, tiny_sets):
        p, _ = tiny_sets
        script = self._script(p.policy_type)
        from policheck.smtlib import _decode_model

        cex = _decode_model(script, '((define-fun m () String "POST"))')
        assert cex.values == ("", "POST")

    def test_quoted_symbol_names(self, tiny_sets):
        p, _ = tiny_sets
        script = self._script(p.policy_type)
        from policheck.smtlib import _decode_model

        cex = _decode_model(script, '((define-fun |x| () String "a"))')
        assert cex.values == ("a", "GET")


class TestSmtBackend:
    def test_valid_via_reference_solver(self):
        pt = small_string_type(chars="ab*", max_len=2)
        p = PolicySet(pt, (Policy(pt, ("a",), "allow"),))
        q = PolicySet(pt, (Policy(pt, ("*",), "allow"),))
        v = _backend("refsolver.py").check_implication(p, q)
        assert v.kind is VerdictKind.VALID

    def test_lying_sat_is_downgraded(self, tiny_sets):
        p, q = tiny_sets
        # q => q holds, so any sat answer cannot carry a real witness
        v = _backend("satlie.py").check_implication(q, q)
        assert v.kind is VerdictKind.UNKNOWN
        assert v.reason == "model-validation-failed"

    def test_budget_timeout_overrides_config(self, tiny_sets):
        p, q = tiny_sets
        backend = _backend("hang.py", timeout=3600.0)
        t0 = time.monotonic()
        v = backend.check_implication(p, q, Budget(timeout=1.0))
        assert v.kind is VerdictKind.UNKNOWN and v.reason == "timeout"
        assert time.monotonic() - t0 < 10

    def test_cross_backend_agreement_randomized(self):
        rng = random.Random(99)
        backend = _backend("refsolver.py")
        checked = 0
        for _ in range(25):
            pt = small_string_type(chars="ab*", max_len=2)
            p = random_policy_set(rng, pt, max_policies=3)
            q = random_policy_set(rng, pt, max_policies=3)
            ext = backend.check_implication(p, q)
            ref = brute_force_implication(p, q)
            if ext.kind is VerdictKind.UNKNOWN:
                continue
            assert ext.kind == ref.kind
            if ext.kind is VerdictKind.INVALID:
                cex = ext.counterexample
                assert permitted(p, cex) and not permitted(q, cex)
            checked += 1
        assert checked >= 20


@pytest.mark.skipif(shutil.which("z3") is None, reason="z3 not installed")
class TestRealZ3:
    def test_cliff1_with_z3(self, cliff1):
        p, q = cliff1
        backend = SmtBackend(
            SolverConfig(executable=shutil.which("z3"), args=("-in", "-smt2"), timeout=10.0)
        )
        v = backend.check_implication(p, q)
        assert v.kind in (VerdictKind.VALID, VerdictKind.UNKNOWN)
        assert v.kind is not VerdictKind.INVALID
