"""Implication decisions over policy sets via the bounded-automata engine.

P implies Q ("P is at most as permissive as Q") holds iff no request is
permitted by P but not by Q, i.e. the language of P intersected with the
complement of Q's language is empty.  All languages here are finite, so the
procedure is complete; it only gives up when a state or time budget runs out.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from enum import Enum

from ..core import (
    PolicySet,
    PolicyType,
    Request,
    StringEnumComponentDef,
    _permitted_values,
    permitted,
)
from ..errors import DomainTooLarge, StateBudgetExceeded, TypeMismatch
from ..formula import Not, encode_policy_set
from .alphabet import alphabet_for
from .build import formula_to_automaton, wf_automaton
from .ops import DEFAULT_MAX_STATES, intersect, lex_min_word


@dataclass(frozen=True)
class Budget:
    """Per-query resource cap; crossing either bound yields an Unknown verdict."""

    max_states: int = DEFAULT_MAX_STATES
    timeout: float = 60.0


class VerdictKind(Enum):
    VALID = "valid"
    INVALID = "invalid"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class VerdictStats:
    states_built: int = 0
    elapsed: float = 0.0


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    counterexample: Request | None = None
    reason: str | None = None
    stats: VerdictStats = field(default_factory=VerdictStats, compare=False)

    def __post_init__(self) -> None:
        if self.kind is VerdictKind.INVALID and self.counterexample is None:
            raise ValueError("invalid verdicts carry a counterexample")
        if self.kind is VerdictKind.UNKNOWN and not self.reason:
            raise ValueError("unknown verdicts carry a reason")

    @property
    def is_valid(self) -> bool:
        return self.kind is VerdictKind.VALID

    @property
    def is_invalid(self) -> bool:
        return self.kind is VerdictKind.INVALID

    @property
    def is_unknown(self) -> bool:
        return self.kind is VerdictKind.UNKNOWN


class _DeadlineExceeded(Exception):
    pass


class _Run:
    """Budget bookkeeping threaded through one query's constructions.

    The wall-clock deadline is checked between construction phases; within a
    phase the state cap is the effective bound.
    """

    def __init__(self, budget: Budget):
        self.t0 = time.monotonic()
        self.deadline = self.t0 + budget.timeout
        self.max_states = budget.max_states
        self.states_built = 0

    def note_states(self, n: int) -> None:
        self.states_built += n
        self.check_deadline()

    def check_deadline(self) -> None:
        if time.monotonic() > self.deadline:
            raise _DeadlineExceeded

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self.t0


def check_implication(p: PolicySet, q: PolicySet, budget: Budget | None = None) -> Verdict:
    """Decide whether every request permitted by ``p`` is permitted by ``q``.

    Valid means the implication holds; Invalid carries the smallest failing
    request in symbol-table order; Unknown only ever reports budget
    exhaustion.
    """
    if p.policy_type != q.policy_type:
        raise TypeMismatch("policy sets have different policy types")
    budget = budget or Budget()
    run = _Run(budget)
    pt = p.policy_type
    try:
        a_p = formula_to_automaton(pt, encode_policy_set(p), budget.max_states, run)
        a_not_q = formula_to_automaton(pt, Not(encode_policy_set(q)), budget.max_states, run)
        gap = intersect(a_p, a_not_q, max_states=budget.max_states, run=run)
        word = lex_min_word(gap)
    except StateBudgetExceeded:
        return Verdict(
            VerdictKind.UNKNOWN,
            reason="state-budget-exceeded",
            stats=VerdictStats(run.states_built, run.elapsed),
        )
    except _DeadlineExceeded:
        return Verdict(
            VerdictKind.UNKNOWN,
            reason="timeout",
            stats=VerdictStats(run.states_built, run.elapsed),
        )
    stats = VerdictStats(run.states_built, run.elapsed)
    if word is None:
        return Verdict(VerdictKind.VALID, stats=stats)
    alphabet = alphabet_for(pt)
    values = alphabet.split_request_word(alphabet.ids_to_word(word))
    cex = Request(pt, tuple(values))
    if not (permitted(p, cex) and not permitted(q, cex)):
        raise RuntimeError(
            "internal error: extracted counterexample fails the reference evaluator"
        )
    return Verdict(VerdictKind.INVALID, counterexample=cex, stats=stats)


def _domain_words(comp, cap: int) -> list[str]:
    if isinstance(comp, StringEnumComponentDef):
        return list(comp.values)
    chars = sorted(comp.charset.concrete_chars)
    words: list[str] = [""]
    frontier = [""]
    for _ in range(comp.max_len):
        frontier = [w + c for w in frontier for c in chars]
        words.extend(frontier)
        if len(words) > cap:
            raise DomainTooLarge(f"component {comp.name!r} alone exceeds {cap} values")
        if not frontier:
            break
    return words


def request_space_size(pt: PolicyType, cap: int = 1_000_000) -> int:
    """Number of distinct requests, or raises DomainTooLarge past the cap."""
    total = 1
    for _, comp in pt.flat_components:
        if isinstance(comp, StringEnumComponentDef):
            n = len(comp.values)
        else:
            k = len(comp.charset.concrete_chars)
            n = comp.max_len + 1 if k <= 1 else (k ** (comp.max_len + 1) - 1) // (k - 1)
        total *= n
        if total > cap:
            raise DomainTooLarge(f"request space of {pt.name!r} exceeds {cap}")
    return total


def brute_force_implication(p: PolicySet, q: PolicySet, cap: int = 1_000_000) -> Verdict:
    """Oracle: enumerate every request and compare the two evaluators.

    Requests are visited per component in length-then-lexicographic order
    (enums in declaration order); the first failing request is returned.
    Never answers Unknown.
    """
    if p.policy_type != q.policy_type:
        raise TypeMismatch("policy sets have different policy types")
    pt = p.policy_type
    t0 = time.monotonic()
    request_space_size(pt, cap)
    domains = [_domain_words(comp, cap) for _, comp in pt.flat_components]
    for combo in itertools.product(*domains):
        if _permitted_values(p, combo) and not _permitted_values(q, combo):
            return Verdict(
                VerdictKind.INVALID,
                counterexample=Request(pt, tuple(combo)),
                stats=VerdictStats(0, time.monotonic() - t0),
            )
    return Verdict(VerdictKind.VALID, stats=VerdictStats(0, time.monotonic() - t0))


class NativeBackend:
    """The in-process decision procedure behind the common backend interface."""

    name = "native"

    def check_implication(
        self, p: PolicySet, q: PolicySet, budget: Budget | None = None
    ) -> Verdict:
        return check_implication(p, q, budget)


def warm_up() -> None:
    """Trigger kernel compilation on a tiny query so timings stay clean."""
    from ..core import CharSet, MatchingStrategy, Policy, StringComponentDef

    comp = StringComponentDef(
        name="x",
        charset=CharSet.from_string("ab*"),
        max_len=2,
        strategy=MatchingStrategy.WILDCARD,
    )
    pt = PolicyType(name="warmup", components=(comp,))
    p = PolicySet(pt, (Policy(pt, ("a",), "allow"),))
    q = PolicySet(pt, (Policy(pt, ("*",), "allow"), Policy(pt, ("b",), "deny")))
    check_implication(p, q)
    check_implication(q, p)
