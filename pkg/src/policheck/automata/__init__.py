"""Bounded-automata decision procedure for policy implication queries."""

from .alphabet import Alphabet, alphabet_for
from .automaton import BoundedAutomaton, make_empty, union
from .build import (
    domain_automaton,
    formula_to_automaton,
    pattern_to_automaton,
    wf_automaton,
)
from .kernels import USING_NUMBA
from .ops import complement_within, determinize, intersect, is_empty, lex_min_word
from .solve import (
    Budget,
    NativeBackend,
    Verdict,
    VerdictKind,
    VerdictStats,
    brute_force_implication,
    check_implication,
    request_space_size,
    warm_up,
)

__all__ = [
    "Alphabet",
    "alphabet_for",
    "BoundedAutomaton",
    "make_empty",
    "union",
    "pattern_to_automaton",
    "domain_automaton",
    "formula_to_automaton",
    "wf_automaton",
    "USING_NUMBA",
    "intersect",
    "determinize",
    "complement_within",
    "is_empty",
    "lex_min_word",
    "Budget",
    "Verdict",
    "VerdictKind",
    "VerdictStats",
    "check_implication",
    "brute_force_implication",
    "request_space_size",
    "NativeBackend",
    "warm_up",
]
