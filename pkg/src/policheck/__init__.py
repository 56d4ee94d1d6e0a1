"""policheck: permissiveness analysis for typed access-control policies.

Model policies as tuples of typed components, compile policy sets into a
solver-independent constraint IR, and decide implication queries ("is P at
most as permissive as Q?") with either the built-in bounded-automata engine
or any external SMT-LIB2 solver run as a subprocess.
"""

from .core import (
    ALLOW,
    DENY,
    WILDCARD,
    CharSet,
    MatchingStrategy,
    Policy,
    PolicySet,
    PolicyType,
    Request,
    StringComponentDef,
    StringEnumComponentDef,
    TupleComponentDef,
    glob_match,
    match,
    permitted,
    policy_matches,
    validate_pattern,
    validate_value,
)
from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    FalseFormula,
    Formula,
    Not,
    Or,
    TrueFormula,
    encode_policy,
    encode_policy_set,
    eval_formula,
    to_sexpr,
)
from .automata import (
    Budget,
    NativeBackend,
    Verdict,
    VerdictKind,
    brute_force_implication,
    check_implication,
    formula_to_automaton,
    pattern_to_automaton,
)

__version__ = "0.1.0"

__all__ = [
    "ALLOW",
    "DENY",
    "WILDCARD",
    "CharSet",
    "MatchingStrategy",
    "Policy",
    "PolicySet",
    "PolicyType",
    "Request",
    "StringComponentDef",
    "StringEnumComponentDef",
    "TupleComponentDef",
    "glob_match",
    "match",
    "permitted",
    "policy_matches",
    "validate_pattern",
    "validate_value",
    "TRUE",
    "FALSE",
    "And",
    "Atom",
    "FalseFormula",
    "Formula",
    "Not",
    "Or",
    "TrueFormula",
    "encode_policy",
    "encode_policy_set",
    "eval_formula",
    "to_sexpr",
    "Budget",
    "NativeBackend",
    "Verdict",
    "VerdictKind",
    "brute_force_implication",
    "check_implication",
    "formula_to_automaton",
    "pattern_to_automaton",
    "__version__",
]
