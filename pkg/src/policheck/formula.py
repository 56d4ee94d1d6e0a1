"""Solver-independent constraint IR and the policy-set encoder.

A policy becomes a conjunction over its components; a policy set becomes
"some allow policy matches, and no deny policy matches".  The decision field
is never encoded: it only selects which side of that conjunction a policy
lands on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .core import (
    MatchingStrategy,
    Policy,
    PolicySet,
    Request,
    ScalarComponentDef,
    TupleComponentDef,
    _match_prevalidated,
    validate_pattern,
)


@dataclass(frozen=True)
class TrueFormula:
    def __repr__(self) -> str:  # pragma: no cover - debug nicety
        return "TRUE"


@dataclass(frozen=True)
class FalseFormula:
    def __repr__(self) -> str:  # pragma: no cover - debug nicety
        return "FALSE"


TRUE = TrueFormula()
FALSE = FalseFormula()


@dataclass(frozen=True)
class Atom:
    """One constraint: the named component matches ``pattern``."""

    component_path: str
    pattern: str
    strategy: MatchingStrategy
    domain: ScalarComponentDef

    def __post_init__(self) -> None:
        validate_pattern(self.domain, self.pattern)


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if not self.children:
            raise ValueError("And needs at least one child")


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if not self.children:
            raise ValueError("Or needs at least one child")


Formula = Union[TrueFormula, FalseFormula, Atom, Not, And, Or]


def _atom_for(path: str, comp: ScalarComponentDef, pattern: str) -> Atom:
    return Atom(component_path=path, pattern=pattern, strategy=comp.strategy, domain=comp)


def encode_policy(p: Policy) -> Formula:
    """Conjunction over the policy's components; tuples expand to inner Ands.

    A single-component policy collapses to its bare atom.  The decision field
    is not part of the formula.
    """
    parts: list[Formula] = []
    idx = 0
    for comp in p.policy_type.components:
        if isinstance(comp, TupleComponentDef):
            field_atoms = []
            for f in comp.fields:
                field_atoms.append(_atom_for(f"{comp.name}.{f.name}", f, p.values[idx]))
                idx += 1
            parts.append(And(tuple(field_atoms)))
        else:
            parts.append(_atom_for(comp.name, comp, p.values[idx]))
            idx += 1
    if len(parts) == 1:
        return parts[0]
    return And(tuple(parts))


def encode_policy_set(ps: PolicySet) -> Formula:
    """Disjunction of allow policies, conjoined with the negated deny disjunction.

    An empty allow side yields the constant false; an empty deny side drops
    the negation conjunct entirely.
    """
    allows = [encode_policy(p) for p in ps.allow_policies]
    denies = [encode_policy(p) for p in ps.deny_policies]
    if not allows:
        return FALSE
    allow_part: Formula = Or(tuple(allows))
    if not denies:
        return allow_part
    return And((allow_part, Not(Or(tuple(denies)))))


def eval_formula(f: Formula, r: Request) -> bool:
    """Evaluate the formula on a concrete request.

    Atom truth is the component's match relation; connectives are standard.
    """
    if isinstance(f, TrueFormula):
        return True
    if isinstance(f, FalseFormula):
        return False
    if isinstance(f, Atom):
        return _match_prevalidated(f.domain, f.pattern, r.value_for(f.component_path))
    if isinstance(f, Not):
        return not eval_formula(f.child, r)
    if isinstance(f, And):
        return all(eval_formula(c, r) for c in f.children)
    if isinstance(f, Or):
        return any(eval_formula(c, r) for c in f.children)
    raise TypeError(f"not a formula: {f!r}")


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_sexpr(f: Formula) -> str:
    """Stable s-expression rendering, used for golden tests and debugging."""
    if isinstance(f, TrueFormula):
        return "true"
    if isinstance(f, FalseFormula):
        return "false"
    if isinstance(f, Atom):
        op = "eq" if f.strategy is MatchingStrategy.EXACT else "glob"
        return f"({op} {f.component_path} {_quote(f.pattern)})"
    if isinstance(f, Not):
        return f"(not {to_sexpr(f.child)})"
    if isinstance(f, And):
        return "(and " + " ".join(to_sexpr(c) for c in f.children) + ")"
    if isinstance(f, Or):
        return "(or " + " ".join(to_sexpr(c) for c in f.children) + ")"
    raise TypeError(f"not a formula: {f!r}")


def atoms(f: Formula) -> list[Atom]:
    """All atoms in the formula, left-to-right."""
    if isinstance(f, Atom):
        return [f]
    if isinstance(f, Not):
        return atoms(f.child)
    if isinstance(f, (And, Or)):
        out: list[Atom] = []
        for c in f.children:
            out.extend(atoms(c))
        return out
    return []
