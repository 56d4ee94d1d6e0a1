"""Typed policy data model, glob pattern matching, and the reference evaluator.

Policies are tuples of typed components.  A component is either a bounded
string over a finite charset, a string enumeration, or a one-level tuple of
those.  Every policy additionally carries an allow/deny decision.  The
``permitted`` function is the brute-force ground truth that every other
decision path in the package is checked against.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Union

from .errors import (
    CharOutsideCharset,
    EnumValueUnknown,
    PatternTooLong,
    TypeMismatch,
    UnknownComponentPath,
    WildcardNotAllowed,
)

WILDCARD = "*"
ALLOW = "allow"
DENY = "deny"

_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")


def _check_identifier(name: str, what: str) -> None:
    if not _IDENT_RE.match(name):
        raise ValueError(f"{what} {name!r} is not a valid identifier")


class MatchingStrategy(Enum):
    """How a policy pattern is compared against a concrete value."""

    EXACT = "exact"
    WILDCARD = "wildcard"


@dataclass(frozen=True)
class CharSet:
    """Ordered set of characters a string component ranges over.

    ``*`` may be a member, but it is reserved: it only ever appears in
    wildcard patterns, never in concrete values.
    """

    chars: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.chars:
            raise ValueError("charset must not be empty")
        for c in self.chars:
            if len(c) != 1:
                raise ValueError(f"charset entries must be single characters: {c!r}")
        if len(set(self.chars)) != len(self.chars):
            raise ValueError("charset contains duplicate characters")
        object.__setattr__(self, "_members", frozenset(self.chars))

    @classmethod
    def from_string(cls, chars: str) -> "CharSet":
        return cls(tuple(chars))

    @property
    def contains_wildcard_char(self) -> bool:
        return WILDCARD in self._members  # type: ignore[attr-defined]

    def __contains__(self, c: object) -> bool:
        return c in self._members  # type: ignore[attr-defined]

    @property
    def concrete_chars(self) -> tuple[str, ...]:
        """Charset minus the reserved wildcard: what values are made of."""
        return tuple(c for c in self.chars if c != WILDCARD)


@dataclass(frozen=True)
class StringComponentDef:
    """Bounded string component: words over ``charset`` up to ``max_len`` chars."""

    name: str
    charset: CharSet
    max_len: int
    strategy: MatchingStrategy

    def __post_init__(self) -> None:
        _check_identifier(self.name, "component name")
        if self.max_len < 1:
            raise ValueError("max_len must be >= 1")


@dataclass(frozen=True)
class StringEnumComponentDef:
    """Enumerated string component; values are fixed, non-empty, and distinct."""

    name: str
    values: tuple[str, ...]
    strategy: MatchingStrategy

    def __post_init__(self) -> None:
        _check_identifier(self.name, "component name")
        if not self.values:
            raise ValueError(f"enum component {self.name!r} has no values")
        if len(set(self.values)) != len(self.values):
            raise ValueError(f"enum component {self.name!r} has duplicate values")
        for v in self.values:
            if not v:
                raise ValueError(f"enum component {self.name!r} has an empty value")
            if v == WILDCARD:
                raise ValueError(f"enum component {self.name!r}: {WILDCARD!r} cannot be a value")
        object.__setattr__(self, "_value_set", frozenset(self.values))
        # Characters enum members are written in; doubles as the glob alphabet.
        seen: dict[str, None] = {}
        for v in self.values:
            for c in v:
                seen.setdefault(c, None)
        object.__setattr__(self, "_value_chars", frozenset(seen))

    @property
    def value_set(self) -> frozenset:
        return self._value_set  # type: ignore[attr-defined]

    @property
    def value_chars(self) -> frozenset:
        return self._value_chars  # type: ignore[attr-defined]


ScalarComponentDef = Union[StringComponentDef, StringEnumComponentDef]


@dataclass(frozen=True)
class TupleComponentDef:
    """Fixed-arity tuple of scalar components.  Tuples never nest."""

    name: str
    fields: tuple[ScalarComponentDef, ...]

    def __post_init__(self) -> None:
        _check_identifier(self.name, "component name")
        if not self.fields:
            raise ValueError(f"tuple component {self.name!r} has no fields")
        names = [f.name for f in self.fields]
        if len(set(names)) != len(names):
            raise ValueError(f"tuple component {self.name!r} has duplicate field names")
        for f in self.fields:
            if not isinstance(f, (StringComponentDef, StringEnumComponentDef)):
                raise ValueError("tuple fields must be string or enum components")


ComponentDef = Union[StringComponentDef, StringEnumComponentDef, TupleComponentDef]

# Reserved trailing component present on every policy type.
DECISION_COMPONENT = StringEnumComponentDef(
    name="decision", values=(ALLOW, DENY), strategy=MatchingStrategy.EXACT
)


@dataclass(frozen=True)
class PolicyType:
    """Schema of a policy: named components plus the implicit decision field."""

    name: str
    components: tuple[ComponentDef, ...]

    def __post_init__(self) -> None:
        _check_identifier(self.name, "policy type name")
        if not self.components:
            raise ValueError("a policy type needs at least one component")
        names = [c.name for c in self.components]
        if len(set(names)) != len(names):
            raise ValueError(f"policy type {self.name!r} has duplicate component names")
        if "decision" in names:
            raise ValueError("'decision' is reserved; it is implicit on every policy type")
        flat: list[tuple[str, ScalarComponentDef]] = []
        for comp in self.components:
            if isinstance(comp, TupleComponentDef):
                flat.extend((f"{comp.name}.{f.name}", f) for f in comp.fields)
            else:
                flat.append((comp.name, comp))
        object.__setattr__(self, "_flat", tuple(flat))
        object.__setattr__(self, "_flat_index", {path: i for i, (path, _) in enumerate(flat)})

    @property
    def decision_component(self) -> StringEnumComponentDef:
        return DECISION_COMPONENT

    @property
    def flat_components(self) -> tuple[tuple[str, ScalarComponentDef], ...]:
        """(path, definition) pairs with tuple fields flattened, declaration order."""
        return self._flat  # type: ignore[attr-defined]

    @property
    def arity(self) -> int:
        return len(self.flat_components)

    def flat_index(self, path: str) -> int:
        try:
            return self._flat_index[path]  # type: ignore[attr-defined]
        except KeyError:
            raise UnknownComponentPath(
                f"policy type {self.name!r} has no component {path!r}"
            ) from None

    def component_def(self, path: str) -> ScalarComponentDef:
        return self.flat_components[self.flat_index(path)][1]


def validate_pattern(comp: ScalarComponentDef, pattern: str) -> None:
    """Raise unless ``pattern`` is well-formed for the component.

    Exact strategies take concrete values only.  Wildcard string patterns are
    sequences over the charset plus ``*``; wildcard enum patterns are globs
    over the characters occurring in the enumeration's values.
    """
    if isinstance(comp, StringEnumComponentDef):
        if comp.strategy is MatchingStrategy.EXACT:
            if WILDCARD in pattern:
                raise WildcardNotAllowed(
                    f"{comp.name}: exact patterns cannot contain {WILDCARD!r}: {pattern!r}"
                )
            if pattern not in comp.value_set:
                raise EnumValueUnknown(f"{comp.name}: {pattern!r} is not an enumerated value")
            return
        for c in pattern:
            if c != WILDCARD and c not in comp.value_chars:
                raise CharOutsideCharset(
                    f"{comp.name}: {c!r} does not occur in any enumerated value"
                )
        return
    if comp.strategy is MatchingStrategy.EXACT:
        if WILDCARD in pattern:
            raise WildcardNotAllowed(
                f"{comp.name}: exact patterns cannot contain {WILDCARD!r}: {pattern!r}"
            )
        _validate_concrete(comp, pattern)
        return
    if len(pattern) > comp.max_len:
        raise PatternTooLong(
            f"{comp.name}: pattern of length {len(pattern)} exceeds max_len {comp.max_len}"
        )
    for c in pattern:
        if c != WILDCARD and c not in comp.charset:
            raise CharOutsideCharset(f"{comp.name}: {c!r} is outside the charset")


def _validate_concrete(comp: StringComponentDef, value: str) -> None:
    if len(value) > comp.max_len:
        raise PatternTooLong(
            f"{comp.name}: value of length {len(value)} exceeds max_len {comp.max_len}"
        )
    for c in value:
        if c not in comp.charset:
            raise CharOutsideCharset(f"{comp.name}: {c!r} is outside the charset")


def validate_value(comp: ScalarComponentDef, value: str) -> None:
    """Raise unless ``value`` is a concrete value of the component's domain."""
    if WILDCARD in value:
        raise WildcardNotAllowed(f"{comp.name}: concrete values cannot contain {WILDCARD!r}")
    if isinstance(comp, StringEnumComponentDef):
        if value not in comp.value_set:
            raise EnumValueUnknown(f"{comp.name}: {value!r} is not an enumerated value")
        return
    _validate_concrete(comp, value)


def glob_match(pattern: str, value: str) -> bool:
    """Glob semantics: literals match themselves, ``*`` any (possibly empty) run.

    Iterative two-pointer matcher with backtracking to the most recent star.
    """
    px = sx = 0
    star_px = star_sx = -1
    np_, nv = len(pattern), len(value)
    while sx < nv:
        if px < np_ and pattern[px] == WILDCARD:
            star_px, star_sx = px, sx
            px += 1
        elif px < np_ and pattern[px] == value[sx]:
            px += 1
            sx += 1
        elif star_px >= 0:
            star_sx += 1
            px, sx = star_px + 1, star_sx
        else:
            return False
    while px < np_ and pattern[px] == WILDCARD:
        px += 1
    return px == np_


def _match_prevalidated(comp: ScalarComponentDef, pattern: str, value: str) -> bool:
    if comp.strategy is MatchingStrategy.EXACT:
        return pattern == value
    if isinstance(comp, StringEnumComponentDef):
        return value in comp.value_set and glob_match(pattern, value)
    return glob_match(pattern, value)


def match(comp: ScalarComponentDef, pattern: str, value: str) -> bool:
    """Decide whether ``pattern`` covers ``value`` under the component's strategy."""
    validate_pattern(comp, pattern)
    validate_value(comp, value)
    return _match_prevalidated(comp, pattern, value)


@dataclass(frozen=True)
class Policy:
    """One rule: a pattern per flattened component plus an allow/deny decision."""

    policy_type: PolicyType
    values: tuple[str, ...]
    decision: str

    def __post_init__(self) -> None:
        validate_pattern(DECISION_COMPONENT, self.decision)
        flat = self.policy_type.flat_components
        if len(self.values) != len(flat):
            raise TypeMismatch(
                f"policy type {self.policy_type.name!r} expects {len(flat)} values, "
                f"got {len(self.values)}"
            )
        for (path, comp), pattern in zip(flat, self.values):
            try:
                validate_pattern(comp, pattern)
            except Exception as exc:
                raise type(exc)(f"{path}: {exc}") from None

    @classmethod
    def make(cls, policy_type: PolicyType, decision: str, **by_component) -> "Policy":
        """Build a policy from per-component keyword arguments.

        Tuple components take a sequence with one pattern per field:

            Policy.make(pt, "allow", principal=("a2cps", "jdoe"), action="GET")
        """
        values: list[str] = []
        seen = set()
        for comp in policy_type.components:
            if comp.name not in by_component:
                raise TypeMismatch(f"missing component {comp.name!r}")
            seen.add(comp.name)
            given = by_component[comp.name]
            if isinstance(comp, TupleComponentDef):
                if isinstance(given, str) or len(given) != len(comp.fields):
                    raise TypeMismatch(
                        f"component {comp.name!r} expects {len(comp.fields)} field patterns"
                    )
                values.extend(given)
            else:
                values.append(given)
        extra = set(by_component) - seen
        if extra:
            raise TypeMismatch(f"unknown components: {sorted(extra)}")
        return cls(policy_type, tuple(values), decision)

    def pattern_for(self, path: str) -> str:
        return self.values[self.policy_type.flat_index(path)]


@dataclass(frozen=True)
class PolicySet:
    """Ordered collection of policies sharing one policy type.  May be empty."""

    policy_type: PolicyType
    policies: tuple[Policy, ...]

    def __post_init__(self) -> None:
        for p in self.policies:
            if p.policy_type != self.policy_type:
                raise TypeMismatch(
                    f"policy of type {p.policy_type.name!r} in a "
                    f"{self.policy_type.name!r} set"
                )

    @property
    def allow_policies(self) -> tuple[Policy, ...]:
        return tuple(p for p in self.policies if p.decision == ALLOW)

    @property
    def deny_policies(self) -> tuple[Policy, ...]:
        return tuple(p for p in self.policies if p.decision == DENY)

    def __len__(self) -> int:
        return len(self.policies)

    def __iter__(self) -> Iterator[Policy]:
        return iter(self.policies)


@dataclass(frozen=True)
class Request:
    """A concrete access request: one wildcard-free value per flattened component."""

    policy_type: PolicyType
    values: tuple[str, ...]

    def __post_init__(self) -> None:
        flat = self.policy_type.flat_components
        if len(self.values) != len(flat):
            raise TypeMismatch(
                f"request for {self.policy_type.name!r} expects {len(flat)} values, "
                f"got {len(self.values)}"
            )
        for (path, comp), value in zip(flat, self.values):
            try:
                validate_value(comp, value)
            except Exception as exc:
                raise type(exc)(f"{path}: {exc}") from None

    def value_for(self, path: str) -> str:
        return self.values[self.policy_type.flat_index(path)]


def _policy_matches_values(p: Policy, values: tuple[str, ...]) -> bool:
    flat = p.policy_type.flat_components
    for i in range(len(flat)):
        if not _match_prevalidated(flat[i][1], p.values[i], values[i]):
            return False
    return True


def policy_matches(p: Policy, r: Request) -> bool:
    """True iff every component pattern of ``p`` covers the request value."""
    if p.policy_type != r.policy_type:
        raise TypeMismatch("policy and request have different policy types")
    return _policy_matches_values(p, r.values)


def _permitted_values(ps: PolicySet, values: tuple[str, ...]) -> bool:
    # Fast path over raw value tuples; callers guarantee domain validity.
    allowed = False
    for p in ps.policies:
        if p.decision == DENY and _policy_matches_values(p, values):
            return False
        if not allowed and p.decision == ALLOW and _policy_matches_values(p, values):
            allowed = True
    return allowed


def permitted(ps: PolicySet, r: Request) -> bool:
    """Reference semantics: some allow policy matches and no deny policy does."""
    if ps.policy_type != r.policy_type:
        raise TypeMismatch("policy set and request have different policy types")
    return _permitted_values(ps, r.values)
