"""Construction of bounded automata from patterns, components, and formulas.

A request is represented as one word: the component values joined by a
sentinel symbol after each component.  A formula over a policy type becomes
an automaton over such words: atoms constrain one component slot and leave
the others free, conjunction is language intersection, disjunction is union,
and negation is complementation within the well-formed request language.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache, reduce
from typing import Sequence

from ..core import (
    MatchingStrategy,
    PolicyType,
    ScalarComponentDef,
    StringEnumComponentDef,
    WILDCARD,
    _match_prevalidated,
    validate_pattern,
)
from ..errors import TypeMismatch
from ..formula import And, Atom, FalseFormula, Formula, Not, Or, TrueFormula
from .alphabet import Alphabet, alphabet_for
from .automaton import (
    BoundedAutomaton,
    Builder,
    concat_with_sentinels,
    make_empty,
    prune_dead,
    union,
)
from .ops import DEFAULT_MAX_STATES, complement_within, intersect

__all__ = [
    "pattern_to_automaton",
    "domain_automaton",
    "wf_automaton",
    "formula_to_automaton",
]


@lru_cache(maxsize=None)
def _alphabet_for_component(comp: ScalarComponentDef) -> Alphabet:
    if isinstance(comp, StringEnumComponentDef):
        chars = set(comp.value_chars)
    else:
        chars = set(comp.charset.chars)
    sentinel = 0
    while chr(sentinel) in chars:
        sentinel += 1
    return Alphabet((chr(sentinel),) + tuple(sorted(chars)))


def _trie_automaton(alphabet: Alphabet, words: Sequence[str]) -> BoundedAutomaton:
    """Deterministic acceptor of exactly the given words."""
    b = Builder(alphabet)
    root = b.add_state(False)
    nodes: dict[str, int] = {"": root}
    char_masks: dict[str, object] = {}
    for word in words:
        for i in range(1, len(word) + 1):
            prefix = word[:i]
            if prefix not in nodes:
                node = b.add_state(False)
                c = word[i - 1]
                mask = char_masks.get(c)
                if mask is None:
                    mask = char_masks[c] = alphabet.mask_of([c])
                b.add_edge(nodes[word[: i - 1]], mask, node)
                nodes[prefix] = node
        b.set_accepting(nodes[word], True)
    return b.finish([root], deterministic=True)


def _glob_automaton(comp, pattern: str, alphabet: Alphabet) -> BoundedAutomaton:
    """DFA of { v over the charset : |v| <= max_len and the glob matches v }.

    Determinizes the glob's position automaton on the fly; a state is a
    (position set, consumed length) pair, so the length bound is built into
    the construction.
    """
    p = pattern
    L = len(p)
    max_len = comp.max_len
    concrete = comp.charset.concrete_chars
    lit_chars: list[str] = []
    for c in p:
        if c != WILDCARD and c not in lit_chars:
            lit_chars.append(c)
    other = tuple(c for c in concrete if c not in set(lit_chars))

    def closure(ps: frozenset) -> frozenset:
        out = set(ps)
        stack = list(ps)
        while stack:
            i = stack.pop()
            if i < L and p[i] == WILDCARD and (i + 1) not in out:
                out.add(i + 1)
                stack.append(i + 1)
        return frozenset(out)

    def step(ps: frozenset, c: str | None) -> frozenset:
        # c None stands for any charset character not literal in the pattern
        nxt = set()
        for i in ps:
            if i < L:
                if p[i] == WILDCARD:
                    nxt.add(i)
                elif c is not None and p[i] == c:
                    nxt.add(i + 1)
        return closure(nxt)

    classes: list[tuple[str | None, object]] = [
        (c, alphabet.mask_of([c])) for c in lit_chars
    ]
    if other:
        classes.append((None, alphabet.mask_of(other)))

    b = Builder(alphabet)
    start = closure(frozenset([0]))
    ids: dict[tuple[frozenset, int], int] = {}

    def get(ps: frozenset, length: int) -> int:
        key = (ps, length)
        sid = ids.get(key)
        if sid is None:
            sid = b.add_state(L in ps)
            ids[key] = sid
        return sid

    work: deque = deque([(start, 0)])
    get(start, 0)
    step_cache: dict[tuple[frozenset, str | None], frozenset] = {}
    while work:
        ps, length = work.popleft()
        src = ids[(ps, length)]
        if length == max_len:
            continue
        # merge classes sharing a successor so e.g. a wildcard tail is one edge
        succ_masks: dict[frozenset, object] = {}
        for c, mask in classes:
            ck = (ps, c)
            nxt = step_cache.get(ck)
            if nxt is None:
                nxt = step_cache[ck] = step(ps, c)
            if not nxt:
                continue
            have = succ_masks.get(nxt)
            if have is None:
                succ_masks[nxt] = mask.copy()
            else:
                have |= mask
        for nxt, mask in succ_masks.items():
            known = (nxt, length + 1) in ids
            dst = get(nxt, length + 1)
            b.add_edge(src, mask, dst)
            if not known:
                work.append((nxt, length + 1))
    return prune_dead(b.finish([ids[(start, 0)]], deterministic=True))


def _component_pattern_automaton(
    comp: ScalarComponentDef, pattern: str, alphabet: Alphabet
) -> BoundedAutomaton:
    validate_pattern(comp, pattern)
    if isinstance(comp, StringEnumComponentDef):
        if WILDCARD not in pattern:
            members = [pattern] if pattern in comp.value_set else []
        elif pattern == WILDCARD:
            members = list(comp.values)
        else:
            members = [v for v in comp.values if _match_prevalidated(comp, pattern, v)]
        return _trie_automaton(alphabet, members)
    if comp.strategy is MatchingStrategy.EXACT or WILDCARD not in pattern:
        return _trie_automaton(alphabet, [pattern])
    return _glob_automaton(comp, pattern, alphabet)


_pattern_cache: dict[tuple, BoundedAutomaton] = {}


def pattern_to_automaton(
    comp: ScalarComponentDef, pattern: str, alphabet: Alphabet | None = None
) -> BoundedAutomaton:
    """Deterministic acceptor of exactly the values the pattern matches.

    With no explicit alphabet the component's own charset (plus sentinel) is
    used; builders that combine several components pass a shared alphabet.
    """
    if alphabet is None:
        alphabet = _alphabet_for_component(comp)
    key = (alphabet, comp, pattern)
    cached = _pattern_cache.get(key)
    if cached is None:
        cached = _component_pattern_automaton(comp, pattern, alphabet)
        _pattern_cache[key] = cached
    return cached


_domain_cache: dict[tuple, BoundedAutomaton] = {}


def domain_automaton(comp: ScalarComponentDef, alphabet: Alphabet | None = None) -> BoundedAutomaton:
    """Acceptor of every concrete value of the component."""
    if alphabet is None:
        alphabet = _alphabet_for_component(comp)
    key = (alphabet, comp)
    cached = _domain_cache.get(key)
    if cached is not None:
        return cached
    if isinstance(comp, StringEnumComponentDef):
        out = _trie_automaton(alphabet, list(comp.values))
    else:
        b = Builder(alphabet)
        mask = alphabet.mask_of(comp.charset.concrete_chars)
        prev = b.add_state(True)
        for _ in range(comp.max_len):
            nxt = b.add_state(True)
            b.add_edge(prev, mask, nxt)
            prev = nxt
        out = b.finish([0], deterministic=True)
    _domain_cache[key] = out
    return out


@lru_cache(maxsize=None)
def wf_automaton(pt: PolicyType) -> BoundedAutomaton:
    """Well-formedness language: every valid request word of the policy type."""
    alphabet = alphabet_for(pt)
    parts = [domain_automaton(comp, alphabet) for _, comp in pt.flat_components]
    return concat_with_sentinels(parts)


def _lift_slots(
    pt: PolicyType,
    alphabet: Alphabet,
    by_path: dict[str, list[Atom]],
    max_states: int,
    run,
) -> BoundedAutomaton:
    """One request-word automaton constraining the named slots, others free."""
    parts: list[BoundedAutomaton] = []
    for path, comp in pt.flat_components:
        atoms_here = by_path.get(path)
        if not atoms_here:
            parts.append(domain_automaton(comp, alphabet))
            continue
        pieces = [pattern_to_automaton(comp, a.pattern, alphabet) for a in atoms_here]
        piece = pieces[0]
        for extra in pieces[1:]:
            piece = intersect(piece, extra, max_states=max_states, run=run)
        parts.append(piece)
    return concat_with_sentinels(parts)


def _check_atom(pt: PolicyType, atom: Atom) -> None:
    comp = pt.component_def(atom.component_path)  # raises UnknownComponentPath
    if comp != atom.domain:
        raise TypeMismatch(
            f"atom at {atom.component_path!r} references a different component definition"
        )


def _flatten(node_type, f: Formula) -> list[Formula]:
    if isinstance(f, node_type):
        out: list[Formula] = []
        for c in f.children:
            out.extend(_flatten(node_type, c))
        return out
    return [f]


def _build(f: Formula, pt: PolicyType, alphabet: Alphabet, max_states: int, run) -> BoundedAutomaton:
    if run is not None:
        run.check_deadline()
    if isinstance(f, TrueFormula):
        return wf_automaton(pt)
    if isinstance(f, FalseFormula):
        return make_empty(alphabet)
    if isinstance(f, Atom):
        _check_atom(pt, f)
        return _lift_slots(pt, alphabet, {f.component_path: [f]}, max_states, run)
    if isinstance(f, And):
        children = _flatten(And, f)
        by_path: dict[str, list[Atom]] = {}
        rest: list[Formula] = []
        for c in children:
            if isinstance(c, Atom):
                _check_atom(pt, c)
                by_path.setdefault(c.component_path, []).append(c)
            else:
                rest.append(c)
        parts: list[BoundedAutomaton] = []
        if by_path:
            parts.append(_lift_slots(pt, alphabet, by_path, max_states, run))
        parts.extend(_build(c, pt, alphabet, max_states, run) for c in rest)
        return reduce(lambda x, y: intersect(x, y, max_states=max_states, run=run), parts)
    if isinstance(f, Or):
        children = _flatten(Or, f)
        return union([_build(c, pt, alphabet, max_states, run) for c in children])
    if isinstance(f, Not):
        inner = _build(f.child, pt, alphabet, max_states, run)
        if run is not None:
            run.check_deadline()
        return complement_within(inner, wf_automaton(pt), max_states=max_states, run=run)
    raise TypeError(f"not a formula: {f!r}")


def formula_to_automaton(
    pt: PolicyType,
    f: Formula,
    max_states: int = DEFAULT_MAX_STATES,
    run=None,
) -> BoundedAutomaton:
    """Automaton over sentinel-joined request words accepting exactly the
    requests that satisfy the formula."""
    alphabet = alphabet_for(pt)
    return _build(f, pt, alphabet, max_states, run)
