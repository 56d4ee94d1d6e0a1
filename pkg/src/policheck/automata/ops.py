"""Language operations on bounded automata, backed by the selected kernels."""

from __future__ import annotations

import numpy as np

from ..errors import StateBudgetExceeded
from . import kernels
from .automaton import BoundedAutomaton, complete_and_flip, make_empty, prune_dead

DEFAULT_MAX_STATES = 1_000_000


def _charge(run, automaton: BoundedAutomaton) -> BoundedAutomaton:
    if run is not None:
        run.note_states(automaton.n_states)
    return automaton


def intersect(
    a: BoundedAutomaton,
    b: BoundedAutomaton,
    max_states: int = DEFAULT_MAX_STATES,
    run=None,
    prune: bool = True,
) -> BoundedAutomaton:
    """Product automaton recognizing the intersection of the two languages."""
    if a.alphabet != b.alphabet:
        raise ValueError("automata over different alphabets")
    indptr, targets, masks, acc, _, _, status = kernels.product(
        a.indptr,
        a.targets,
        a.masks,
        a.accepting,
        b.indptr,
        b.targets,
        b.masks,
        b.accepting,
        a.starts.astype(np.int32),
        b.starts.astype(np.int32),
        max_states,
    )
    if status == kernels.BUDGET_EXCEEDED:
        raise StateBudgetExceeded(f"intersection exceeded {max_states} states")
    n_starts = len(a.starts) * len(b.starts)
    out = BoundedAutomaton(
        alphabet=a.alphabet,
        indptr=indptr,
        targets=targets,
        masks=masks,
        starts=np.arange(n_starts, dtype=np.int32),
        accepting=acc,
        deterministic=a.deterministic and b.deterministic,
    )
    out = _charge(run, out)
    return prune_dead(out) if prune else out


def determinize(
    a: BoundedAutomaton, max_states: int = DEFAULT_MAX_STATES, run=None
) -> BoundedAutomaton:
    """Subset construction; no-op for automata that are already deterministic."""
    if a.deterministic and len(a.starts) == 1:
        return a
    indptr, targets, masks, acc, status = kernels.determinize(
        a.indptr,
        a.targets,
        a.masks,
        a.accepting,
        a.starts.astype(np.int32),
        a.alphabet.n_symbols,
        max_states,
    )
    if status == kernels.BUDGET_EXCEEDED:
        raise StateBudgetExceeded(f"determinization exceeded {max_states} states")
    out = BoundedAutomaton(
        alphabet=a.alphabet,
        indptr=indptr,
        targets=targets,
        masks=masks,
        starts=np.zeros(1, dtype=np.int32),
        accepting=acc,
        deterministic=True,
    )
    return _charge(run, out)


def complement_within(
    a: BoundedAutomaton,
    universe: BoundedAutomaton,
    max_states: int = DEFAULT_MAX_STATES,
    run=None,
) -> BoundedAutomaton:
    """Words of ``universe`` not accepted by ``a``.

    Determinizes, completes with an explicit sink, flips acceptance, and
    intersects back with the universe so the result stays within the bounded
    well-formed request language.
    """
    det = determinize(a, max_states=max_states, run=run)
    flipped = _charge(run, complete_and_flip(det))
    return intersect(flipped, universe, max_states=max_states, run=run)


def is_empty(a: BoundedAutomaton) -> bool:
    """No accepting state is reachable (after pruning, simply none exists)."""
    if not a.accepting.any():
        return True
    fwd = kernels.reach(a.indptr, a.targets, a.starts.astype(np.int32))
    return not bool(np.any(fwd & a.accepting))


def lex_min_word(a: BoundedAutomaton) -> list[int] | None:
    """Smallest accepted word in symbol-table order, or None if empty.

    Prefers stopping over extending, and the lowest symbol id otherwise, which
    is exactly lexicographic order because every language here is finite.
    """
    pruned = prune_dead(a)
    if not pruned.accepting.any():
        return None
    cur = sorted(int(s) for s in pruned.starts)
    word: list[int] = []
    W = pruned.alphabet.n_words
    guard = 0
    while True:
        if any(pruned.accepting[u] for u in cur):
            return word
        combined = np.zeros(W, dtype=np.uint64)
        for u in cur:
            for e in range(pruned.indptr[u], pruned.indptr[u + 1]):
                combined |= pruned.masks[e]
        symbol = -1
        for w in range(W):
            bits = int(combined[w])
            if bits:
                symbol = (w << 6) + (bits & -bits).bit_length() - 1
                break
        if symbol < 0:
            raise RuntimeError("pruned automaton has a non-accepting dead end")
        word.append(symbol)
        cur = pruned.step_set(cur, symbol)
        guard += 1
        if guard > 10_000_000:
            raise RuntimeError("lexicographic extraction runaway")
