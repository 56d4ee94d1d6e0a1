"""Bounded automata over an indexed alphabet, stored as flat numpy arrays.

States are dense integer ids.  Transitions are CSR edge lists where each edge
carries a symbol-set bitmask, so a state needs only one edge for "any charset
character".  Every language built here is finite (all strings are length
bounded), which keeps complementation and emptiness checks terminating by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .alphabet import Alphabet

INDPTR_DT = np.int64
TARGET_DT = np.int32
MASK_DT = np.uint64


@dataclass
class BoundedAutomaton:
    alphabet: Alphabet
    indptr: np.ndarray  # int64[n_states + 1]
    targets: np.ndarray  # int32[n_edges]
    masks: np.ndarray  # uint64[n_edges, n_words]
    starts: np.ndarray  # int32, sorted unique
    accepting: np.ndarray  # bool[n_states]
    deterministic: bool

    @property
    def n_states(self) -> int:
        return len(self.indptr) - 1

    @property
    def n_edges(self) -> int:
        return len(self.targets)

    @property
    def start(self) -> int:
        if not self.deterministic or len(self.starts) != 1:
            raise ValueError("automaton has no unique start state")
        return int(self.starts[0])

    def edges_of(self, state: int) -> Iterable[tuple[np.ndarray, int]]:
        for e in range(self.indptr[state], self.indptr[state + 1]):
            yield self.masks[e], int(self.targets[e])

    def transition(self, state: int, symbol: int) -> int:
        """Deterministic successor on one symbol, or -1 for the dead state."""
        w, b = symbol >> 6, np.uint64(1) << np.uint64(symbol & 63)
        for e in range(self.indptr[state], self.indptr[state + 1]):
            if self.masks[e, w] & b:
                return int(self.targets[e])
        return -1

    def step_set(self, states: Iterable[int], symbol: int) -> list[int]:
        w, b = symbol >> 6, np.uint64(1) << np.uint64(symbol & 63)
        out = set()
        for u in states:
            for e in range(self.indptr[u], self.indptr[u + 1]):
                if self.masks[e, w] & b:
                    out.add(int(self.targets[e]))
        return sorted(out)

    def accepts_ids(self, word: Sequence[int]) -> bool:
        cur = list(self.starts)
        for s in word:
            cur = self.step_set(cur, s)
            if not cur:
                return False
        return any(self.accepting[u] for u in cur)

    def accepts(self, word: str) -> bool:
        idx = self.alphabet._index  # type: ignore[attr-defined]
        try:
            ids = [idx[c] for c in word]
        except KeyError:
            return False
        return self.accepts_ids(ids)

    def enumerate_language(self, max_words: int = 1_000_000) -> set[str]:
        """All accepted words.  Only sensible on small automata (tests)."""
        out: set[str] = set()
        stack: list[tuple[tuple[int, ...], str]] = [(tuple(self.starts), "")]
        steps = 0
        while stack:
            states, word = stack.pop()
            steps += 1
            if steps > 10_000_000:
                raise RuntimeError("language enumeration runaway")
            if any(self.accepting[u] for u in states):
                out.add(word)
                if len(out) > max_words:
                    raise RuntimeError("language larger than max_words")
            combined = np.zeros(self.alphabet.n_words, dtype=MASK_DT)
            for u in states:
                for e in range(self.indptr[u], self.indptr[u + 1]):
                    combined |= self.masks[e]
            for s in self.alphabet.symbols_in_mask(combined):
                nxt = self.step_set(states, s)
                if nxt:
                    stack.append((tuple(nxt), word + self.alphabet.symbols[s]))
        return out

    def check_deterministic(self) -> bool:
        """Verify no state has two edges sharing a symbol (test helper)."""
        for u in range(self.n_states):
            seen = np.zeros(self.alphabet.n_words, dtype=MASK_DT)
            for e in range(self.indptr[u], self.indptr[u + 1]):
                if np.any(seen & self.masks[e]):
                    return False
                seen |= self.masks[e]
        return len(self.starts) <= 1


def make_empty(alphabet: Alphabet) -> BoundedAutomaton:
    """One non-accepting state: the empty language."""
    return BoundedAutomaton(
        alphabet=alphabet,
        indptr=np.zeros(2, dtype=INDPTR_DT),
        targets=np.empty(0, dtype=TARGET_DT),
        masks=np.empty((0, alphabet.n_words), dtype=MASK_DT),
        starts=np.zeros(1, dtype=TARGET_DT),
        accepting=np.zeros(1, dtype=bool),
        deterministic=True,
    )


class Builder:
    """Incremental construction helper for small, hand-built automata."""

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.accepting: list[bool] = []
        self._edges: list[list[tuple[np.ndarray, int]]] = []

    def add_state(self, accepting: bool = False) -> int:
        self.accepting.append(accepting)
        self._edges.append([])
        return len(self.accepting) - 1

    def set_accepting(self, state: int, value: bool = True) -> None:
        self.accepting[state] = value

    def add_edge(self, src: int, mask: np.ndarray, dst: int) -> None:
        # mask must already be a uint64 word array from Alphabet.mask_of
        if not mask.any():
            return
        self._edges[src].append((mask, dst))

    def finish(self, starts: Sequence[int], deterministic: bool) -> BoundedAutomaton:
        n = len(self.accepting)
        counts = [len(es) for es in self._edges]
        indptr = np.zeros(n + 1, dtype=INDPTR_DT)
        indptr[1:] = np.cumsum(counts)
        ne = int(indptr[-1])
        targets = np.empty(ne, dtype=TARGET_DT)
        masks = np.empty((ne, self.alphabet.n_words), dtype=MASK_DT)
        pos = 0
        for es in self._edges:
            for mask, dst in es:
                targets[pos] = dst
                masks[pos] = mask
                pos += 1
        return BoundedAutomaton(
            alphabet=self.alphabet,
            indptr=indptr,
            targets=targets,
            masks=masks,
            starts=np.asarray(sorted(set(int(s) for s in starts)), dtype=TARGET_DT),
            accepting=np.asarray(self.accepting, dtype=bool),
            deterministic=deterministic,
        )


def _append_one_edge_per_state(
    a: BoundedAutomaton,
    extra_src: np.ndarray,
    extra_tgt: np.ndarray,
    extra_masks: np.ndarray,
    new_accepting: np.ndarray,
    extra_states: int = 0,
    tail_edges: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None,
    deterministic: bool | None = None,
) -> BoundedAutomaton:
    """Rebuild CSR with at most one extra edge appended per source state.

    ``tail_edges`` optionally supplies one edge per appended state (sources in
    ``[a.n_states, a.n_states + extra_states)``).
    """
    n_old = a.n_states
    n_new = n_old + extra_states
    counts = np.zeros(n_new, dtype=INDPTR_DT)
    counts[:n_old] = np.diff(a.indptr)
    counts[extra_src] += 1
    if tail_edges is not None:
        counts[tail_edges[0]] += 1
    indptr = np.zeros(n_new + 1, dtype=INDPTR_DT)
    indptr[1:] = np.cumsum(counts)
    ne = int(indptr[-1])
    targets = np.empty(ne, dtype=TARGET_DT)
    masks = np.empty((ne, a.alphabet.n_words), dtype=MASK_DT)
    # old edges keep their relative order at the front of each block
    if a.n_edges:
        src_old = np.repeat(np.arange(n_old, dtype=INDPTR_DT), np.diff(a.indptr))
        pos = indptr[src_old] + (np.arange(a.n_edges) - a.indptr[src_old])
        targets[pos] = a.targets
        masks[pos] = a.masks
    old_counts = np.concatenate([np.diff(a.indptr), np.zeros(extra_states, dtype=INDPTR_DT)])
    fill = indptr[:-1] + old_counts
    targets[fill[extra_src]] = extra_tgt
    masks[fill[extra_src]] = extra_masks
    if tail_edges is not None:
        tsrc, ttgt, tmsk = tail_edges
        targets[fill[tsrc]] = ttgt
        masks[fill[tsrc]] = tmsk
    return BoundedAutomaton(
        alphabet=a.alphabet,
        indptr=indptr,
        targets=targets,
        masks=masks,
        starts=a.starts,
        accepting=new_accepting,
        deterministic=a.deterministic if deterministic is None else deterministic,
    )


def union(parts: Sequence[BoundedAutomaton]) -> BoundedAutomaton:
    """Language union by disjoint juxtaposition; start set is all part starts."""
    if not parts:
        raise ValueError("union of no automata")
    if len(parts) == 1:
        return parts[0]
    alphabet = parts[0].alphabet
    for p in parts:
        if p.alphabet != alphabet:
            raise ValueError("automata over different alphabets")
    offsets = np.zeros(len(parts), dtype=INDPTR_DT)
    total = 0
    for i, p in enumerate(parts):
        offsets[i] = total
        total += p.n_states
    indptr_parts = [parts[0].indptr]
    edge_off = 0
    for i, p in enumerate(parts[1:], start=1):
        edge_off += parts[i - 1].n_edges
        indptr_parts.append(p.indptr[1:] + edge_off)
    indptr = np.concatenate(indptr_parts)
    targets = np.concatenate([p.targets + TARGET_DT(offsets[i]) for i, p in enumerate(parts)])
    masks = np.concatenate([p.masks for p in parts])
    starts = np.concatenate([p.starts + TARGET_DT(offsets[i]) for i, p in enumerate(parts)])
    accepting = np.concatenate([p.accepting for p in parts])
    return BoundedAutomaton(
        alphabet=alphabet,
        indptr=indptr,
        targets=targets,
        masks=masks,
        starts=np.sort(starts),
        accepting=accepting,
        deterministic=False,
    )


def concat_with_sentinels(parts: Sequence[BoundedAutomaton]) -> BoundedAutomaton:
    """Join per-component automata into one request-word automaton.

    Each part contributes its own states; every accepting state of part i gets
    a sentinel edge to the start of part i+1 (or, for the last part, to a
    fresh final state, the only accepting state of the result).  Since no part
    uses the sentinel internally, determinism is preserved.
    """
    if not parts:
        raise ValueError("concatenation of no automata")
    alphabet = parts[0].alphabet
    sent_mask = alphabet.mask_of_ids([alphabet.sentinel_id])
    offsets = []
    total = 0
    for p in parts:
        if p.alphabet != alphabet:
            raise ValueError("automata over different alphabets")
        if not p.deterministic or len(p.starts) != 1:
            raise ValueError("concatenation pieces must be deterministic")
        offsets.append(total)
        total += p.n_states
    final = total
    total += 1

    indptr_parts = [parts[0].indptr]
    edge_off = 0
    for i, p in enumerate(parts[1:], start=1):
        edge_off += parts[i - 1].n_edges
        indptr_parts.append(p.indptr[1:] + edge_off)
    n_edges = edge_off + parts[-1].n_edges
    indptr = np.concatenate(indptr_parts + [np.asarray([n_edges], dtype=INDPTR_DT)])
    targets = np.concatenate([p.targets + TARGET_DT(offsets[i]) for i, p in enumerate(parts)])
    masks = np.concatenate([p.masks for p in parts])
    accepting = np.zeros(total, dtype=bool)
    accepting[final] = True
    glue = BoundedAutomaton(
        alphabet=alphabet,
        indptr=indptr,
        targets=targets,
        masks=masks,
        starts=np.asarray([parts[0].start], dtype=TARGET_DT),
        accepting=accepting,
        deterministic=True,
    )
    # sentinel hops: accepting states of part i -> start of part i+1 / final
    srcs: list[int] = []
    tgts: list[int] = []
    for i, p in enumerate(parts):
        nxt = final if i + 1 == len(parts) else parts[i + 1].start + offsets[i + 1]
        for s in np.nonzero(p.accepting)[0]:
            srcs.append(int(s) + int(offsets[i]))
            tgts.append(nxt)
    extra_src = np.asarray(srcs, dtype=INDPTR_DT)
    extra_tgt = np.asarray(tgts, dtype=TARGET_DT)
    extra_masks = np.tile(sent_mask, (len(srcs), 1))
    return _append_one_edge_per_state(glue, extra_src, extra_tgt, extra_masks, accepting)


def complete_and_flip(a: BoundedAutomaton) -> BoundedAutomaton:
    """Complement step: add an explicit sink, then negate acceptance.

    The result recognizes the complement of ``a`` over the *unbounded* word
    universe; intersect it with a well-formedness automaton to restore the
    bounded request language.
    """
    if not a.deterministic:
        raise ValueError("complement needs a deterministic automaton")
    n = a.n_states
    W = a.alphabet.n_words
    full = a.alphabet.full_mask()
    used = np.zeros((n, W), dtype=MASK_DT)
    if a.n_edges:
        nonempty = a.indptr[:-1] < a.indptr[1:]
        starts_idx = a.indptr[:-1][nonempty]
        for w in range(W):
            used[nonempty, w] = np.bitwise_or.reduceat(a.masks[:, w], starts_idx)
    missing = (~used) & full
    has_missing = np.any(missing != 0, axis=1)
    sink = n
    extra_src = np.nonzero(has_missing)[0].astype(INDPTR_DT)
    extra_tgt = np.full(len(extra_src), sink, dtype=TARGET_DT)
    extra_masks = missing[has_missing]
    accepting = np.concatenate([~a.accepting, np.asarray([True])])
    tail = (
        np.asarray([sink], dtype=INDPTR_DT),
        np.asarray([sink], dtype=TARGET_DT),
        full.reshape(1, -1),
    )
    return _append_one_edge_per_state(
        a,
        extra_src,
        extra_tgt,
        extra_masks,
        accepting,
        extra_states=1,
        tail_edges=tail,
        deterministic=True,
    )


def reverse_csr(a: BoundedAutomaton) -> tuple[np.ndarray, np.ndarray]:
    """CSR of the reversed edge relation (masks dropped; connectivity only)."""
    n = a.n_states
    counts = np.bincount(a.targets, minlength=n).astype(INDPTR_DT)
    indptr = np.zeros(n + 1, dtype=INDPTR_DT)
    indptr[1:] = np.cumsum(counts)
    order = np.argsort(a.targets, kind="stable")
    src = np.repeat(np.arange(n, dtype=TARGET_DT), np.diff(a.indptr))
    return indptr, src[order]


def prune_dead(a: BoundedAutomaton) -> BoundedAutomaton:
    """Drop states that cannot reach acceptance; language is unchanged."""
    from .kernels import reach  # local import: kernels pick numba/pure lazily

    seeds = np.nonzero(a.accepting)[0].astype(TARGET_DT)
    if len(seeds) == 0:
        return make_empty(a.alphabet)
    rev_indptr, rev_targets = reverse_csr(a)
    keep = reach(rev_indptr, rev_targets, seeds)
    if bool(np.all(keep)):
        return a
    remap = np.full(a.n_states, -1, dtype=TARGET_DT)
    remap[keep] = np.arange(int(np.count_nonzero(keep)), dtype=TARGET_DT)
    src = np.repeat(np.arange(a.n_states, dtype=TARGET_DT), np.diff(a.indptr))
    live_edge = keep[src] & keep[a.targets]
    new_src = remap[src[live_edge]]
    new_tgt = remap[a.targets[live_edge]]
    new_masks = a.masks[live_edge]
    n_new = int(np.count_nonzero(keep))
    counts = np.bincount(new_src, minlength=n_new).astype(INDPTR_DT)
    indptr = np.zeros(n_new + 1, dtype=INDPTR_DT)
    indptr[1:] = np.cumsum(counts)
    live_starts = a.starts[keep[a.starts]]
    if len(live_starts) == 0:
        return make_empty(a.alphabet)
    return BoundedAutomaton(
        alphabet=a.alphabet,
        indptr=indptr,
        targets=new_tgt,
        masks=new_masks,
        starts=remap[live_starts],
        accepting=a.accepting[keep],
        deterministic=a.deterministic,
    )
