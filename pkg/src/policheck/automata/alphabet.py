"""Indexed symbol table shared by every automaton built for one policy type.

Symbols are a single sentinel symbol (used to join per-component words into
one request word) followed by the union of all component charsets (and enum
value characters) sorted by codepoint.  The sentinel comes first so that the
lexicographically smallest accepting word, which drives counterexample
extraction, prefers ending a component over extending it.  Symbol sets are
handled as fixed-width bitmasks (numpy uint64 words) so transition edges can
carry an entire character class at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from ..core import PolicyType, StringEnumComponentDef


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]  # sentinel first

    def __post_init__(self) -> None:
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet contains duplicate symbols")
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(self.symbols)})

    @property
    def n_symbols(self) -> int:
        return len(self.symbols)

    @property
    def n_words(self) -> int:
        return (self.n_symbols + 63) // 64

    @property
    def sentinel_id(self) -> int:
        return 0

    @property
    def sentinel_char(self) -> str:
        return self.symbols[0]

    def symbol_id(self, c: str) -> int:
        return self._index[c]  # type: ignore[attr-defined]

    def mask_of(self, chars: Iterable[str]) -> np.ndarray:
        """Bitmask (one uint64 per 64 symbols) covering the given characters."""
        m = np.zeros(self.n_words, dtype=np.uint64)
        idx = self._index  # type: ignore[attr-defined]
        for c in chars:
            i = idx[c]
            m[i >> 6] |= np.uint64(1) << np.uint64(i & 63)
        return m

    def mask_of_ids(self, ids: Iterable[int]) -> np.ndarray:
        m = np.zeros(self.n_words, dtype=np.uint64)
        for i in ids:
            m[i >> 6] |= np.uint64(1) << np.uint64(i & 63)
        return m

    def full_mask(self) -> np.ndarray:
        return self.mask_of_ids(range(self.n_symbols))

    def symbols_in_mask(self, mask: np.ndarray) -> list[int]:
        out = []
        for w in range(self.n_words):
            bits = int(mask[w])
            while bits:
                low = bits & -bits
                out.append((w << 6) + low.bit_length() - 1)
                bits ^= low
        return out

    def word_to_ids(self, word: str) -> list[int]:
        return [self.symbol_id(c) for c in word]

    def ids_to_word(self, ids: Iterable[int]) -> str:
        return "".join(self.symbols[i] for i in ids)

    def split_request_word(self, word: str) -> list[str]:
        """Split a full request word on sentinels; one piece per component."""
        parts = word.split(self.sentinel_char)
        if parts and parts[-1] == "":
            parts = parts[:-1]
        return parts


def _component_chars(pt: PolicyType) -> set[str]:
    chars: set[str] = set()
    for _, comp in pt.flat_components:
        if isinstance(comp, StringEnumComponentDef):
            chars.update(comp.value_chars)
        else:
            chars.update(comp.charset.chars)
    return chars


def _pick_sentinel(used: set[str]) -> str:
    cp = 0
    while chr(cp) in used:
        cp += 1
    return chr(cp)


@lru_cache(maxsize=None)
def alphabet_for(pt: PolicyType) -> Alphabet:
    """The canonical alphabet of a policy type: sentinel, then sorted charsets."""
    chars = _component_chars(pt)
    sentinel = _pick_sentinel(chars)
    return Alphabet((sentinel,) + tuple(sorted(chars)))
