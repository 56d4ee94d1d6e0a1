"""Shared test utilities: independent oracles and small-instance generators.

The glob oracle here is a dynamic-programming matcher, deliberately separate
from the package's two-pointer implementation.  `all_words` enumerates a
bounded string domain so automata languages can be checked word by word.
"""

from __future__ import annotations

import itertools
import random

from policheck import (
    CharSet,
    MatchingStrategy,
    Policy,
    PolicySet,
    PolicyType,
    Request,
    StringComponentDef,
    StringEnumComponentDef,
)

WILDCARD = "*"


def glob_match_dp(pattern: str, value: str) -> bool:
    """Table matcher over (len(pattern)+1) x (len(value)+1); the oracle."""
    m, n = len(pattern), len(value)
    table = [[False] * (n + 1) for _ in range(m + 1)]
    table[0][0] = True
    for i in range(1, m + 1):
        pc = pattern[i - 1]
        if pc == WILDCARD:
            table[i][0] = table[i - 1][0]
        for j in range(1, n + 1):
            if pc == WILDCARD:
                table[i][j] = table[i - 1][j] or table[i][j - 1]
            else:
                table[i][j] = table[i - 1][j - 1] and value[j - 1] == pc
    return table[m][n]


def all_words(chars: str, max_len: int) -> list[str]:
    """Every word over ``chars`` up to ``max_len``, shortest first."""
    out = [""]
    for length in range(1, max_len + 1):
        out.extend("".join(t) for t in itertools.product(sorted(chars), repeat=length))
    return out


def enumerate_requests(pt: PolicyType) -> list[Request]:
    domains = []
    for _, comp in pt.flat_components:
        if isinstance(comp, StringEnumComponentDef):
            domains.append(list(comp.values))
        else:
            domains.append(all_words("".join(comp.charset.concrete_chars), comp.max_len))
    return [Request(pt, tuple(combo)) for combo in itertools.product(*domains)]


def small_string_type(
    chars: str = "ab*", max_len: int = 2, n_components: int = 1
) -> PolicyType:
    comps = tuple(
        StringComponentDef(
            f"c{i}", CharSet.from_string(chars), max_len, MatchingStrategy.WILDCARD
        )
        for i in range(n_components)
    )
    return PolicyType("small", comps)


def random_pattern(rng: random.Random, chars: str, max_len: int) -> str:
    body_chars = [c for c in chars if c != WILDCARD] + [WILDCARD, WILDCARD]
    length = rng.randint(0, max_len)
    return "".join(rng.choice(body_chars) for _ in range(length))


def random_policy_set(
    rng: random.Random, pt: PolicyType, max_policies: int = 4
) -> PolicySet:
    policies = []
    for _ in range(rng.randint(0, max_policies)):
        values = []
        for _, comp in pt.flat_components:
            if isinstance(comp, StringEnumComponentDef):
                if comp.strategy is MatchingStrategy.WILDCARD and rng.random() < 0.3:
                    values.append(WILDCARD)
                else:
                    values.append(rng.choice(comp.values))
            else:
                values.append(
                    random_pattern(rng, "".join(comp.charset.chars), comp.max_len)
                )
        decision = "allow" if rng.random() < 0.7 else "deny"
        policies.append(Policy(pt, tuple(values), decision))
    return PolicySet(pt, tuple(policies))
