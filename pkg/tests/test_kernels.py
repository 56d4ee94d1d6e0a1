"""The numba kernels and their pure-Python twins must agree bit for bit."""

import random

import numpy as np
import pytest

from policheck.automata import _kernels_py as kpy

numba_kernels = pytest.importorskip("policheck.automata._kernels_numba")


def random_nfa(rng: random.Random, n_states: int, n_symbols: int):
    """Arbitrary masked-edge NFA arrays (not necessarily meaningful)."""
    n_words = (n_symbols + 63) // 64
    edges = []
    for src in range(n_states):
        for _ in range(rng.randint(0, 3)):
            mask = np.zeros(n_words, dtype=np.uint64)
            for _ in range(rng.randint(1, 3)):
                s = rng.randrange(n_symbols)
                mask[s >> 6] |= np.uint64(1 << (s & 63))
            edges.append((src, mask, rng.randrange(n_states)))
    indptr = np.zeros(n_states + 1, dtype=np.int64)
    for src, _, _ in edges:
        indptr[src + 1] += 1
    indptr = np.cumsum(indptr).astype(np.int64)
    targets = np.empty(len(edges), dtype=np.int32)
    masks = np.zeros((len(edges), n_words), dtype=np.uint64)
    cursor = indptr[:-1].copy()
    for src, mask, dst in edges:
        targets[cursor[src]] = dst
        masks[cursor[src]] = mask
        cursor[src] += 1
    acc = np.array([rng.random() < 0.3 for _ in range(n_states)], dtype=bool)
    n_starts = rng.randint(1, min(3, n_states))
    starts = np.array(sorted(rng.sample(range(n_states), n_starts)), dtype=np.int32)
    return indptr, targets, masks, acc, starts


def assert_same(result_a, result_b):
    assert len(result_a) == len(result_b)
    for x, y in zip(result_a, result_b):
        if isinstance(x, np.ndarray):
            assert x.shape == y.shape
            assert np.array_equal(x, y)
        else:
            assert x == y


@pytest.mark.parametrize("seed", range(12))
def test_determinize_twins(seed):
    rng = random.Random(seed)
    n_symbols = rng.choice((3, 9, 70))
    nfa = random_nfa(rng, rng.randint(1, 14), n_symbols)
    out_nb = numba_kernels.determinize(*nfa, n_symbols, 100_000)
    out_py = kpy.determinize(*nfa, n_symbols, 100_000)
    assert_same(out_nb, out_py)


@pytest.mark.parametrize("seed", range(12))
def test_product_twins(seed):
    rng = random.Random(1000 + seed)
    n_symbols = rng.choice((3, 9, 70))
    a = random_nfa(rng, rng.randint(1, 12), n_symbols)
    b = random_nfa(rng, rng.randint(1, 12), n_symbols)
    ind_a, tgt_a, msk_a, acc_a, starts_a = a
    ind_b, tgt_b, msk_b, acc_b, starts_b = b
    args = (
        ind_a, tgt_a, msk_a, acc_a,
        ind_b, tgt_b, msk_b, acc_b,
        starts_a, starts_b, 100_000,
    )
    assert_same(numba_kernels.product(*args), kpy.product(*args))


@pytest.mark.parametrize("seed", range(8))
def test_reach_twins(seed):
    rng = random.Random(2000 + seed)
    nfa = random_nfa(rng, rng.randint(1, 20), 5)
    indptr, targets, _, acc, starts = nfa
    seeds = np.nonzero(acc)[0].astype(np.int32)
    out_nb = numba_kernels.reach(indptr, targets, seeds)
    out_py = kpy.reach(indptr, targets, seeds)
    assert np.array_equal(out_nb, out_py)


def test_budget_status_twins():
    rng = random.Random(9)
    nfa = random_nfa(rng, 14, 9)
    out_nb = numba_kernels.determinize(*nfa, 9, 1)
    out_py = kpy.determinize(*nfa, 9, 1)
    assert out_nb[-1] == out_py[-1] == kpy.BUDGET_EXCEEDED


def test_full_pipeline_matches_across_engines(monkeypatch):
    """A whole implication query gives identical verdicts on both paths."""
    import subprocess
    import sys

    code = (
        "import json\n"
        "from policheck import CharSet, MatchingStrategy, Policy, PolicySet, PolicyType, StringComponentDef\n"
        "from policheck.automata import check_implication\n"
        "W = MatchingStrategy.WILDCARD\n"
        "pt = PolicyType('t', (StringComponentDef('x', CharSet.from_string('abc*'), 3, W),))\n"
        "p = PolicySet(pt, (Policy(pt, ('a*',), 'allow'), Policy(pt, ('ab*',), 'deny')))\n"
        "q = PolicySet(pt, (Policy(pt, ('*',), 'allow'), Policy(pt, ('abc',), 'deny')))\n"
        "v1 = check_implication(p, q)\n"
        "v2 = check_implication(q, p)\n"
        "print(json.dumps([v1.kind.value, list(v1.counterexample.values) if v1.counterexample else None,\n"
        "                  v2.kind.value, list(v2.counterexample.values) if v2.counterexample else None]))\n"
    )
    outputs = []
    for flag in ("0", "1"):
        proc = subprocess.run(
            [sys.executable, "-c", code],
            capture_output=True,
            text=True,
            env={**__import__("os").environ, "POLICHECK_NO_NUMBA": flag},
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append(proc.stdout.strip())
    assert outputs[0] == outputs[1]
