"""Pure numpy/Python implementations of the hot automata kernels.

These are the fallback path when numba is unavailable or disabled via
``POLICHECK_NO_NUMBA``.  They must stay behaviorally identical to the numba
twins in ``_kernels_numba``: same state numbering (FIFO discovery order) and
same edge emission order, so results are bit-for-bit reproducible across the
two paths.
"""

from __future__ import annotations

import numpy as np

OK = 0
BUDGET_EXCEEDED = 1


def _iter_bits(mask: np.ndarray):
    """Yield set bit positions of a multi-word mask, ascending."""
    for w in range(len(mask)):
        bits = int(mask[w])
        base = w << 6
        while bits:
            low = bits & -bits
            yield base + low.bit_length() - 1
            bits ^= low


def product(
    indptr_a,
    targets_a,
    masks_a,
    acc_a,
    indptr_b,
    targets_b,
    masks_b,
    acc_b,
    starts_a,
    starts_b,
    max_states,
):
    """Synchronized-pair exploration of two automata (language intersection)."""
    W = masks_a.shape[1]
    ids: dict[tuple[int, int], int] = {}
    pair_u: list[int] = []
    pair_v: list[int] = []
    for u in starts_a:
        for v in starts_b:
            key = (int(u), int(v))
            if key not in ids:
                ids[key] = len(pair_u)
                pair_u.append(key[0])
                pair_v.append(key[1])
    indptr_out = [0]
    out_tgt: list[int] = []
    out_msk: list[np.ndarray] = []
    status = OK
    k = 0
    while k < len(pair_u):
        u, v = pair_u[k], pair_v[k]
        for ea in range(indptr_a[u], indptr_a[u + 1]):
            ma = masks_a[ea]
            ta = int(targets_a[ea])
            for eb in range(indptr_b[v], indptr_b[v + 1]):
                m = ma & masks_b[eb]
                if not m.any():
                    continue
                key = (ta, int(targets_b[eb]))
                nid = ids.get(key)
                if nid is None:
                    if len(pair_u) >= max_states:
                        status = BUDGET_EXCEEDED
                        break
                    nid = len(pair_u)
                    ids[key] = nid
                    pair_u.append(key[0])
                    pair_v.append(key[1])
                out_tgt.append(nid)
                out_msk.append(m)
            if status:
                break
        if status:
            break
        indptr_out.append(len(out_tgt))
        k += 1
    n = len(indptr_out) - 1
    pu = np.asarray(pair_u[:n], dtype=np.int32)
    pv = np.asarray(pair_v[:n], dtype=np.int32)
    acc = acc_a[pu] & acc_b[pv] if n else np.zeros(0, dtype=bool)
    masks_arr = (
        np.stack(out_msk) if out_msk else np.zeros((0, W), dtype=np.uint64)
    )
    return (
        np.asarray(indptr_out, dtype=np.int64),
        np.asarray(out_tgt, dtype=np.int32),
        masks_arr,
        acc,
        pu,
        pv,
        status,
    )


def determinize(indptr, targets, masks, acc, starts, n_symbols, max_states):
    """On-the-fly subset construction over a masked-edge NFA."""
    W = masks.shape[1]
    subsets: list[np.ndarray] = []
    ids: dict[bytes, int] = {}

    def intern(arr: np.ndarray) -> int:
        key = arr.tobytes()
        nid = ids.get(key)
        if nid is None:
            nid = len(subsets)
            ids[key] = nid
            subsets.append(arr)
        return nid

    intern(np.unique(np.asarray(starts, dtype=np.int32)))
    indptr_out = [0]
    out_tgt: list[int] = []
    out_msk: list[np.ndarray] = []
    out_acc: list[bool] = []
    status = OK
    k = 0
    while k < len(subsets):
        S = subsets[k]
        edge_ids: list[int] = []
        for st in S:
            edge_ids.extend(range(int(indptr[st]), int(indptr[st + 1])))
        combined = np.zeros(W, dtype=np.uint64)
        for e in edge_ids:
            combined |= masks[e]
        emitted: list[tuple[int, int]] = []  # (successor subset id, edge slot)
        for s in _iter_bits(combined):
            w = s >> 6
            bit = np.uint64(1 << (s & 63))
            succ = {int(targets[e]) for e in edge_ids if masks[e, w] & bit}
            if not succ:
                continue
            arr = np.asarray(sorted(succ), dtype=np.int32)
            sid = intern(arr)
            if len(subsets) > max_states:
                status = BUDGET_EXCEEDED
                break
            slot = -1
            for t, sl in emitted:
                if t == sid:
                    slot = sl
                    break
            if slot >= 0:
                out_msk[slot][w] |= bit
            else:
                slot = len(out_tgt)
                m = np.zeros(W, dtype=np.uint64)
                m[w] |= bit
                out_tgt.append(sid)
                out_msk.append(m)
                emitted.append((sid, slot))
        if status:
            break
        out_acc.append(bool(acc[S].any()))
        indptr_out.append(len(out_tgt))
        k += 1
    masks_arr = (
        np.stack(out_msk) if out_msk else np.zeros((0, W), dtype=np.uint64)
    )
    return (
        np.asarray(indptr_out, dtype=np.int64),
        np.asarray(out_tgt, dtype=np.int32),
        masks_arr,
        np.asarray(out_acc, dtype=bool),
        status,
    )


def reach(indptr, targets, seeds):
    """States reachable from ``seeds`` along the given CSR edges."""
    n = len(indptr) - 1
    vis = np.zeros(n, dtype=bool)
    stack = [int(s) for s in seeds]
    for s in stack:
        vis[s] = True
    while stack:
        u = stack.pop()
        for e in range(int(indptr[u]), int(indptr[u + 1])):
            t = int(targets[e])
            if not vis[t]:
                vis[t] = True
                stack.append(t)
    return vis
