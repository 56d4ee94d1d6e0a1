"""Numba-compiled twins of the automata kernels.

Same contracts and, crucially, same traversal order as ``_kernels_py``:
states are numbered in FIFO discovery order and edges are emitted grouped by
first triggering symbol, so both paths produce identical arrays.
"""

from __future__ import annotations

import numpy as np
from numba import njit

OK = 0
BUDGET_EXCEEDED = 1

_FNV_OFFSET = np.uint64(0xCBF29CE484222325)
_FNV_PRIME = np.uint64(0x100000001B3)


@njit(cache=True, inline="always")
def _mix(x):
    # splitmix64 finalizer; good avalanche for sequential pair keys
    z = np.uint64(x)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
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
    W = masks_a.shape[1]
    nb = np.int64(acc_b.shape[0])

    cap = 1024
    pair_u = np.empty(cap, np.int32)
    pair_v = np.empty(cap, np.int32)
    n = 0

    tcap = np.int64(4096)
    table = np.full(tcap, -1, np.int64)

    ecap = 1024
    out_tgt = np.empty(ecap, np.int32)
    out_msk = np.empty((ecap, W), np.uint64)
    ne = 0

    icap = 1024
    indptr_out = np.empty(icap, np.int64)
    indptr_out[0] = 0

    status = OK

    # seed with the cross product of start states
    for si in range(starts_a.shape[0]):
        for sj in range(starts_b.shape[0]):
            u = np.int64(starts_a[si])
            v = np.int64(starts_b[sj])
            key = u * nb + v
            h = _mix(key) & np.uint64(tcap - 1)
            while True:
                slot = table[np.int64(h)]
                if slot == -1:
                    if n == cap:
                        cap *= 2
                        nu = np.empty(cap, np.int32)
                        nv = np.empty(cap, np.int32)
                        nu[:n] = pair_u[:n]
                        nv[:n] = pair_v[:n]
                        pair_u, pair_v = nu, nv
                    pair_u[n] = u
                    pair_v[n] = v
                    table[np.int64(h)] = n
                    n += 1
                    break
                if pair_u[slot] == u and pair_v[slot] == v:
                    break
                h = (h + np.uint64(1)) & np.uint64(tcap - 1)

    k = 0
    while k < n:
        u = pair_u[k]
        v = pair_v[k]
        for ea in range(indptr_a[u], indptr_a[u + 1]):
            ta = np.int64(targets_a[ea])
            for eb in range(indptr_b[v], indptr_b[v + 1]):
                nonzero = False
                for w in range(W):
                    if masks_a[ea, w] & masks_b[eb, w]:
                        nonzero = True
                        break
                if not nonzero:
                    continue
                tb = np.int64(targets_b[eb])
                key = ta * nb + tb
                h = _mix(key) & np.uint64(tcap - 1)
                tid = -1
                while True:
                    slot = table[np.int64(h)]
                    if slot == -1:
                        if n >= max_states:
                            status = BUDGET_EXCEEDED
                            break
                        if n == cap:
                            cap *= 2
                            nu = np.empty(cap, np.int32)
                            nv = np.empty(cap, np.int32)
                            nu[:n] = pair_u[:n]
                            nv[:n] = pair_v[:n]
                            pair_u, pair_v = nu, nv
                        pair_u[n] = np.int32(ta)
                        pair_v[n] = np.int32(tb)
                        table[np.int64(h)] = n
                        tid = n
                        n += 1
                        # grow and rehash at 50% load
                        if 2 * n >= tcap:
                            tcap *= 4
                            table = np.full(tcap, -1, np.int64)
                            for i in range(n):
                                kk = np.int64(pair_u[i]) * nb + np.int64(pair_v[i])
                                hh = _mix(kk) & np.uint64(tcap - 1)
                                while table[np.int64(hh)] != -1:
                                    hh = (hh + np.uint64(1)) & np.uint64(tcap - 1)
                                table[np.int64(hh)] = i
                        break
                    if pair_u[slot] == ta and pair_v[slot] == tb:
                        tid = slot
                        break
                    h = (h + np.uint64(1)) & np.uint64(tcap - 1)
                if status:
                    break
                if ne == ecap:
                    ecap *= 2
                    nt = np.empty(ecap, np.int32)
                    nm = np.empty((ecap, W), np.uint64)
                    nt[:ne] = out_tgt[:ne]
                    nm[:ne] = out_msk[:ne]
                    out_tgt, out_msk = nt, nm
                out_tgt[ne] = tid
                for w in range(W):
                    out_msk[ne, w] = masks_a[ea, w] & masks_b[eb, w]
                ne += 1
            if status:
                break
        if status:
            break
        if k + 2 > icap - 1:
            icap *= 2
            ni = np.empty(icap, np.int64)
            ni[: k + 1] = indptr_out[: k + 1]
            indptr_out = ni
        indptr_out[k + 1] = ne
        k += 1

    n_done = k
    acc = np.empty(n_done, np.bool_)
    for i in range(n_done):
        acc[i] = acc_a[pair_u[i]] and acc_b[pair_v[i]]
    return (
        indptr_out[: n_done + 1].copy(),
        out_tgt[:ne].copy(),
        out_msk[:ne].copy(),
        acc,
        pair_u[:n_done].copy(),
        pair_v[:n_done].copy(),
        status,
    )


@njit(cache=True)
def determinize(indptr, targets, masks, acc, starts, n_symbols, max_states):
    W = masks.shape[1]

    pcap = 4096
    pool = np.empty(pcap, np.int32)
    pn = 0
    scap = 1024
    sub_off = np.empty(scap + 1, np.int64)
    sub_off[0] = 0
    n_sub = 0

    tcap = np.int64(4096)
    table = np.full(tcap, -1, np.int64)

    ecap = 1024
    out_tgt = np.empty(ecap, np.int32)
    out_msk = np.empty((ecap, W), np.uint64)
    ne = 0
    indptr_out = np.empty(scap + 1, np.int64)
    indptr_out[0] = 0
    out_acc = np.empty(scap, np.bool_)

    scratch_cap = 256
    succbuf = np.empty(scratch_cap, np.int32)
    symsucc = np.empty(n_symbols, np.int64)

    status = OK

    # intern the start subset (sorted unique)
    start_arr = np.unique(starts.astype(np.int32))
    m0 = start_arr.shape[0]
    while pn + m0 > pcap:
        pcap *= 2
    if pool.shape[0] < pcap:
        npool = np.empty(pcap, np.int32)
        npool[:pn] = pool[:pn]
        pool = npool
    for i in range(m0):
        pool[pn + i] = start_arr[i]
    h = _FNV_OFFSET
    for i in range(m0):
        h = (h ^ np.uint64(start_arr[i])) * _FNV_PRIME
    slot_h = h & np.uint64(tcap - 1)
    table[np.int64(slot_h)] = 0
    sub_off[1] = m0
    pn += m0
    n_sub = 1

    k = 0
    while k < n_sub:
        lo = sub_off[k]
        hi = sub_off[k + 1]
        # union of member edge masks: symbols absent here have no successor
        combined = np.zeros(W, np.uint64)
        for i in range(lo, hi):
            st = pool[i]
            for e in range(indptr[st], indptr[st + 1]):
                for w in range(W):
                    combined[w] |= masks[e, w]
        for s in range(n_symbols):
            symsucc[s] = -1
        for s in range(n_symbols):
            w = s >> 6
            bit = np.uint64(1) << np.uint64(s & 63)
            if not (combined[w] & bit):
                continue
            cnt = 0
            for i in range(lo, hi):
                st = pool[i]
                for e in range(indptr[st], indptr[st + 1]):
                    if masks[e, w] & bit:
                        if cnt == scratch_cap:
                            scratch_cap *= 2
                            nbuf = np.empty(scratch_cap, np.int32)
                            nbuf[:cnt] = succbuf[:cnt]
                            succbuf = nbuf
                        succbuf[cnt] = targets[e]
                        cnt += 1
            if cnt == 0:
                continue
            # insertion sort in place; successor sets are typically tiny
            sub = succbuf
            for i in range(1, cnt):
                x = sub[i]
                j = i - 1
                while j >= 0 and sub[j] > x:
                    sub[j + 1] = sub[j]
                    j -= 1
                sub[j + 1] = x
            m = 1
            for i in range(1, cnt):
                if sub[i] != sub[m - 1]:
                    sub[m] = sub[i]
                    m += 1
            # intern sub[:m]
            h = _FNV_OFFSET
            for i in range(m):
                h = (h ^ np.uint64(sub[i])) * _FNV_PRIME
            hh = h & np.uint64(tcap - 1)
            sid = -1
            while True:
                slot = table[np.int64(hh)]
                if slot == -1:
                    if n_sub > max_states:
                        status = BUDGET_EXCEEDED
                        break
                    # append subset
                    if n_sub == scap:
                        scap *= 2
                        noff = np.empty(scap + 1, np.int64)
                        noff[: n_sub + 1] = sub_off[: n_sub + 1]
                        sub_off = noff
                        nacc = np.empty(scap, np.bool_)
                        nacc[:n_sub] = out_acc[:n_sub]
                        out_acc = nacc
                        nind = np.empty(scap + 1, np.int64)
                        nind[: n_sub + 1] = indptr_out[: n_sub + 1]
                        indptr_out = nind
                    while pn + m > pcap:
                        pcap *= 2
                    if pool.shape[0] < pcap:
                        npool = np.empty(pcap, np.int32)
                        npool[:pn] = pool[:pn]
                        pool = npool
                    for i in range(m):
                        pool[pn + i] = sub[i]
                    pn += m
                    sub_off[n_sub + 1] = pn
                    table[np.int64(hh)] = n_sub
                    sid = n_sub
                    n_sub += 1
                    if 2 * n_sub >= tcap:
                        tcap *= 4
                        table = np.full(tcap, -1, np.int64)
                        for j in range(n_sub):
                            h2 = _FNV_OFFSET
                            for i in range(sub_off[j], sub_off[j + 1]):
                                h2 = (h2 ^ np.uint64(pool[i])) * _FNV_PRIME
                            hh2 = h2 & np.uint64(tcap - 1)
                            while table[np.int64(hh2)] != -1:
                                hh2 = (hh2 + np.uint64(1)) & np.uint64(tcap - 1)
                            table[np.int64(hh2)] = j
                    break
                # compare content
                slo = sub_off[slot]
                shi = sub_off[slot + 1]
                if shi - slo == m:
                    same = True
                    for i in range(m):
                        if pool[slo + i] != sub[i]:
                            same = False
                            break
                    if same:
                        sid = slot
                        break
                hh = (hh + np.uint64(1)) & np.uint64(tcap - 1)
            if status:
                break
            symsucc[s] = sid
        if status:
            break
        # emit edges grouped by successor, in first-symbol order
        base = ne
        for s in range(n_symbols):
            sid = symsucc[s]
            if sid < 0:
                continue
            w = s >> 6
            bit = np.uint64(1) << np.uint64(s & 63)
            found = -1
            for e in range(base, ne):
                if out_tgt[e] == sid:
                    found = e
                    break
            if found >= 0:
                out_msk[found, w] |= bit
            else:
                if ne == ecap:
                    ecap *= 2
                    nt = np.empty(ecap, np.int32)
                    nm = np.empty((ecap, W), np.uint64)
                    nt[:ne] = out_tgt[:ne]
                    nm[:ne] = out_msk[:ne]
                    out_tgt, out_msk = nt, nm
                out_tgt[ne] = sid
                for w2 in range(W):
                    out_msk[ne, w2] = np.uint64(0)
                out_msk[ne, w] = bit
                ne += 1
        # record acceptance and close the CSR row
        is_acc = False
        for i in range(lo, hi):
            if acc[pool[i]]:
                is_acc = True
                break
        out_acc[k] = is_acc
        indptr_out[k + 1] = ne
        k += 1

    n_done = k
    return (
        indptr_out[: n_done + 1].copy(),
        out_tgt[:ne].copy(),
        out_msk[:ne].copy(),
        out_acc[:n_done].copy(),
        status,
    )


@njit(cache=True)
def reach(indptr, targets, seeds):
    n = indptr.shape[0] - 1
    vis = np.zeros(n, np.bool_)
    stack = np.empty(n, np.int64)
    top = 0
    for i in range(seeds.shape[0]):
        s = np.int64(seeds[i])
        if not vis[s]:
            vis[s] = True
            stack[top] = s
            top += 1
    while top > 0:
        top -= 1
        u = stack[top]
        for e in range(indptr[u], indptr[u + 1]):
            t = np.int64(targets[e])
            if not vis[t]:
                vis[t] = True
                stack[top] = t
                top += 1
    return vis
