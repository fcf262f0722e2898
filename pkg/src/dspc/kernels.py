"""Compiled inner loops for the label index.

Label storage used by every kernel:

* ``hub[v]``, ``dist[v]``, ``cnt[v]`` are per-vertex arrays held in numba
  typed lists; ``size[v]`` is the number of live entries.
* Hubs are stored as *ranks* (0 = highest), so "descending hub rank" order
  is plain ascending integer order and a merge-scan needs no lookups.
* ``refs[r]`` counts the labels, self-label included, whose hub has rank ``r``.
* Counts are ``uint64``. Every add/multiply is overflow-checked and raises
  the flag ``err[0]``; the Python layer turns that into an exception.

Scratch arrays ``D``/``C``/``U``/``queue`` are allocated once by the caller
and handed back clean: each traversal resets only the slots it touched.
"""

from __future__ import annotations

import numpy as np
from numba import njit, types
from numba.typed import List

INF = np.int32(2147483647)
# empty slot of a dense row: large enough to lose every comparison, small
# enough that adding a label distance cannot overflow int32
ROW_INF = np.int32(1 << 29)
U64_MAX = np.uint64(0xFFFFFFFFFFFFFFFF)
ZERO = np.uint64(0)
ONE = np.uint64(1)
NO_LIMIT = np.int64(1) << np.int64(40)

# stats slots
RENEW_C, RENEW_D, INSERTED, REMOVED, VISITED = 0, 1, 2, 3, 4
N_STATS = 5

_i32 = types.int32[::1]
_u64 = types.uint64[::1]


@njit(cache=True)
def add_u64(a, b, err):
    s = a + b
    if s < a:
        err[0] = 1
    return s


@njit(cache=True)
def mul_u64(a, b, err):
    if a != ZERO and b > U64_MAX // a:
        err[0] = 1
    return a * b


@njit(cache=True)
def new_store(n, init_cap):
    hub = List.empty_list(_i32)
    dist = List.empty_list(_i32)
    cnt = List.empty_list(_u64)
    for _ in range(n):
        hub.append(np.empty(init_cap, np.int32))
        dist.append(np.empty(init_cap, np.int32))
        cnt.append(np.empty(init_cap, np.uint64))
    return hub, dist, cnt


@njit(cache=True)
def _grow(hub, dist, cnt, v, need):
    cap = hub[v].shape[0]
    if need <= cap:
        return
    new_cap = max(4, 2 * cap, need)
    h = np.empty(new_cap, np.int32)
    d = np.empty(new_cap, np.int32)
    c = np.empty(new_cap, np.uint64)
    h[:cap] = hub[v]
    d[:cap] = dist[v]
    c[:cap] = cnt[v]
    hub[v] = h
    dist[v] = d
    cnt[v] = c


@njit(cache=True)
def find_label(hub, size, v, hr):
    """Position of hub rank ``hr`` in ``L(v)``, or ``-1``."""
    arr = hub[v]
    lo = 0
    hi = size[v]
    while lo < hi:
        mid = (lo + hi) >> 1
        if arr[mid] < hr:
            lo = mid + 1
        else:
            hi = mid
    if lo < size[v] and arr[lo] == hr:
        return lo
    return -1


@njit(cache=True)
def insert_label(hub, dist, cnt, size, refs, v, hr, d, c):
    """Insert a hub known to be absent, keeping rank order."""
    k = size[v]
    _grow(hub, dist, cnt, v, k + 1)
    h_arr = hub[v]
    d_arr = dist[v]
    c_arr = cnt[v]
    pos = k
    while pos > 0 and h_arr[pos - 1] > hr:
        h_arr[pos] = h_arr[pos - 1]
        d_arr[pos] = d_arr[pos - 1]
        c_arr[pos] = c_arr[pos - 1]
        pos -= 1
    h_arr[pos] = hr
    d_arr[pos] = d
    c_arr[pos] = c
    size[v] = k + 1
    refs[hr] += 1


@njit(cache=True)
def remove_at(hub, dist, cnt, size, refs, v, pos):
    k = size[v]
    h_arr = hub[v]
    refs[h_arr[pos]] -= 1
    d_arr = dist[v]
    c_arr = cnt[v]
    for i in range(pos, k - 1):
        h_arr[i] = h_arr[i + 1]
        d_arr[i] = d_arr[i + 1]
        c_arr[i] = c_arr[i + 1]
    size[v] = k - 1


@njit(cache=True)
def append_label(hub, dist, cnt, size, refs, v, hr, d, c):
    k = size[v]
    _grow(hub, dist, cnt, v, k + 1)
    refs[hr] += 1
    hub[v][k] = hr
    dist[v][k] = d
    cnt[v][k] = c
    size[v] = k + 1


@njit(cache=True)
def query_pair(hub, dist, cnt, size, s, t, limit, err):
    """Merge-scan of ``L(s)`` and ``L(t)`` over common hubs with rank < ``limit``."""
    hs = hub[s]
    ht = hub[t]
    ds = dist[s]
    dt = dist[t]
    cs = cnt[s]
    ct = cnt[t]
    ns = size[s]
    nt = size[t]
    i = 0
    j = 0
    best = np.int64(INF)
    c = ZERO
    while i < ns and j < nt:
        a = hs[i]
        b = ht[j]
        if a >= limit or b >= limit:
            break
        if a == b:
            d = np.int64(ds[i]) + np.int64(dt[j])
            if d < best:
                best = d
                c = mul_u64(cs[i], ct[j], err)
            elif d == best:
                c = add_u64(c, mul_u64(cs[i], ct[j], err), err)
            i += 1
            j += 1
        elif a < b:
            i += 1
        else:
            j += 1
    if best >= INF:
        return np.int64(INF), ZERO
    return best, c


@njit(cache=True)
def load_row(hub, dist, cnt, size, x, Td, Tc):
    """Scatter ``L(x)`` into dense rank-indexed arrays for repeated queries against ``x``."""
    hx = hub[x]
    dx = dist[x]
    cx = cnt[x]
    for k in range(size[x]):
        Td[hx[k]] = dx[k]
        Tc[hx[k]] = cx[k]


@njit(cache=True)
def clear_row(hub, size, x, Td, Tc):
    hx = hub[x]
    for k in range(size[x]):
        Td[hx[k]] = ROW_INF
        Tc[hx[k]] = ZERO


@njit(cache=True)
def row_covers(hub, dist, size, v, Td, limit, bound):
    """Whether the loaded row and ``L(v)`` share a hub ranked above ``limit`` at distance < ``bound``.

    Stops at the first witness; this is the only question the pruning rules ask.
    """
    hv = hub[v]
    dv = dist[v]
    for k in range(size[v]):
        r = hv[k]
        if r >= limit:
            break
        if Td[r] + dv[k] < bound:
            return True
    return False


@njit(cache=True)
def row_query(hub, dist, cnt, size, v, Td, Tc, err):
    """Full ``(dist, count)`` query between the loaded row and ``L(v)``."""
    hv = hub[v]
    dv = dist[v]
    cv = cnt[v]
    best = np.int64(INF)
    c = ZERO
    for k in range(size[v]):
        x = np.int64(Td[hv[k]] + dv[k])
        if x < best:
            best = x
            c = mul_u64(Tc[hv[k]], cv[k], err)
        elif x == best:
            c = add_u64(c, mul_u64(Tc[hv[k]], cv[k], err), err)
    if best >= ROW_INF:
        return np.int64(INF), ZERO
    return best, c


@njit(cache=True)
def query_batch(hub, dist, cnt, size, src, dst, err):
    n = src.shape[0]
    out_d = np.empty(n, np.int64)
    out_c = np.empty(n, np.uint64)
    for i in range(n):
        d, c = query_pair(hub, dist, cnt, size, src[i], dst[i], NO_LIMIT, err)
        out_d[i] = d
        out_c[i] = c
    return out_d, out_c


@njit(cache=True)
def build_index(pool, start, deg, alive, rank_of, vertex_at, n, hub, dist, cnt, size, refs, err):
    """Pruned counting BFS from every vertex in rank order (hub pushing)."""
    D = np.full(n, INF, np.int32)
    C = np.zeros(n, np.uint64)
    Td = np.full(n, ROW_INF, np.int32)
    queue = np.empty(max(n, 1), np.int32)
    for r in range(n):
        root = vertex_at[r]
        if not alive[root]:
            continue
        hr_root = hub[root]
        dr_root = dist[root]
        k_root = size[root]
        for k in range(k_root):
            Td[hr_root[k]] = dr_root[k]
        D[root] = 0
        C[root] = ONE
        head = 0
        tail = 1
        queue[0] = root
        while head < tail:
            w = queue[head]
            head += 1
            dw = np.int64(D[w])
            if row_covers(hub, dist, size, w, Td, NO_LIMIT, dw):
                continue
            cw = C[w]
            append_label(hub, dist, cnt, size, refs, w, np.int32(r), np.int32(dw), cw)
            s0 = start[w]
            for e in range(deg[w]):
                x = pool[s0 + e]
                if rank_of[x] <= r:
                    continue
                if D[x] == INF:
                    D[x] = dw + 1
                    C[x] = cw
                    queue[tail] = x
                    tail += 1
                elif D[x] == dw + 1:
                    C[x] = add_u64(C[x], cw, err)
        for i in range(tail):
            D[queue[i]] = INF
            C[queue[i]] = ZERO
        for k in range(k_root):
            Td[hr_root[k]] = ROW_INF


@njit(cache=True)
def inc_update(h, va, vb, pool, start, deg, rank_of, hub, dist, cnt, size, refs, D, C, Td, Tc, queue,
               err, stats):
    """Resume a pruned BFS for hub ``h`` across the new edge ``(va, vb)``."""
    hr = rank_of[h]
    pos = find_label(hub, size, va, hr)
    if pos < 0:
        return
    D[vb] = dist[va][pos] + 1
    C[vb] = cnt[va][pos]
    # L(h) stays fixed for the whole pass: only hub-h labels are written and
    # reaching h itself always prunes
    load_row(hub, dist, cnt, size, h, Td, Tc)
    head = 0
    tail = 1
    queue[0] = vb
    while head < tail:
        v = queue[head]
        head += 1
        stats[VISITED] += 1
        dv = D[v]
        if row_covers(hub, dist, size, v, Td, NO_LIMIT, dv):
            continue
        cv = C[v]
        k = find_label(hub, size, v, hr)
        if k >= 0:
            if dist[v][k] == dv:
                cnt[v][k] = add_u64(cv, cnt[v][k], err)
                stats[RENEW_C] += 1
            else:
                dist[v][k] = dv
                cnt[v][k] = cv
                stats[RENEW_D] += 1
        else:
            insert_label(hub, dist, cnt, size, refs, v, hr, dv, cv)
            stats[INSERTED] += 1
        s0 = start[v]
        for e in range(deg[v]):
            w = pool[s0 + e]
            if D[w] == INF:
                if rank_of[w] >= hr:
                    D[w] = dv + 1
                    C[w] = cv
                    queue[tail] = w
                    tail += 1
            elif D[w] == dv + 1:
                C[w] = add_u64(C[w], cv, err)
    clear_row(hub, size, h, Td, Tc)
    for i in range(tail):
        D[queue[i]] = INF
        C[queue[i]] = ZERO


@njit(cache=True)
def affected_hubs(hub, size, a, b):
    """Hub ranks of ``L(a) | L(b)`` in rank order, with membership flags."""
    na = size[a]
    nb = size[b]
    ha = hub[a][:na].copy()
    hb = hub[b][:nb].copy()
    out = np.empty(na + nb, np.int32)
    in_a = np.zeros(na + nb, np.bool_)
    in_b = np.zeros(na + nb, np.bool_)
    i = 0
    j = 0
    k = 0
    while i < na or j < nb:
        if j >= nb or (i < na and ha[i] < hb[j]):
            out[k] = ha[i]
            in_a[k] = True
            i += 1
        elif i >= na or hb[j] < ha[i]:
            out[k] = hb[j]
            in_b[k] = True
            j += 1
        else:
            out[k] = ha[i]
            in_a[k] = True
            in_b[k] = True
            i += 1
            j += 1
        k += 1
    return out[:k], in_a[:k], in_b[:k]


@njit(cache=True)
def inc_spc(a, b, pool, start, deg, rank_of, vertex_at, hub, dist, cnt, size, refs, D, C, Td, Tc, queue,
            err, stats):
    """Edge ``(a, b)`` must already be present in the adjacency arrays."""
    aff, in_a, in_b = affected_hubs(hub, size, a, b)
    ra = rank_of[a]
    rb = rank_of[b]
    for k in range(aff.shape[0]):
        hr = aff[k]
        h = vertex_at[hr]
        if in_a[k] and hr <= rb:
            inc_update(h, a, b, pool, start, deg, rank_of, hub, dist, cnt, size, refs, D, C, Td, Tc, queue,
                       err, stats)
        if in_b[k] and hr <= ra:
            inc_update(h, b, a, pool, start, deg, rank_of, hub, dist, cnt, size, refs, D, C, Td, Tc, queue,
                       err, stats)
    return aff


@njit(cache=True)
def common_hub_mark(hub, size, a, b, mark):
    """Set ``mark[r]`` for every hub rank ``r`` in ``L(a) & L(b)``; returns them."""
    aff, in_a, in_b = affected_hubs(hub, size, a, b)
    out = np.empty(aff.shape[0], np.int32)
    k = 0
    for i in range(aff.shape[0]):
        if in_a[i] and in_b[i]:
            mark[aff[i]] = True
            out[k] = aff[i]
            k += 1
    return out[:k]


@njit(cache=True)
def srr_side(a, b, pool, start, deg, rank_of, hub, dist, cnt, size, common, D, C, Td, Tc, queue, err):
    """Affected hubs / receivers closer to ``a`` (graph still holds ``(a, b)``)."""
    sr = np.empty(max(queue.shape[0], 1), np.int32)
    rr = np.empty(max(queue.shape[0], 1), np.int32)
    nsr = 0
    nrr = 0
    load_row(hub, dist, cnt, size, b, Td, Tc)
    D[a] = 0
    C[a] = ONE
    head = 0
    tail = 1
    queue[0] = a
    while head < tail:
        v = queue[head]
        head += 1
        d, c = row_query(hub, dist, cnt, size, v, Td, Tc, err)
        dv = np.int64(D[v])
        if dv + 1 != d:
            continue
        if common[rank_of[v]] or C[v] == c:
            sr[nsr] = v
            nsr += 1
        else:
            rr[nrr] = v
            nrr += 1
        cv = C[v]
        s0 = start[v]
        for e in range(deg[v]):
            w = pool[s0 + e]
            if D[w] == INF:
                D[w] = dv + 1
                C[w] = cv
                queue[tail] = w
                tail += 1
            elif D[w] == dv + 1:
                C[w] = add_u64(C[w], cv, err)
    clear_row(hub, size, b, Td, Tc)
    for i in range(tail):
        D[queue[i]] = INF
        C[queue[i]] = ZERO
    return sr[:nsr].copy(), rr[:nrr].copy()


@njit(cache=True)
def dec_update(h, opp_mark, sweep_list, sweep, pool, start, deg, rank_of, hub, dist, cnt, size, refs,
               D, C, U, Td, Tc, queue, err, stats):
    """Repair hub-``h`` labels at the opposite side's vertices after a deletion.

    ``sweep_list`` must contain every opposite vertex that held a hub-``h``
    label before this pass; unconfirmed ones are removed when ``sweep`` is set.
    """
    hr = rank_of[h]
    # h sits on the far side from every written label, so L(h) is fixed
    load_row(hub, dist, cnt, size, h, Td, Tc)
    D[h] = 0
    C[h] = ONE
    head = 0
    tail = 1
    queue[0] = h
    while head < tail:
        v = queue[head]
        head += 1
        stats[VISITED] += 1
        dv = D[v]
        if row_covers(hub, dist, size, v, Td, hr, dv):
            continue
        cv = C[v]
        if opp_mark[v]:
            k = find_label(hub, size, v, hr)
            if k < 0:
                insert_label(hub, dist, cnt, size, refs, v, hr, dv, cv)
                stats[INSERTED] += 1
            elif dist[v][k] != dv:
                dist[v][k] = dv
                cnt[v][k] = cv
                stats[RENEW_D] += 1
            elif cnt[v][k] != cv:
                cnt[v][k] = cv
                stats[RENEW_C] += 1
            U[v] = True
        s0 = start[v]
        for e in range(deg[v]):
            w = pool[s0 + e]
            if D[w] == INF:
                if rank_of[w] >= hr:
                    D[w] = dv + 1
                    C[w] = cv
                    queue[tail] = w
                    tail += 1
            elif D[w] == dv + 1:
                C[w] = add_u64(C[w], cv, err)
    if sweep:
        for i in range(sweep_list.shape[0]):
            u = sweep_list[i]
            if not U[u]:
                k = find_label(hub, size, u, hr)
                if k >= 0:
                    remove_at(hub, dist, cnt, size, refs, u, k)
                    stats[REMOVED] += 1
    clear_row(hub, size, h, Td, Tc)
    for i in range(tail):
        D[queue[i]] = INF
        C[queue[i]] = ZERO
        U[queue[i]] = False


@njit(cache=True)
def hub_holders(opp, hub_mark, hub, size, n):
    """CSR map from hub rank to the vertices of ``opp`` whose labels use it, for marked hubs only."""
    off = np.zeros(n + 1, np.int64)
    for u in opp:
        hu = hub[u]
        for k in range(size[u]):
            if hub_mark[hu[k]]:
                off[hu[k] + 1] += 1
    for r in range(n):
        off[r + 1] += off[r]
    out = np.empty(off[n], np.int32)
    fill = off[:n].copy()
    for u in opp:
        hu = hub[u]
        for k in range(size[u]):
            r = hu[k]
            if hub_mark[r]:
                out[fill[r]] = u
                fill[r] += 1
    return off, out


@njit(cache=True)
def dec_spc(sr_a, r_a, sr_b, r_b, common, sweep_all, pool, start, deg, rank_of, hub, dist, cnt, size,
            refs, D, C, U, Td, Tc, queue, mark_a, mark_b, err, stats):
    """Second phase of an edge deletion; the edge must already be gone."""
    n = rank_of.shape[0]
    opp_a = np.concatenate((sr_a, r_a))
    opp_b = np.concatenate((sr_b, r_b))
    for v in opp_a:
        mark_a[v] = True
    for v in opp_b:
        mark_b[v] = True
    side = np.concatenate((np.zeros(sr_a.shape[0], np.int8), np.ones(sr_b.shape[0], np.int8)))
    hubs = np.concatenate((sr_a, sr_b))
    ranks = np.empty(hubs.shape[0], np.int64)
    for i in range(hubs.shape[0]):
        ranks[i] = rank_of[hubs[i]]
    # which opposite vertices hold each hub's labels, gathered once up front;
    # a pass only ever adds hub-h labels that it also confirms
    in_a = np.zeros(n, np.bool_)
    in_b = np.zeros(n, np.bool_)
    for v in sr_a:
        in_a[rank_of[v]] = True
    for v in sr_b:
        in_b[rank_of[v]] = True
    off_a, hold_a = hub_holders(opp_b, in_a, hub, size, n)
    off_b, hold_b = hub_holders(opp_a, in_b, hub, size, n)
    order = np.argsort(ranks)
    for i in order:
        h = hubs[i]
        r = rank_of[h]
        sweep = sweep_all or common[r]
        if side[i] == 0:
            dec_update(h, mark_b, hold_a[off_a[r]:off_a[r + 1]], sweep, pool, start, deg, rank_of, hub,
                       dist, cnt, size, refs, D, C, U, Td, Tc, queue, err, stats)
        else:
            dec_update(h, mark_a, hold_b[off_b[r]:off_b[r + 1]], sweep, pool, start, deg, rank_of, hub,
                       dist, cnt, size, refs, D, C, U, Td, Tc, queue, err, stats)
    for v in opp_a:
        mark_a[v] = False
    for v in opp_b:
        mark_b[v] = False
