"""Hot numeric kernels: keyed mixing, the global element sweep, blossom
maximum matching, and the local oracle machine for the adjacency-list model
with the eager rank backend.

All functions here are nopython-compatible and operate on flat numpy
arrays. They are compiled with numba @njit by default and run interpreted
when SUBMATCH_JIT=0 (see _jit.py); both modes are bit-identical.

Oracle session state layout (built by oracle.KernelSession):

    g   = (indptr, nbrs, eids, eu, ev, pks, colors)
    pr  = (K, j_star, levels, p, seed0, seed1, alphas)
    ar  = (s_val, s_pk, s_cp, s_nbr, s_eid, e_val, e_pk, e_nbr, e_eid, touched)
    mm  = (eos_memo, eoe_memo, fresh_eos_copy)
    cnt = int64 counter array, indexed by the CNT_* constants

Element streams live in a per-vertex arena: vertex v's start-side slice is
[indptr[v]*K, indptr[v+1]*K) and its extend-side slice is
[indptr[v], indptr[v+1]), each sorted by (rank value, edge key, copy) on
first touch. Memo tables are keyed per (edge, explored endpoint) for start
elements and per (edge, explored endpoint, st_w) for extend elements.
"""

from __future__ import annotations

import numpy as np

from ._jit import kernel

U64 = np.uint64

_GOLD = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_STEP_A = U64(0xD6E8FEB86659FD93)
_STEP_B = U64(0xCA5A826395121157)
_LBL_RANK = U64(0x01)
_LBL_COLOR = U64(0x02)
_LBL_COIN = U64(0x03)
_S30 = U64(30)
_S27 = U64(27)
_S31 = U64(31)
_S11 = U64(11)
_MAXU = U64(0xFFFFFFFFFFFFFFFF)
_INV_2_53 = 2.0 ** -53

# counter indices
CNT_F = 0
CNT_LIST_PROBES = 1
CNT_FRESH_EOS = 2
CNT_FRESH_EOE = 3
CNT_MEMO_HITS = 4
CNT_MAX_DEPTH = 5
CNT_MONITOR = 6      # stays 0: recursion-order and kind-order violations
CNT_VO_CALLS = 7
N_COUNTERS = 8

# stack column indices (int64 plane)
_SK_KIND = 0   # 0 EOS, 1 EOE, 2 VO root
_SK_EID = 1
_SK_CP = 2
_SK_U = 3
_SK_SIDE = 4
_SK_JS = 5
_SK_JE = 6
_SK_STU = 7
_SK_STW = 8
_SK_BPK = 9
_SK_BCP = 10
_SK_OPK = 11
_NI = 12
# uint64 plane
_SK_BVAL = 0
_SK_OVAL = 1
_NU = 2


@kernel
def _mix(s0, s1, label, a, b):
    x = s0 ^ (label * _GOLD)
    x = (x ^ (x >> _S30)) * _MIX1
    x = (x ^ (x >> _S27)) * _MIX2
    x = x ^ (x >> _S31)
    x = x ^ (a * _STEP_A)
    x = (x ^ (x >> _S30)) * _MIX1
    x = (x ^ (x >> _S27)) * _MIX2
    x = x ^ (x >> _S31)
    x = x ^ (b * _STEP_B)
    x = (x ^ (x >> _S30)) * _MIX1
    x = (x ^ (x >> _S27)) * _MIX2
    x = x ^ (x >> _S31)
    x = x ^ s1
    x = (x ^ (x >> _S30)) * _MIX1
    x = (x ^ (x >> _S27)) * _MIX2
    return x ^ (x >> _S31)


@kernel
def _frac(value):
    return (np.float64(value >> _S11) + 1.0) * _INV_2_53


@kernel
def _part_index(frac, alphas, levels):
    for i in range(1, levels + 1):
        if frac > alphas[i + 1]:
            return i
    return levels


@kernel
def _coin_is_one(s0, s1, pk, cp, p):
    u = _frac(_mix(s0, s1, _LBL_COIN, U64(pk), U64(cp)))
    return u < 1.0 - p


@kernel
def _key_lt(v1, p1, c1, v2, p2, c2):
    if v1 != v2:
        return v1 < v2
    if p1 != p2:
        return p1 < p2
    return c1 < c2


def rank_values_for(seed: tuple[int, int], pks, cps) -> np.ndarray:
    """Vectorized element rank values for arrays of edge keys and copies."""
    from ._mix import LBL_RANK, mix64_vec
    return mix64_vec(seed[0], seed[1], LBL_RANK, pks, cps)


def colors_for(seed: tuple[int, int], n: int) -> np.ndarray:
    from ._mix import LBL_COLOR, mix64_vec
    bits = mix64_vec(seed[0], seed[1], LBL_COLOR, np.arange(n, dtype=np.uint64),
                     np.zeros(n, dtype=np.uint64))
    return (bits & U64(1)).astype(np.uint8)


# ---------------------------------------------------------------------------
# global sweep


@kernel
def sweep(order, eu, ev, pks, colors, vals, K, j_star, levels, p, s0, s1,
          alphas, match_edge, smatch_edge, m_in, m_cp, m_val, m_part,
          m_frozen, s_in, s_val, audit):
    kp1 = K + 1
    for idx in range(order.shape[0]):
        t = order[idx]
        eid = t // kp1
        cp = t - eid * kp1
        u = eu[eid]
        v = ev[eid]
        if cp < K:
            if match_edge[u] < 0 and match_edge[v] < 0:
                match_edge[u] = eid
                match_edge[v] = eid
                m_in[eid] = 1
                m_cp[eid] = cp
                m_val[eid] = vals[t]
                part = _part_index(_frac(vals[t]), alphas, levels)
                m_part[eid] = part
                frozen = (colors[u] == colors[v]) or (part != j_star) \
                    or _coin_is_one(s0, s1, pks[eid], cp, p)
                m_frozen[eid] = 1 if frozen else 0
        else:
            c1 = (smatch_edge[u] < 0) and (smatch_edge[v] < 0)
            mu = match_edge[u] >= 0
            mv = match_edge[v] >= 0
            c2 = not (mu and mv)
            c3 = colors[u] != colors[v]
            c4 = not (mu and m_frozen[match_edge[u]] == 1)
            c5 = not (mv and m_frozen[match_edge[v]] == 1)
            if c1 and c2 and c3 and c4 and c5:
                smatch_edge[u] = eid
                smatch_edge[v] = eid
                s_in[eid] = 1
                s_val[eid] = vals[t]
                audit[eid, 0] = 1
                audit[eid, 1] = 1
                audit[eid, 2] = 1
                audit[eid, 3] = 1
                audit[eid, 4] = 1


# ---------------------------------------------------------------------------
# blossom maximum matching (general graphs)


@kernel
def blossom_max_matching(n, indptr, nbrs, match):
    """Augmenting-path search with blossom contraction, starting from the
    matching passed in `match` (use -1 everywhere for an empty start)."""
    p = np.full(n, -1, dtype=np.int32)
    base = np.empty(n, dtype=np.int32)
    used = np.zeros(n, dtype=np.uint8)
    lca_mark = np.zeros(n, dtype=np.uint8)
    bloss = np.zeros(n, dtype=np.uint8)
    queue = np.empty(n, dtype=np.int32)

    for root in range(n):
        if match[root] >= 0:
            continue
        # BFS for an augmenting path from root
        for i in range(n):
            p[i] = -1
            base[i] = i
            used[i] = 0
        used[root] = 1
        queue[0] = root
        qh = 0
        qt = 1
        finish = -1
        while qh < qt and finish < 0:
            v = queue[qh]
            qh += 1
            for k in range(indptr[v], indptr[v + 1]):
                to = nbrs[k]
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] >= 0 and p[match[to]] >= 0):
                    # blossom found: contract around the lca of v and to
                    for i in range(n):
                        lca_mark[i] = 0
                    a = v
                    while True:
                        a = base[a]
                        lca_mark[a] = 1
                        if match[a] < 0:
                            break
                        a = p[match[a]]
                    b = to
                    while True:
                        b = base[b]
                        if lca_mark[b] == 1:
                            break
                        b = p[match[b]]
                    curbase = b
                    for i in range(n):
                        bloss[i] = 0
                    # mark both paths down to the base
                    x = v
                    child = to
                    while base[x] != curbase:
                        bloss[base[x]] = 1
                        bloss[base[match[x]]] = 1
                        p[x] = child
                        child = match[x]
                        x = p[match[x]]
                    x = to
                    child = v
                    while base[x] != curbase:
                        bloss[base[x]] = 1
                        bloss[base[match[x]]] = 1
                        p[x] = child
                        child = match[x]
                        x = p[match[x]]
                    for i in range(n):
                        if bloss[base[i]] == 1:
                            base[i] = curbase
                            if used[i] == 0:
                                used[i] = 1
                                queue[qt] = i
                                qt += 1
                elif p[to] < 0:
                    p[to] = v
                    if match[to] < 0:
                        finish = to
                        break
                    used[match[to]] = 1
                    queue[qt] = match[to]
                    qt += 1
        if finish >= 0:
            # flip matched/unmatched along the alternating path
            v = finish
            while v >= 0:
                pv = p[v]
                ppv = match[pv]
                match[v] = pv
                match[pv] = v
                v = ppv
    return match


# ---------------------------------------------------------------------------
# local oracle machine (eager backend, adjacency-list model)


@kernel
def _touch(g, pr, ar, cnt, v):
    indptr = g[0]
    nbrs = g[1]
    eids = g[2]
    pks = g[5]
    K = pr[0]
    s0 = pr[4]
    s1 = pr[5]
    s_val, s_pk, s_cp, s_nbr, s_eid, e_val, e_pk, e_nbr, e_eid, touched = ar
    if touched[v] == 1:
        return
    touched[v] = 1
    lo = indptr[v]
    hi = indptr[v + 1]
    cnt[CNT_LIST_PROBES] += 1 + (hi - lo)  # degree query + one probe per slot
    for k in range(lo, hi):
        eid = eids[k]
        nbr = nbrs[k]
        pk = pks[eid]
        e_val[k] = _mix(s0, s1, _LBL_RANK, U64(pk), U64(K))
        e_pk[k] = pk
        e_nbr[k] = nbr
        e_eid[k] = eid
        for cp in range(K):
            t = k * K + cp
            s_val[t] = _mix(s0, s1, _LBL_RANK, U64(pk), U64(cp))
            s_pk[t] = pk
            s_cp[t] = cp
            s_nbr[t] = nbr
            s_eid[t] = eid
    # sort both slices by (value, edge key, copy)
    a = lo * K
    b = hi * K
    order = np.argsort(s_val[a:b])
    s_val[a:b] = s_val[a:b][order]
    s_pk[a:b] = s_pk[a:b][order]
    s_cp[a:b] = s_cp[a:b][order]
    s_nbr[a:b] = s_nbr[a:b][order]
    s_eid[a:b] = s_eid[a:b][order]
    for i in range(a + 1, b):
        j = i
        while j > a and _key_lt(s_val[j], s_pk[j], s_cp[j],
                                s_val[j - 1], s_pk[j - 1], s_cp[j - 1]):
            s_val[j], s_val[j - 1] = s_val[j - 1], s_val[j]
            s_pk[j], s_pk[j - 1] = s_pk[j - 1], s_pk[j]
            s_cp[j], s_cp[j - 1] = s_cp[j - 1], s_cp[j]
            s_nbr[j], s_nbr[j - 1] = s_nbr[j - 1], s_nbr[j]
            s_eid[j], s_eid[j - 1] = s_eid[j - 1], s_eid[j]
            j -= 1
    order2 = np.argsort(e_val[lo:hi])
    e_val[lo:hi] = e_val[lo:hi][order2]
    e_pk[lo:hi] = e_pk[lo:hi][order2]
    e_nbr[lo:hi] = e_nbr[lo:hi][order2]
    e_eid[lo:hi] = e_eid[lo:hi][order2]
    for i in range(lo + 1, hi):
        j = i
        while j > lo and _key_lt(e_val[j], e_pk[j], K, e_val[j - 1],
                                 e_pk[j - 1], K):
            e_val[j], e_val[j - 1] = e_val[j - 1], e_val[j]
            e_pk[j], e_pk[j - 1] = e_pk[j - 1], e_pk[j]
            e_nbr[j], e_nbr[j - 1] = e_nbr[j - 1], e_nbr[j]
            e_eid[j], e_eid[j - 1] = e_eid[j - 1], e_eid[j]
            j -= 1


@kernel
def _vo_run(g, pr, ar, mm, cnt, q):
    """One vertex-oracle evaluation.

    Returns (st, ex, st_nbr, st_eid, st_cp, ex_nbr, ex_eid). Runs the
    recursive edge oracles with an explicit stack; memo hits cost O(1) and
    every edge-oracle invocation (hit or fresh) increments the F counter.
    """
    indptr = g[0]
    eu = g[3]
    ev = g[4]
    colors = g[6]
    K = pr[0]
    j_star = pr[1]
    levels = pr[2]
    p = pr[3]
    s0 = pr[4]
    s1 = pr[5]
    alphas = pr[6]
    s_val, s_pk, s_cp, s_nbr, s_eid, e_val, e_pk, e_nbr, e_eid, touched = ar
    eos_memo, eoe_memo, fresh_eos_copy = mm

    cnt[CNT_VO_CALLS] += 1

    cap = 256
    stk_i = np.zeros((cap, _NI), dtype=np.int64)
    stk_u = np.zeros((cap, _NU), dtype=np.uint64)

    # bottom frame: the vertex-oracle walk itself
    stk_i[0, _SK_KIND] = 2
    stk_i[0, _SK_U] = q
    stk_u[0, _SK_BVAL] = _MAXU
    stk_i[0, _SK_BPK] = np.int64(1) << 62
    stk_i[0, _SK_BCP] = np.int64(1) << 30
    sp = 1

    # vertex-oracle outputs
    vo_st = 0
    vo_ex = 0
    vo_st_nbr = -1
    vo_st_eid = -1
    vo_st_cp = -1
    vo_ex_nbr = -1
    vo_ex_eid = -1

    ret_valid = 0
    ret_kind = 0
    ret_res = 0
    ret_rank = U64(0)
    ret_pk = 0
    ret_cp = 0
    ret_nbr = 0
    ret_eid = 0

    while sp > 0:
        top = sp - 1
        kind = stk_i[top, _SK_KIND]
        u = stk_i[top, _SK_U]
        _touch(g, pr, ar, cnt, u)

        done = 0        # frame finished this iteration
        result = 0

        if ret_valid == 1:
            ret_valid = 0
            if kind == 0:
                if ret_res == 1:
                    done = 1
                    result = 0
            elif kind == 1:
                if ret_kind == 0 and ret_res == 1:
                    stk_i[top, _SK_STU] = 1
                    frozen = (colors[u] == colors[ret_nbr]) \
                        or (_part_index(_frac(ret_rank), alphas, levels) != j_star) \
                        or _coin_is_one(s0, s1, ret_pk, ret_cp, p)
                    if frozen or stk_i[top, _SK_STW] == 1:
                        done = 1
                        result = 0
                elif ret_kind == 1 and ret_res == 1:
                    done = 1
                    result = 0
            else:
                if ret_kind == 0 and ret_res == 1:
                    vo_st = 1
                    vo_st_nbr = ret_nbr
                    vo_st_eid = ret_eid
                    vo_st_cp = ret_cp
                    stk_i[top, _SK_STU] = 1
                    frozen = (colors[u] == colors[ret_nbr]) \
                        or (_part_index(_frac(ret_rank), alphas, levels) != j_star) \
                        or _coin_is_one(s0, s1, ret_pk, ret_cp, p)
                    if frozen:
                        # u is frozen: no later extend element can join S
                        done = 1
                elif ret_kind == 1 and ret_res == 1:
                    vo_ex = 1
                    vo_ex_nbr = ret_nbr
                    vo_ex_eid = ret_eid
                if vo_st == 1 and vo_ex == 1:
                    done = 1

        if done == 0:
            # advance this frame's walk to the next candidate below its bound
            s_lo = indptr[u] * K
            s_hi = indptr[u + 1] * K
            e_lo = indptr[u]
            e_hi = indptr[u + 1]
            bval = stk_u[top, _SK_BVAL]
            bpk = stk_i[top, _SK_BPK]
            bcp = stk_i[top, _SK_BCP]
            skip_start = 0
            skip_ext = kind == 0
            if kind == 1 and stk_i[top, _SK_STU] == 1:
                skip_start = 1
            if kind == 2:
                if vo_st == 1:
                    skip_start = 1
                if vo_ex == 1:
                    skip_ext = 1

            advanced = 0
            while advanced == 0:
                js = stk_i[top, _SK_JS]
                je = stk_i[top, _SK_JE]
                have_s = (skip_start == 0) and (s_lo + js < s_hi)
                have_e = (skip_ext == 0) and (e_lo + je < e_hi)
                take_s = 0
                if have_s and have_e:
                    si = s_lo + js
                    ei = e_lo + je
                    take_s = 1 if _key_lt(s_val[si], s_pk[si], s_cp[si],
                                          e_val[ei], e_pk[ei], K) else 0
                elif have_s:
                    take_s = 1
                elif not have_e:
                    done = 1
                    result = 1
                    break
                if take_s == 1:
                    si = s_lo + js
                    cval = s_val[si]
                    cpk = s_pk[si]
                    ccp = s_cp[si]
                    cnbr = s_nbr[si]
                    ceid = s_eid[si]
                    ckind = 0
                else:
                    ei = e_lo + je
                    cval = e_val[ei]
                    cpk = e_pk[ei]
                    ccp = K
                    cnbr = e_nbr[ei]
                    ceid = e_eid[ei]
                    ckind = 1
                if not _key_lt(cval, cpk, ccp, bval, bpk, bcp):
                    done = 1
                    result = 1
                    break
                if take_s == 1:
                    stk_i[top, _SK_JS] = js + 1
                else:
                    stk_i[top, _SK_JE] = je + 1
                if ckind == 1 and colors[u] == colors[cnbr]:
                    continue  # same-color extend elements are never queried
                # edge-oracle invocation (memo hit or fresh computation)
                cnt[CNT_F] += 1
                if ckind == 0:
                    side = 0 if cnbr == eu[ceid] else 1
                    midx = ceid * 2 + side
                    cached = eos_memo[midx]
                else:
                    side = 0 if cnbr == eu[ceid] else 1
                    stw = stk_i[top, _SK_STU] if kind == 1 else (vo_st if kind == 2 else 0)
                    midx = ceid * 4 + side * 2 + stw
                    cached = eoe_memo[midx]
                if cached != 0:
                    cnt[CNT_MEMO_HITS] += 1
                    ret_valid = 1
                    ret_kind = ckind
                    ret_res = 1 if cached == 1 else 0
                    ret_rank = cval
                    ret_pk = cpk
                    ret_cp = ccp
                    ret_nbr = cnbr
                    ret_eid = ceid
                    advanced = 1
                else:
                    # fresh computation: push a child frame
                    if sp >= cap:
                        cap2 = cap * 2
                        ni = np.zeros((cap2, _NI), dtype=np.int64)
                        nu = np.zeros((cap2, _NU), dtype=np.uint64)
                        ni[:cap] = stk_i
                        nu[:cap] = stk_u
                        stk_i = ni
                        stk_u = nu
                        cap = cap2
                    if kind == 0 and ckind == 1:
                        cnt[CNT_MONITOR] += 1  # start frames never query extends
                    stk_i[sp, _SK_KIND] = ckind
                    stk_i[sp, _SK_EID] = ceid
                    stk_i[sp, _SK_CP] = ccp
                    stk_i[sp, _SK_U] = cnbr
                    stk_i[sp, _SK_SIDE] = side
                    stk_i[sp, _SK_JS] = 0
                    stk_i[sp, _SK_JE] = 0
                    stk_i[sp, _SK_STU] = 0
                    stk_i[sp, _SK_STW] = stk_i[top, _SK_STU] if kind == 1 else (vo_st if kind == 2 else 0)
                    stk_i[sp, _SK_BPK] = cpk
                    stk_i[sp, _SK_BCP] = ccp
                    stk_i[sp, _SK_OPK] = cpk
                    stk_u[sp, _SK_BVAL] = cval
                    stk_u[sp, _SK_OVAL] = cval
                    sp += 1
                    if sp > cnt[CNT_MAX_DEPTH]:
                        cnt[CNT_MAX_DEPTH] = sp
                    advanced = 1

        if done == 1:
            if kind == 2:
                break
            # memoize and deliver to the parent frame
            eid = stk_i[top, _SK_EID]
            side = stk_i[top, _SK_SIDE]
            if kind == 0:
                eos_memo[eid * 2 + side] = 1 if result == 1 else 2
                cnt[CNT_FRESH_EOS] += 1
                if fresh_eos_copy[eid * 2 + side] < 0:
                    fresh_eos_copy[eid * 2 + side] = stk_i[top, _SK_CP]
            else:
                stw = stk_i[top, _SK_STW]
                eoe_memo[eid * 4 + side * 2 + stw] = 1 if result == 1 else 2
                cnt[CNT_FRESH_EOE] += 1
            ret_valid = 1
            ret_kind = kind
            ret_res = result
            ret_rank = stk_u[top, _SK_OVAL]
            ret_pk = stk_i[top, _SK_OPK]
            ret_cp = stk_i[top, _SK_CP]
            ret_nbr = stk_i[top, _SK_U]
            ret_eid = eid
            sp -= 1

    return vo_st, vo_ex, vo_st_nbr, vo_st_eid, vo_st_cp, vo_ex_nbr, vo_ex_eid


@kernel
def vo_batch(g, pr, ar, mm, cnt, queries, out):
    """Vertex-oracle status for each query vertex; out is int32[len, 7]."""
    for i in range(queries.shape[0]):
        st, ex, sn, se, sc, en, ee = _vo_run(g, pr, ar, mm, cnt, queries[i])
        out[i, 0] = st
        out[i, 1] = ex
        out[i, 2] = sn
        out[i, 3] = se
        out[i, 4] = sc
        out[i, 5] = en
        out[i, 6] = ee


@kernel
def indicator_batch(g, pr, ar, mm, cnt, queries, v1_limit, out_x):
    """Per-sample indicator: matched by M, or the endpoint of an applied
    length-3 augmenting path. With v1_limit >= 0, the matched branch also
    requires the partner below v1_limit and the augmenting branch requires
    the first hop below v1_limit."""
    for i in range(queries.shape[0]):
        u = queries[i]
        st, ex, sn, se, sc, en, ee = _vo_run(g, pr, ar, mm, cnt, u)
        x = 0
        if st == 1:
            if v1_limit < 0 or sn < v1_limit:
                x = 1
        elif ex == 1:
            w = en
            st1, ex1, sn1, se1, sc1, en1, ee1 = _vo_run(g, pr, ar, mm, cnt, w)
            if st1 == 1:
                xv = sn1
                st2, ex2, sn2, se2, sc2, en2, ee2 = _vo_run(g, pr, ar, mm, cnt, xv)
                if ex2 == 1:
                    y = en2
                    st3, ex3, sn3, se3, sc3, en3, ee3 = _vo_run(g, pr, ar, mm, cnt, y)
                    if st3 == 0 and (v1_limit < 0 or w < v1_limit):
                        x = 1
        out_x[i] = x
