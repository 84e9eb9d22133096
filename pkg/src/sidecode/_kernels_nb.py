"""Numba implementations of the hot loops.

Bitset kernels take adjacency as one ``uint64`` word per vertex, so they
handle at most 64 vertices; callers enforce this.  Every function here has
a counterpart with the same signature in ``_kernels_np``.
"""

import math

import numpy as np
from numba import njit

_U0 = np.uint64(0)
_U1 = np.uint64(1)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_LN2 = math.log(2.0)
_PFLOOR = 1e-12


@njit(cache=True, inline="always")
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True, inline="always")
def _ctz(x):
    low = x & (~x + _U1)
    return _popcount(low - _U1)


@njit(cache=True, inline="always")
def _bit(v):
    return _U1 << np.uint64(v)


# ---------------------------------------------------------------- powers


@njit(cache=True)
def and_power_csr(indptr, indices, nbase, n):
    total = nbase**n
    closed_ptr = np.zeros(nbase + 1, np.int64)
    for v in range(nbase):
        closed_ptr[v + 1] = closed_ptr[v] + (indptr[v + 1] - indptr[v]) + 1
    closed = np.empty(closed_ptr[nbase], np.int64)
    for v in range(nbase):
        k = closed_ptr[v]
        placed = False
        for j in range(indptr[v], indptr[v + 1]):
            u = indices[j]
            if not placed and u > v:
                closed[k] = v
                k += 1
                placed = True
            closed[k] = u
            k += 1
        if not placed:
            closed[k] = v

    digits = np.empty(n, np.int64)
    out_ptr = np.zeros(total + 1, np.int64)
    for t in range(total):
        r = t
        deg = 1
        for i in range(n - 1, -1, -1):
            d = r % nbase
            r //= nbase
            deg *= closed_ptr[d + 1] - closed_ptr[d]
        out_ptr[t + 1] = out_ptr[t] + deg - 1

    out = np.empty(out_ptr[total], np.int64)
    pos = np.zeros(n, np.int64)
    for t in range(total):
        r = t
        for i in range(n - 1, -1, -1):
            digits[i] = r % nbase
            r //= nbase
        for i in range(n):
            pos[i] = 0
        k = out_ptr[t]
        while True:
            idx = 0
            for i in range(n):
                d = digits[i]
                idx = idx * nbase + closed[closed_ptr[d] + pos[i]]
            if idx != t:
                out[k] = idx
                k += 1
            i = n - 1
            while i >= 0:
                d = digits[i]
                pos[i] += 1
                if pos[i] < closed_ptr[d + 1] - closed_ptr[d]:
                    break
                pos[i] = 0
                i -= 1
            if i < 0:
                break
    return out_ptr, out


@njit(cache=True)
def or_power_csr(indptr, indices, nbase, n):
    total = nbase**n
    adj = np.zeros((nbase, nbase), np.bool_)
    for v in range(nbase):
        for j in range(indptr[v], indptr[v + 1]):
            adj[v, indices[j]] = True
    nonadj_ptr = np.zeros(nbase + 1, np.int64)
    for v in range(nbase):
        cnt = 0
        for u in range(nbase):
            if not adj[v, u]:
                cnt += 1
        nonadj_ptr[v + 1] = nonadj_ptr[v] + cnt
    nonadj = np.empty(nonadj_ptr[nbase], np.int64)
    for v in range(nbase):
        k = nonadj_ptr[v]
        for u in range(nbase):
            if not adj[v, u]:
                nonadj[k] = u
                k += 1

    digits = np.empty(n, np.int64)
    out_ptr = np.zeros(total + 1, np.int64)
    for t in range(total):
        r = t
        keep = 1
        for i in range(n - 1, -1, -1):
            d = r % nbase
            r //= nbase
            keep *= nonadj_ptr[d + 1] - nonadj_ptr[d]
        out_ptr[t + 1] = out_ptr[t] + total - keep

    out = np.empty(out_ptr[total], np.int64)
    mark = np.zeros(total, np.bool_)
    pos = np.zeros(n, np.int64)
    for t in range(total):
        r = t
        for i in range(n - 1, -1, -1):
            digits[i] = r % nbase
            r //= nbase
        for i in range(n):
            pos[i] = 0
        # mark tuples that are non-adjacent (or equal) in every coordinate
        while True:
            idx = 0
            for i in range(n):
                d = digits[i]
                idx = idx * nbase + nonadj[nonadj_ptr[d] + pos[i]]
            mark[idx] = True
            i = n - 1
            while i >= 0:
                d = digits[i]
                pos[i] += 1
                if pos[i] < nonadj_ptr[d + 1] - nonadj_ptr[d]:
                    break
                pos[i] = 0
                i -= 1
            if i < 0:
                break
        k = out_ptr[t]
        for u in range(total):
            if mark[u]:
                mark[u] = False
            else:
                out[k] = u
                k += 1
    return out_ptr, out


@njit(cache=True)
def block_graph_csr(side, demand):
    """Vertices ``a != b`` are adjacent iff for some row r,
    ``side[r, a] == side[r, b]`` and ``demand[r, a] != demand[r, b]``."""
    nrow, nv = side.shape
    count = 0
    orders = np.empty((nrow, nv), np.int64)
    for r in range(nrow):
        orders[r] = np.argsort(side[r], kind="mergesort")
        s = 0
        while s < nv:
            e = s
            key = side[r, orders[r, s]]
            while e < nv and side[r, orders[r, e]] == key:
                e += 1
            for i in range(s, e):
                a = orders[r, i]
                for j in range(i + 1, e):
                    if demand[r, a] != demand[r, orders[r, j]]:
                        count += 2
            s = e
    keys = np.empty(count, np.int64)
    k = 0
    for r in range(nrow):
        s = 0
        while s < nv:
            e = s
            key = side[r, orders[r, s]]
            while e < nv and side[r, orders[r, e]] == key:
                e += 1
            for i in range(s, e):
                a = orders[r, i]
                for j in range(i + 1, e):
                    b = orders[r, j]
                    if demand[r, a] != demand[r, b]:
                        keys[k] = a * nv + b
                        keys[k + 1] = b * nv + a
                        k += 2
            s = e
    keys = np.unique(keys)
    indptr = np.zeros(nv + 1, np.int64)
    indices = np.empty(keys.shape[0], np.int64)
    for i in range(keys.shape[0]):
        indptr[keys[i] // nv + 1] += 1
        indices[i] = keys[i] % nv
    for v in range(nv):
        indptr[v + 1] += indptr[v]
    return indptr, indices


# ------------------------------------------------------- graph entropy


@njit(cache=True)
def graph_entropy_am(member, p, q0, max_iter, rtol, gap_tol):
    """Alternating minimization of ``-sum_x p(x) log2 (member @ q)(x)``.

    Returns ``(q, value, iterations, trace, gap)`` where ``gap`` bounds the
    distance to the optimum (Frank-Wolfe duality certificate, bits)."""
    nv, ns = member.shape
    q = q0.copy()
    s = np.zeros(nv)
    g = np.zeros(ns)
    trace = np.empty(max_iter + 1)
    value = 0.0
    gap = np.inf
    it = 0
    while True:
        for x in range(nv):
            acc = 0.0
            for w in range(ns):
                acc += member[x, w] * q[w]
            s[x] = acc
        value = 0.0
        for x in range(nv):
            if p[x] > 0.0:
                value -= p[x] * math.log(s[x])
        value /= _LN2
        trace[it] = value
        gmax = 0.0
        for w in range(ns):
            acc = 0.0
            for x in range(nv):
                if p[x] > 0.0 and member[x, w] > 0.0:
                    acc += p[x] / s[x]
            g[w] = acc
            if acc > gmax:
                gmax = acc
        gap = (gmax - 1.0) / _LN2
        if gap < 0.0:
            gap = 0.0
        if gap <= gap_tol:
            break
        if it > 0:
            prev = trace[it - 1]
            if abs(prev - value) <= rtol * max(abs(prev), 1e-300):
                break
        if it >= max_iter:
            break
        for w in range(ns):
            q[w] *= g[w]
        tot = 0.0
        for w in range(ns):
            tot += q[w]
        for w in range(ns):
            q[w] /= tot
        it += 1
    return q, value, it, trace[: it + 1].copy(), gap


# ------------------------------------------------------ inner bound R_I


@njit(cache=True)
def _cond_mi(pc, grp, ngrp, P):
    """I(other;U | group) and its gradient, groups given by ``grp``."""
    nc, ns = P.shape
    pg = np.zeros(ngrp)
    qg = np.zeros((ngrp, ns))
    for c in range(nc):
        pg[grp[c]] += pc[c]
        for u in range(ns):
            qg[grp[c], u] += pc[c] * P[c, u]
    for k in range(ngrp):
        if pg[k] > 0.0:
            for u in range(ns):
                qg[k, u] /= pg[k]
    val = 0.0
    grad = np.zeros((nc, ns))
    for c in range(nc):
        k = grp[c]
        for u in range(ns):
            pu = P[c, u]
            if qg[k, u] > 0.0:
                lr = math.log(max(pu, _PFLOOR) / qg[k, u]) / _LN2
                grad[c, u] = pc[c] * lr
                if pu > 0.0:
                    val += pc[c] * pu * lr
            elif pc[c] > 0.0:
                # limit of log(P/q) when only this cell moves off zero
                grad[c, u] = pc[c] * math.log(pg[k] / pc[c]) / _LN2
    return val, grad


@njit(cache=True)
def ri_objective(pc, xid, yid, nx, ny, P):
    a, _ = _cond_mi(pc, yid, ny, P)  # I(X;U|Y)
    b, _ = _cond_mi(pc, xid, nx, P)  # I(Y;U|X)
    return a, b


@njit(cache=True)
def _project_masked_simplex(v, mask):
    n = v.shape[0]
    m = 0
    for i in range(n):
        if mask[i]:
            m += 1
    vals = np.empty(m)
    k = 0
    for i in range(n):
        if mask[i]:
            vals[k] = v[i]
            k += 1
    srt = np.sort(vals)[::-1]
    css = 0.0
    theta = 0.0
    for j in range(m):
        css += srt[j]
        t = (css - 1.0) / (j + 1)
        if srt[j] - t > 0.0:
            theta = t
    out = np.zeros(n)
    for i in range(n):
        if mask[i]:
            d = v[i] - theta
            out[i] = d if d > 0.0 else 0.0
    return out


@njit(cache=True)
def ri_subgradient(pc, xid, yid, nx, ny, mask, P0, iters, step):
    """Projected subgradient descent on max(I(X;U|Y), I(Y;U|X)) with
    normalized steps ``step / sqrt(t)``; returns the best iterate."""
    nc, ns = P0.shape
    P = P0.copy()
    best = P0.copy()
    best_val = np.inf
    trace = np.empty(iters)
    for t in range(iters):
        a, ga = _cond_mi(pc, yid, ny, P)
        b, gb = _cond_mi(pc, xid, nx, P)
        val = a if a > b else b
        trace[t] = val
        if val < best_val:
            best_val = val
            best[:, :] = P
        g = ga if a >= b else gb
        norm = 0.0
        for c in range(nc):
            for u in range(ns):
                if mask[c, u]:
                    norm += g[c, u] * g[c, u]
        if norm <= 0.0:
            break
        alpha = step / math.sqrt(t + 1.0) / math.sqrt(norm)
        for c in range(nc):
            row = np.empty(ns)
            for u in range(ns):
                row[u] = P[c, u] - alpha * g[c, u]
            P[c] = _project_masked_simplex(row, mask[c])
    return best, best_val, trace


@njit(cache=True)
def deterministic_search(pc, xid, yid, nx, ny, opt_ptr, opt_sets, nsets, top_k):
    """Enumerate every deterministic channel (one allowed set per cell) and
    keep the ``top_k`` smallest values of max(H(U|Y), H(U|X))."""
    nc = pc.shape[0]
    px = np.zeros(nx)
    py = np.zeros(ny)
    for c in range(nc):
        px[xid[c]] += pc[c]
        py[yid[c]] += pc[c]
    best_vals = np.full(top_k, np.inf)
    best_choice = np.zeros((top_k, nc), np.int64)
    pos = np.zeros(nc, np.int64)
    mx = np.zeros((nx, nsets))
    my = np.zeros((ny, nsets))
    while True:
        mx[:, :] = 0.0
        my[:, :] = 0.0
        for c in range(nc):
            u = opt_sets[opt_ptr[c] + pos[c]]
            mx[xid[c], u] += pc[c]
            my[yid[c], u] += pc[c]
        hx = 0.0
        for x in range(nx):
            for u in range(nsets):
                m = mx[x, u]
                if m > 0.0:
                    hx += m * math.log(px[x] / m)
        hy = 0.0
        for y in range(ny):
            for u in range(nsets):
                m = my[y, u]
                if m > 0.0:
                    hy += m * math.log(py[y] / m)
        val = max(hx, hy) / _LN2
        if val < best_vals[top_k - 1]:
            j = top_k - 1
            while j > 0 and best_vals[j - 1] > val:
                best_vals[j] = best_vals[j - 1]
                best_choice[j] = best_choice[j - 1]
                j -= 1
            best_vals[j] = val
            for c in range(nc):
                best_choice[j, c] = opt_sets[opt_ptr[c] + pos[c]]
        c = nc - 1
        while c >= 0:
            pos[c] += 1
            if pos[c] < opt_ptr[c + 1] - opt_ptr[c]:
                break
            pos[c] = 0
            c -= 1
        if c < 0:
            break
    return best_vals, best_choice


# ----------------------------------------------------- bitset searches


@njit(cache=True)
def _greedy_color_count(adj, P):
    cnt = 0
    U = P
    while U != _U0:
        cnt += 1
        Q = U
        while Q != _U0:
            v = _ctz(Q)
            b = _bit(v)
            U &= ~b
            Q &= ~b
            Q &= ~adj[v]
    return cnt


@njit(cache=True)
def clique_number_bits(adj, active):
    if active == _U0:
        return 0
    stack_p = np.empty(256, np.uint64)
    stack_d = np.empty(256, np.int64)
    top = 0
    stack_p[0] = active
    stack_d[0] = 0
    top = 1
    best = 0
    while top > 0:
        top -= 1
        P = stack_p[top]
        d = stack_d[top]
        if P == _U0:
            if d > best:
                best = d
            continue
        if d + _greedy_color_count(adj, P) <= best:
            continue
        v = _ctz(P)
        b = _bit(v)
        stack_p[top] = P & ~b
        stack_d[top] = d
        top += 1
        stack_p[top] = P & adj[v]
        stack_d[top] = d + 1
        top += 1
    return best


@njit(cache=True)
def _active_order(adj, active):
    nv = _popcount(active)
    verts = np.empty(nv, np.int64)
    degs = np.empty(nv, np.int64)
    k = 0
    A = active
    while A != _U0:
        v = _ctz(A)
        A &= ~_bit(v)
        verts[k] = v
        degs[k] = _popcount(adj[v] & active)
        k += 1
    # degree descending, ties by vertex index
    order = np.argsort(-degs * 128 + verts)
    return verts[order]


@njit(cache=True)
def k_colorable_bits(adj, active, k):
    """Backtracking k-coloring of the induced subgraph; returns
    ``(ok, color_per_vertex)`` with -1 for inactive vertices."""
    colors = np.full(64, -1, np.int64)
    order = _active_order(adj, active)
    nv = order.shape[0]
    if nv == 0:
        return True, colors
    if k <= 0:
        return False, colors
    cls = np.zeros(k, np.uint64)
    choice = np.full(nv, -1, np.int64)
    maxc = np.full(nv + 1, -1, np.int64)
    i = 0
    while i >= 0:
        if i == nv:
            for j in range(nv):
                colors[order[j]] = choice[j]
            return True, colors
        v = order[i]
        b = _bit(v)
        c = choice[i]
        if c >= 0:
            cls[c] &= ~b
        c += 1
        limit = min(k - 1, maxc[i] + 1)
        while c <= limit and (cls[c] & adj[v]) != _U0:
            c += 1
        if c > limit:
            choice[i] = -1
            i -= 1
            continue
        choice[i] = c
        cls[c] |= b
        maxc[i + 1] = max(maxc[i], c)
        i += 1
        if i < nv:
            choice[i] = -1
    return False, colors


@njit(cache=True)
def chromatic_number_bits(adj, active):
    nv = _popcount(active)
    if nv == 0:
        return 0, np.full(64, -1, np.int64)
    lo = clique_number_bits(adj, active)
    k = lo
    while True:
        ok, colors = k_colorable_bits(adj, active, k)
        if ok:
            return k, colors
        k += 1


@njit(cache=True)
def imperfect_subset_bits(adj, nv):
    """Smallest-index vertex mask whose induced subgraph has clique number
    below chromatic number, or 0 if the graph is perfect."""
    for m in range(1, 1 << nv):
        S = np.uint64(m)
        w = clique_number_bits(adj, S)
        ok, _ = k_colorable_bits(adj, S, w)
        if not ok:
            return m
    return 0


@njit(cache=True)
def _entropy_lb(mass, k, rem):
    imax = 0
    for c in range(1, k):
        if mass[c] > mass[imax]:
            imax = c
    h = 0.0
    for c in range(k):
        m = mass[c] + (rem if c == imax else 0.0)
        if m > 0.0:
            h -= m * math.log(m)
    if k == 0 and rem > 0.0:
        h -= rem * math.log(rem)
    return h / _LN2


@njit(cache=True)
def min_entropy_coloring_bits(adj, probs, order, incumbent, incumbent_colors):
    """Branch and bound over colorings, vertices taken in ``order``.
    Returns ``(colors, entropy)``; the incumbent is returned if nothing
    strictly better exists."""
    nv = order.shape[0]
    best = incumbent
    best_colors = incumbent_colors.copy()
    suffix = np.zeros(nv + 1)
    for i in range(nv - 1, -1, -1):
        suffix[i] = suffix[i + 1] + probs[order[i]]
    cls = np.zeros(nv, np.uint64)
    mass = np.zeros(nv)
    choice = np.full(nv, -1, np.int64)
    nused = np.zeros(nv + 1, np.int64)
    i = 0
    while i >= 0:
        if i == nv:
            h = _entropy_lb(mass, nused[nv], 0.0)
            if h < best - 1e-12:
                best = h
                for j in range(nv):
                    best_colors[order[j]] = choice[j]
            i -= 1
            continue
        v = order[i]
        b = _bit(v)
        pv = probs[v]
        c = choice[i]
        if c >= 0:
            cls[c] &= ~b
            mass[c] -= pv
        c += 1
        k = nused[i]
        found = False
        while c <= k:
            if c < k and (cls[c] & adj[v]) != _U0:
                c += 1
                continue
            cls[c] |= b
            mass[c] += pv
            newk = k + 1 if c == k else k
            lb = _entropy_lb(mass, newk, suffix[i + 1])
            if lb < best - 1e-12:
                found = True
                break
            cls[c] &= ~b
            mass[c] -= pv
            if c == k:
                mass[c] = 0.0
            c += 1
        if not found:
            choice[i] = -1
            i -= 1
            continue
        choice[i] = c
        nused[i + 1] = k + 1 if c == k else k
        i += 1
        if i < nv:
            choice[i] = -1
            mass[nused[i]:] = 0.0
    return best_colors, best


# --------------------------------------------------------- typicality


@njit(cache=True)
def typical_log2_count(side_counts, lo, hi):
    """log2 of the number of sequences ``z^n`` whose joint type with a fixed
    side sequence (symbol counts ``side_counts``) has cell counts within
    ``[lo, hi]``; ``-inf`` when there are none."""
    na, nb = lo.shape
    total = 0.0
    for a in range(na):
        n_a = side_counts[a]
        dp = np.full(n_a + 1, -np.inf)
        dp[0] = 0.0
        for b in range(nb):
            new = np.full(n_a + 1, -np.inf)
            for s in range(n_a + 1):
                if dp[s] == -np.inf:
                    continue
                kmax = min(hi[a, b], n_a - s)
                for kk in range(lo[a, b], kmax + 1):
                    term = dp[s] - math.lgamma(kk + 1.0)
                    cur = new[s + kk]
                    if cur == -np.inf:
                        new[s + kk] = term
                    elif term > cur:
                        new[s + kk] = term + math.log1p(math.exp(cur - term))
                    else:
                        new[s + kk] = cur + math.log1p(math.exp(term - cur))
            dp = new
        if dp[n_a] == -np.inf:
            return -np.inf
        total += math.lgamma(n_a + 1.0) + dp[n_a]
    return total / _LN2
