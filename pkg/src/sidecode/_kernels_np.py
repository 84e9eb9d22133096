"""Pure numpy / Python counterparts of ``_kernels_nb``.

Used when ``SIDECODE_DISABLE_JIT`` is set, and as the second route in the
kernel cross-check tests.  Array-shaped work is vectorized; the searches
use Python integers as bitsets.
"""

import math

import numpy as np
from scipy.special import gammaln

_LN2 = math.log(2.0)
_PFLOOR = 1e-12


def _dense_from_csr(indptr, indices, n):
    a = np.zeros((n, n), dtype=bool)
    rows = np.repeat(np.arange(n), np.diff(indptr))
    a[rows, indices] = True
    return a


def _csr_from_dense(a):
    rows, cols = np.nonzero(a)
    indptr = np.zeros(a.shape[0] + 1, np.int64)
    np.cumsum(np.bincount(rows, minlength=a.shape[0]), out=indptr[1:])
    return indptr, cols.astype(np.int64)


def _kron_power(m, n):
    out = np.ones((1, 1), dtype=bool)
    for _ in range(n):
        out = np.kron(out, m).astype(bool)
    return out


def and_power_csr(indptr, indices, nbase, n):
    a = _dense_from_csr(indptr, indices, nbase)
    full = _kron_power(a | np.eye(nbase, dtype=bool), n)
    np.fill_diagonal(full, False)
    return _csr_from_dense(full)


def or_power_csr(indptr, indices, nbase, n):
    a = _dense_from_csr(indptr, indices, nbase)
    return _csr_from_dense(~_kron_power(~a, n))


def block_graph_csr(side, demand):
    nv = side.shape[1]
    adj = np.zeros((nv, nv), dtype=bool)
    for s, d in zip(side, demand):
        adj |= (s[:, None] == s[None, :]) & (d[:, None] != d[None, :])
    return _csr_from_dense(adj)


def graph_entropy_am(member, p, q0, max_iter, rtol, gap_tol):
    q = q0.copy()
    pos = p > 0
    pp = p[pos]
    mem = member[pos]
    trace = []
    it = 0
    gap = np.inf
    while True:
        s = mem @ q
        value = -float(pp @ np.log(s)) / _LN2
        trace.append(value)
        g = mem.T @ (pp / s)
        gap = max((float(g.max()) - 1.0) / _LN2, 0.0)
        if gap <= gap_tol:
            break
        if it > 0 and abs(trace[-2] - value) <= rtol * max(abs(trace[-2]), 1e-300):
            break
        if it >= max_iter:
            break
        q = q * g
        q /= q.sum()
        it += 1
    return q, value, it, np.array(trace), gap


def _cond_mi(pc, grp, ngrp, P):
    pg = np.bincount(grp, weights=pc, minlength=ngrp)
    qg = np.zeros((ngrp, P.shape[1]))
    np.add.at(qg, grp, pc[:, None] * P)
    nz = pg > 0
    qg[nz] /= pg[nz, None]
    qc = qg[grp]
    grad = np.zeros_like(P)
    has_q = qc > 0
    lr = np.zeros_like(P)
    lr[has_q] = np.log2(np.maximum(P, _PFLOOR)[has_q] / qc[has_q])
    grad = pc[:, None] * lr
    ratio = np.where(pc > 0, pg[grp] / np.where(pc > 0, pc, 1.0), 1.0)
    limit = (pc * np.log2(ratio))[:, None]
    grad = np.where(has_q, grad, np.where(pc[:, None] > 0, limit, 0.0))
    val = float(np.sum(np.where((P > 0) & has_q, pc[:, None] * P * lr, 0.0)))
    return val, grad


def ri_objective(pc, xid, yid, nx, ny, P):
    a, _ = _cond_mi(pc, yid, ny, P)
    b, _ = _cond_mi(pc, xid, nx, P)
    return a, b


def _project_masked_simplex(v, mask):
    vals = v[mask]
    srt = np.sort(vals)[::-1]
    css = np.cumsum(srt) - 1.0
    ks = np.arange(1, len(srt) + 1)
    cond = srt - css / ks > 0
    rho = np.nonzero(cond)[0][-1]
    theta = css[rho] / (rho + 1)
    out = np.zeros_like(v)
    out[mask] = np.maximum(vals - theta, 0.0)
    return out


def ri_subgradient(pc, xid, yid, nx, ny, mask, P0, iters, step):
    P = P0.copy()
    best = P0.copy()
    best_val = np.inf
    trace = np.empty(iters)
    for t in range(iters):
        a, ga = _cond_mi(pc, yid, ny, P)
        b, gb = _cond_mi(pc, xid, nx, P)
        val = max(a, b)
        trace[t] = val
        if val < best_val:
            best_val = val
            best = P.copy()
        g = ga if a >= b else gb
        norm = math.sqrt(float(np.sum(np.where(mask, g * g, 0.0))))
        if norm <= 0.0:
            trace = trace[: t + 1]
            break
        alpha = step / math.sqrt(t + 1.0) / norm
        moved = P - alpha * g
        P = np.vstack([_project_masked_simplex(moved[c], mask[c]) for c in range(P.shape[0])])
    return best, best_val, trace


def deterministic_search(pc, xid, yid, nx, ny, opt_ptr, opt_sets, nsets, top_k, chunk=4096):
    nc = pc.shape[0]
    sizes = np.diff(opt_ptr)
    total = int(np.prod(sizes))
    px = np.bincount(xid, weights=pc, minlength=nx)
    py = np.bincount(yid, weights=pc, minlength=ny)
    # mixed radix, last cell fastest (matches the numba enumeration order)
    radix = np.ones(nc, np.int64)
    for c in range(nc - 2, -1, -1):
        radix[c] = radix[c + 1] * sizes[c + 1]
    best_vals = np.full(top_k, np.inf)
    best_choice = np.zeros((top_k, nc), np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        pos = (idx[:, None] // radix[None, :]) % sizes[None, :]
        choice = opt_sets[opt_ptr[:-1][None, :] + pos]
        m = len(idx)
        rows = np.repeat(np.arange(m), nc)
        mx = np.zeros((m, nx, nsets))
        my = np.zeros((m, ny, nsets))
        np.add.at(mx, (rows, np.tile(xid, m), choice.ravel()), np.tile(pc, m))
        np.add.at(my, (rows, np.tile(yid, m), choice.ravel()), np.tile(pc, m))
        with np.errstate(divide="ignore", invalid="ignore"):
            hx = np.where(mx > 0, mx * np.log(px[None, :, None] / mx), 0.0).sum(axis=(1, 2))
            hy = np.where(my > 0, my * np.log(py[None, :, None] / my), 0.0).sum(axis=(1, 2))
        vals = np.maximum(hx, hy) / _LN2
        allv = np.concatenate([best_vals, vals])
        allc = np.vstack([best_choice, choice])
        keep = np.argsort(allv, kind="stable")[:top_k]
        best_vals, best_choice = allv[keep], allc[keep]
    return best_vals, best_choice


# ------------------------------------------------ bitset searches (ints)


def _adj_int(adj):
    return [int(a) for a in adj]


def _bits(x):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _greedy_color_count(adj, P):
    cnt = 0
    U = P
    while U:
        cnt += 1
        Q = U
        while Q:
            v = (Q & -Q).bit_length() - 1
            b = 1 << v
            U &= ~b
            Q &= ~b & ~adj[v]
    return cnt


def _clique(adj, active):
    best = 0

    def expand(P, d):
        nonlocal best
        if not P:
            best = max(best, d)
            return
        if d + _greedy_color_count(adj, P) <= best:
            return
        v = (P & -P).bit_length() - 1
        expand(P & adj[v], d + 1)
        expand(P & ~(1 << v), d)

    expand(active, 0)
    return best


def clique_number_bits(adj, active):
    return _clique(_adj_int(adj), int(active))


def _active_order(adj, active):
    verts = list(_bits(active))
    return sorted(verts, key=lambda v: (-bin(adj[v] & active).count("1"), v))


def _k_colorable(adj, active, k):
    colors = np.full(64, -1, np.int64)
    order = _active_order(adj, active)
    if not order:
        return True, colors
    if k <= 0:
        return False, colors
    cls = [0] * k
    choice = [-1] * len(order)

    def place(i, maxc):
        if i == len(order):
            return True
        v = order[i]
        b = 1 << v
        for c in range(min(k - 1, maxc + 1) + 1):
            if cls[c] & adj[v]:
                continue
            cls[c] |= b
            choice[i] = c
            if place(i + 1, max(maxc, c)):
                return True
            cls[c] &= ~b
        return False

    ok = place(0, -1)
    if ok:
        for v, c in zip(order, choice):
            colors[v] = c
    return ok, colors


def k_colorable_bits(adj, active, k):
    return _k_colorable(_adj_int(adj), int(active), int(k))


def chromatic_number_bits(adj, active):
    a = _adj_int(adj)
    act = int(active)
    if not act:
        return 0, np.full(64, -1, np.int64)
    k = _clique(a, act)
    while True:
        ok, colors = _k_colorable(a, act, k)
        if ok:
            return k, colors
        k += 1


def imperfect_subset_bits(adj, nv):
    a = _adj_int(adj)
    for m in range(1, 1 << nv):
        w = _clique(a, m)
        ok, _ = _k_colorable(a, m, w)
        if not ok:
            return m
    return 0


def _entropy_lb(mass, rem):
    if mass:
        imax = max(range(len(mass)), key=lambda c: (mass[c], -c))
        ms = [m + (rem if c == imax else 0.0) for c, m in enumerate(mass)]
    else:
        ms = [rem]
    return -sum(m * math.log(m) for m in ms if m > 0) / _LN2


def min_entropy_coloring_bits(adj, probs, order, incumbent, incumbent_colors):
    a = _adj_int(adj)
    order = [int(v) for v in order]
    nv = len(order)
    suffix = [0.0] * (nv + 1)
    for i in range(nv - 1, -1, -1):
        suffix[i] = suffix[i + 1] + float(probs[order[i]])
    best = float(incumbent)
    best_colors = np.array(incumbent_colors, dtype=np.int64).copy()
    cls: list[int] = []
    mass: list[float] = []
    choice = [-1] * nv

    def place(i):
        nonlocal best
        if i == nv:
            h = _entropy_lb(mass, 0.0)
            if h < best - 1e-12:
                best = h
                for j in range(nv):
                    best_colors[order[j]] = choice[j]
            return
        v = order[i]
        b = 1 << v
        pv = float(probs[v])
        for c in range(len(cls) + 1):
            new = c == len(cls)
            if new:
                cls.append(b)
                mass.append(pv)
            else:
                if cls[c] & a[v]:
                    continue
                cls[c] |= b
                mass[c] += pv
            if _entropy_lb(mass, suffix[i + 1]) < best - 1e-12:
                choice[i] = c
                place(i + 1)
            if new:
                cls.pop()
                mass.pop()
            else:
                cls[c] &= ~b
                mass[c] -= pv

    place(0)
    return best_colors, best


def typical_log2_count(side_counts, lo, hi):
    na, nb = lo.shape
    total = 0.0
    for a in range(na):
        n_a = int(side_counts[a])
        dp = np.full(n_a + 1, -np.inf)
        dp[0] = 0.0
        for b in range(nb):
            new = np.full(n_a + 1, -np.inf)
            for kk in range(int(lo[a, b]), min(int(hi[a, b]), n_a) + 1):
                shifted = np.full(n_a + 1, -np.inf)
                shifted[kk:] = dp[: n_a + 1 - kk] - gammaln(kk + 1.0)
                new = np.logaddexp(new, shifted)
            dp = new
        if dp[n_a] == -np.inf:
            return -np.inf
        total += gammaln(n_a + 1.0) + dp[n_a]
    return float(total / _LN2)
