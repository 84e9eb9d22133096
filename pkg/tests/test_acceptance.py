"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import itertools
import time

import numpy as np
import pytest

import oracles
from conftest import INSTANCES, ONE_EDGE_PAIR, PRODUCT_PAIR, XOR_PAIR, random_binary, random_compatible, random_pmf
from sidecode import (
    Graph,
    and_power,
    complementary_delivery_graph,
    complementary_delivery_rate,
    complementary_pair,
    cutset_bound,
    dsbs,
    graph_entropy,
    index_coding_rate,
    inner_bound_RI,
    is_compatible,
    is_perfect,
    koerner_union,
    maximal_independent_sets,
    n_instance_graph,
    one_receiver_graph,
    rooks_graph,
    zero_error_bounds,
)
from sidecode.cli import load_instance
from sidecode.codec import binning_simulate, build_index_code, build_zero_error_code, measured_rate, verify_index_code, verify_zero_error
from sidecode.coloring import canonical_colors
from sidecode.confusion import FunctionPair, one_receiver_pair
from sidecode.gentropy import components_of

H_QUARTER = oracles.h2(0.25)  # 0.811278


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")

    return emit


def test_criterion_01_dsbs_zero_error_codes(report):
    p = dsbs(0.25)
    fp = complementary_pair(p)
    start = time.perf_counter()
    rates, verified = {}, {}
    for n in (1, 2, 3):
        cb = build_zero_error_code(p, fp, n, allow_heuristic=True)
        verified[n] = verify_zero_error(cb, p, fp).ok
        rates[n] = measured_rate(cb, p)
    elapsed = time.perf_counter() - start
    ok = all(verified.values()) and all(r >= H_QUARTER - 1e-12 for r in rates.values()) and rates[3] <= rates[1] and elapsed < 60
    detail = ", ".join(f"n={n} rate {r:.6f} verified={verified[n]}" for n, r in rates.items())
    report(1, ok, f"{detail}; bound {H_QUARTER:.6f}; {elapsed:.1f} s")
    assert ok


def _random_cluster_graph(rng):
    n = int(rng.integers(1, 11))
    labels = rng.integers(0, int(rng.integers(1, n + 1)), n)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if labels[i] == labels[j]]
    return Graph.from_index_edges(list(range(n)), edges), rng.dirichlet(np.ones(n))


def _koerner_closed_form(g, p):
    # disjoint union of cliques: sum over cliques of P(clique) * H(X | clique)
    total = 0.0
    for comp in g.components():
        mass = p[comp].sum()
        total += mass * oracles.H(p[comp] / mass)
    return total


def _small_graph_classes():
    import networkx as nx

    out = []
    for n in range(1, 6):
        pairs = list(itertools.combinations(range(n), 2))
        seen = []
        for mask in range(1 << len(pairs)):
            gx = nx.Graph()
            gx.add_nodes_from(range(n))
            gx.add_edges_from(pairs[i] for i in range(len(pairs)) if mask >> i & 1)
            if not any(nx.is_isomorphic(gx, h) for h in seen):
                seen.append(gx)
        out.extend(seen)
    return out


def test_criterion_02_graph_entropy_oracles(report):
    rng = np.random.default_rng(2)
    worst_union = 0.0
    worst_koerner = 0.0
    for _ in range(50):
        g, p = _random_cluster_graph(rng)
        value, _ = graph_entropy(g, p)
        worst_union = max(worst_union, abs(value - _koerner_closed_form(g, p)))
        worst_koerner = max(worst_koerner, abs(value - koerner_union(components_of(g, p))))
    worst_grid = 0.0
    classes = _small_graph_classes()
    for gx in classes:
        n = gx.number_of_nodes()
        p = np.full(n, 1 / n)
        edges = {frozenset(e) for e in gx.edges}
        grid = oracles.graph_entropy_grid_maximal(range(n), edges, p, step=0.05)
        value, _ = graph_entropy(Graph.from_index_edges(list(range(n)), list(gx.edges)), p)
        worst_grid = max(worst_grid, abs(grid - value))
    ok = worst_union <= 1e-6 and worst_koerner <= 1e-6 and worst_grid <= 1e-3
    report(
        2,
        ok,
        f"cluster graphs max |err| {worst_union:.2e} (closed form), {worst_koerner:.2e} (union routine); "
        f"{len(classes)} graphs <= 5 vertices max |grid - value| {worst_grid:.2e}",
    )
    assert ok


def test_criterion_03_block_graph_equals_and_power(report):
    rng = np.random.default_rng(3)
    failures = {"complementary delivery": 0, "one receiver": 0}
    checked = 0
    for _ in range(20):
        p = random_pmf(rng, 3, 3)
        for n in (2, 3):
            checked += 1
            if n_instance_graph(p, complementary_pair(p), n) != and_power(complementary_delivery_graph(p), n):
                failures["complementary delivery"] += 1
            if n_instance_graph(p, one_receiver_pair(p), n) != and_power(one_receiver_graph(p), n):
                failures["one receiver"] += 1
    ok = not any(failures.values())
    report(3, ok, f"mismatches out of {checked} (pmf, n) pairs: {failures}")
    assert ok


def _random_small_support(rng, limit=10):
    while True:
        p = random_pmf(rng, 4, 4, zero_prob=float(rng.uniform(0, 0.6)))
        if len(p.support) <= limit:
            return p


def test_criterion_04_perfection(report):
    rng = np.random.default_rng(4)
    failures = 0
    for _ in range(100):
        p = _random_small_support(rng)
        for g in (one_receiver_graph(p), complementary_delivery_graph(p)):
            if not is_perfect(g, method="exhaustive"):
                failures += 1
    report(4, failures == 0, f"{failures} imperfect graphs among 200 (100 supports, two graphs each)")
    assert failures == 0


def test_criterion_05_compatibility(report):
    p = dsbs(0.25)
    wit = is_compatible(p, PRODUCT_PAIR)
    product_levels = {frozenset(c for c in p.support if c[0] * c[1] == v) for v in (0, 1)}
    product_ok = wit is not None and wit.partition(p) == product_levels
    one_edge_ok = is_compatible(p, ONE_EDGE_PAIR) is None
    # both predicates depend on the tables only through which entries are
    # equal, so each equality pattern is decided once and reused
    memo = {}
    failures = 0
    tables = list(itertools.product(range(4), repeat=4))
    for fv in tables:
        for gv in tables:
            key = (canonical_colors(fv), canonical_colors(gv))
            if key not in memo:
                fp = FunctionPair([fv[:2], fv[2:]], [gv[:2], gv[2:]])
                memo[key] = (is_compatible(p, fp) is not None) != (rooks_graph(p, fp).n_edges == 1)
            failures += not memo[key]
    ok = product_ok and one_edge_ok and failures == 0
    report(
        5,
        ok,
        f"X*Y witness {product_ok}, one-edge pair incompatible {one_edge_ok}, "
        f"dichotomy failures {failures} of {len(tables) ** 2} pairs ({len(memo)} equality patterns)",
    )
    assert ok


def test_criterion_06_ri_equals_cutset(report):
    rng = np.random.default_rng(6)
    worst = 0.0
    for k in range(100):
        pmf, fp = random_compatible(rng) if k < 50 else random_binary(rng)
        worst = max(worst, abs(inner_bound_RI(pmf, fp, seed=k).value - cutset_bound(pmf, fp)))
    report(6, worst <= 1e-4, f"max |R_I - cut-set| over 50 compatible + 50 binary instances {worst:.2e}")
    assert worst <= 1e-4


def test_criterion_07_zero_error_bounds(report):
    rng = np.random.default_rng(7)
    order_violations = 0
    for _ in range(100):
        pmf = random_pmf(rng, 3, 3)
        fp = FunctionPair(rng.integers(0, 3, pmf.probs.shape).tolist(), rng.integers(0, 3, pmf.probs.shape).tolist())
        lo, hi = zero_error_bounds(pmf, fp)
        order_violations += lo > hi + 1e-9
    worst = (0.0, None)
    for _ in range(20):
        pmf = random_pmf(rng, 3, 3)
        lo, hi = zero_error_bounds(pmf, complementary_pair(pmf))
        target = complementary_delivery_rate(pmf)
        gap = max(abs(lo - target), abs(hi - target))
        if gap > worst[0]:
            worst = (gap, pmf.probs.round(4).tolist())
    ok = order_violations == 0 and worst[0] <= 1e-4
    report(
        7,
        ok,
        f"lower > upper on {order_violations} of 100; complementary delivery max bound gap to "
        f"max(H(X|Y), H(Y|X)) {worst[0]:.2e}" + (f" at pmf {worst[1]}" if worst[0] > 1e-4 else ""),
    )
    assert ok


def _cond_entropy_on(probs, mask, target, given):
    sub = np.where(mask, probs, 0.0)
    return oracles.cond_entropy_table(sub / sub.sum(), target, given)


def test_criterion_08_decodability_identities(report):
    rng = np.random.default_rng(8)
    worst = 0.0
    instances = [(dsbs(0.25), PRODUCT_PAIR), (dsbs(0.25), XOR_PAIR)]
    instances += [random_compatible(rng) for _ in range(40)]
    instances += [(p, FunctionPair(rng.integers(0, 3, p.probs.shape).tolist(), rng.integers(0, 3, p.probs.shape).tolist())) for p in (random_pmf(rng, 3, 3) for _ in range(40))]
    compatible = sets_checked = 0
    for pmf, fp in instances:
        f, g = fp.f, fp.g
        wit = is_compatible(pmf, fp)
        if wit is not None:
            compatible += 1
            h = wit.h
            worst = max(
                worst,
                oracles.cond_entropy_table(pmf.probs, lambda x, y: f[x][y], lambda x, y: (h[x][y], x)),
                oracles.cond_entropy_table(pmf.probs, lambda x, y: g[x][y], lambda x, y: (h[x][y], y)),
                abs(
                    oracles.cond_entropy_table(pmf.probs, lambda x, y: h[x][y], lambda x, y: x)
                    - oracles.cond_entropy_table(pmf.probs, lambda x, y: f[x][y], lambda x, y: x)
                ),
                abs(
                    oracles.cond_entropy_table(pmf.probs, lambda x, y: h[x][y], lambda x, y: y)
                    - oracles.cond_entropy_table(pmf.probs, lambda x, y: g[x][y], lambda x, y: y)
                ),
            )
        for w in maximal_independent_sets(rooks_graph(pmf, fp)):
            sets_checked += 1
            mask = np.zeros(pmf.probs.shape, bool)
            for c in w:
                mask[c] = True
            worst = max(
                worst,
                _cond_entropy_on(pmf.probs, mask, lambda x, y: f[x][y], lambda x, y: x),
                _cond_entropy_on(pmf.probs, mask, lambda x, y: g[x][y], lambda x, y: y),
            )
    report(8, worst <= 1e-9, f"max conditional entropy {worst:.2e} over {compatible} compatible instances and {sets_checked} maximal independent sets")
    assert worst <= 1e-9


def test_criterion_09_binning_simulation(report):
    p = dsbs(0.25)
    seed, trials = 0, 200
    plain = binning_simulate(p, XOR_PAIR, 1.0, 1000, trials, seed)
    forced = {n: binning_simulate(p, XOR_PAIR, 1.0, n, trials, seed, allow_uncoded=False).empirical_error for n in (200, 500, 1000)}
    low_rate = binning_simulate(p, XOR_PAIR, 0.5, 1000, trials, seed, allow_uncoded=False).empirical_error
    monotone = forced[200] >= forced[500] >= forced[1000]
    ok = plain.empirical_error < 0.05 and forced[1000] < 0.05 and monotone and low_rate > 0.2
    report(
        9,
        ok,
        f"rate 1.0 default path '{plain.path}' error {plain.empirical_error:.3f}; forced binning errors {forced}; "
        f"rate 0.5 error {low_rate:.3f} (seed {seed}, {trials} trials)",
    )
    assert ok


def test_criterion_10_index_coding(report):
    inst = load_instance(str(INSTANCES / "three_bits_index.json")).index
    rate = index_coding_rate(inst)
    details, ok = [f"index_coding_rate {rate:.6f}"], abs(rate - 2.0) <= 1e-12
    for n in (1, 2):
        cb = build_index_code(inst, n, allow_heuristic=True)
        verified = verify_index_code(cb, inst).ok
        r = measured_rate(cb, inst)
        ok = ok and verified and 2.0 - 1e-12 <= r <= 2.0 + 1 / n
        details.append(f"n={n} rate {r:.6f} verified={verified}")
    report(10, ok, ", ".join(details))
    assert ok
