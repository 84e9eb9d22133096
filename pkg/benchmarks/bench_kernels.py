"""Time the numba kernels against the numpy fallback on desk-scale inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Numba compile time is measured on the first call and reported separately.
"""

import argparse
import json
import time

import numpy as np

from sidecode import dsbs, kernels
from sidecode.confusion import complementary_pair, support_blocks
from sidecode.gentropy import _membership
from sidecode.graphs import Graph, and_power, cycle_graph
from sidecode.pmf import typical_bounds
from sidecode.rates import _ri_problem


def _random_graph(n, density, seed):
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    return Graph.from_index_edges(range(n), edges)


def workloads():
    c5sq = and_power(cycle_graph(5), 2)
    g16 = _random_graph(16, 0.4, 1)
    p16 = np.random.default_rng(2).dirichlet(np.ones(16))
    order16 = np.array(sorted(range(16), key=lambda v: (-p16[v], v)), np.int64)
    g6 = _random_graph(6, 0.5, 3)
    g12 = _random_graph(12, 0.3, 4)
    _, member12 = _membership(g12)
    p12 = np.full(12, 1 / 12)
    q12 = np.full(member12.shape[1], 1 / member12.shape[1])
    p = dsbs(0.25)
    prob = _ri_problem(p, complementary_pair(p))
    P0 = prob.mask / prob.mask.sum(axis=1, keepdims=True)
    blocks = support_blocks(p, 3)
    side = np.array([[sum(c[0] << k for k, c in enumerate(b)) for b in blocks]], np.int64)
    demand = np.array([[sum(c[1] << k for k, c in enumerate(b)) for b in blocks]], np.int64)
    joint = np.array([[0.375, 0.125], [0.125, 0.375]])
    lo, hi = (b.reshape(2, 2).astype(np.int64) for b in typical_bounds(joint.ravel(), 2000, 0.1))
    side_counts = np.array([1000, 1000], np.int64)
    full = lambda g: np.uint64((1 << g.n) - 1)  # noqa: E731
    return {
        "chromatic number, C5 AND square (25 vertices)": lambda k: k.chromatic_number_bits(c5sq.bit_rows, full(c5sq)),
        "min-entropy coloring, random 16 vertices": lambda k: k.min_entropy_coloring_bits(
            g16.bit_rows, p16, order16, 10.0, np.arange(16, dtype=np.int64)
        ),
        "AND cube of a 6-vertex graph": lambda k: k.and_power_csr(g6.indptr, g6.indices, g6.n, 3),
        "OR cube of a 6-vertex graph": lambda k: k.or_power_csr(g6.indptr, g6.indices, g6.n, 3),
        "block graph, DSBS n = 3": lambda k: k.block_graph_csr(side, demand),
        "graph entropy, random 12 vertices": lambda k: k.graph_entropy_am(member12, p12, q12, 5000, 1e-12, 1e-12),
        "R_I subgradient, 5000 iterations": lambda k: k.ri_subgradient(
            prob.pc, prob.xid, prob.yid, prob.nx, prob.ny, prob.mask, P0, 5000, 0.5
        ),
        "typical count, n = 2000": lambda k: k.typical_log2_count(side_counts, lo, hi),
    }


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json")
    args = parser.parse_args(argv)
    impls = kernels.implementations()
    rows = []
    for name, job in workloads().items():
        row = {"kernel": name}
        for backend, mod in impls.items():
            first = _time(lambda: job(mod), 1)
            row[backend] = _time(lambda: job(mod), args.repeat)
            if backend == "numba":
                row["numba_first_call"] = first
        if "numba" in row:
            row["speedup"] = row["numpy"] / row["numba"] if row["numba"] > 0 else float("inf")
        rows.append(row)
    width = max(len(r["kernel"]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy s':>10}  {'numba s':>10}  {'speedup':>8}  {'compile s':>9}")
    for r in rows:
        print(
            f"{r['kernel']:<{width}}  {r['numpy']:>10.5f}  {r.get('numba', float('nan')):>10.5f}  "
            f"{r.get('speedup', float('nan')):>8.1f}  {r.get('numba_first_call', float('nan')):>9.2f}"
        )
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
