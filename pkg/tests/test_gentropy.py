import math

import numpy as np
import pytest

import oracles
from conftest import random_pmf
from sidecode import JointPmf, complementary_delivery_rate, one_receiver_graph
from sidecode.confusion import column_receiver_graph
from sidecode.gentropy import (
    chromatic_entropy,
    complementary_entropy_bracket,
    components_of,
    graph_entropy,
    koerner_union,
    union_rate_min,
)
from sidecode.graphs import Graph, complete_graph, cycle_graph, empty_graph, is_perfect, path_graph
from test_graphs import as_oracle, random_graph


def test_graph_entropy_named_graphs():
    p = np.full(4, 0.25)
    assert graph_entropy(complete_graph(4), p)[0] == pytest.approx(2.0, abs=1e-9)
    assert graph_entropy(empty_graph(4), p)[0] == 0.0
    # bipartite C4 uniform: H(P) minus the complement's entropy (two edges)
    assert graph_entropy(cycle_graph(4), p)[0] == pytest.approx(1.0, abs=1e-9)
    assert graph_entropy(cycle_graph(5), np.full(5, 0.2))[0] == pytest.approx(math.log2(2.5), abs=1e-8)


def test_graph_entropy_certificate():
    value, ch = graph_entropy(cycle_graph(5), np.full(5, 0.2))
    assert ch.gap <= 1e-8
    assert ch.mutual_information(np.full(5, 0.2)) == pytest.approx(value, abs=1e-9)
    for i, row in enumerate(np.asarray(ch.cond)):
        assert row.sum() == pytest.approx(1.0)
        for j, w in enumerate(ch.sets):
            if row[j] > 0:
                assert cycle_graph(5).vertices[i] in w


def test_graph_entropy_matches_grid_oracle(rng):
    for _ in range(8):
        g = random_graph(rng, 4)
        p = rng.dirichlet(np.ones(g.n))
        vs, es = as_oracle(g)
        grid = oracles.graph_entropy_grid_maximal(vs, es, p, step=0.05)
        value, _ = graph_entropy(g, p)
        assert value <= grid + 1e-9
        assert value >= grid - 5e-3


def test_graph_entropy_restarts_agree(rng):
    g = random_graph(rng, 7, density=0.5)
    p = rng.dirichlet(np.ones(g.n))
    a, _ = graph_entropy(g, p)
    b, _ = graph_entropy(g, p, restarts=3, seed=1)
    assert a == pytest.approx(b, abs=1e-7)


def test_perfect_graph_complement_identity(rng):
    # perfect graphs split the source entropy between G and its complement
    done = 0
    while done < 15:
        g = random_graph(rng, 7)
        if not is_perfect(g):
            continue
        p = rng.dirichlet(np.ones(g.n))
        total = graph_entropy(g, p)[0] + graph_entropy(g.complement(), p)[0]
        assert total == pytest.approx(oracles.H(p), abs=1e-6)
        done += 1


def test_monotone_and_subadditive(rng):
    for _ in range(15):
        g = random_graph(rng, 6)
        p = rng.dirichlet(np.ones(g.n))
        h, _ = graph_entropy(g, p)
        assert -1e-12 <= h <= oracles.H(p) + 1e-12
        hc, _ = graph_entropy(g.complement(), p)
        assert h + hc >= oracles.H(p) - 1e-7
        chi_h, col = chromatic_entropy(g, p)
        assert chi_h >= h - 1e-9 and col.is_proper(g)


def test_koerner_union(rng):
    for _ in range(15):
        a, b = random_graph(rng, 4), random_graph(rng, 4)
        edges = list(a.index_edges()) + [(i + a.n, j + a.n) for i, j in b.index_edges()]
        g = Graph.from_index_edges(range(a.n + b.n), edges)
        p = rng.dirichlet(np.ones(g.n))
        assert koerner_union(components_of(g, p)) == pytest.approx(graph_entropy(g, p)[0], abs=1e-7)


def test_bracket_c5():
    b = complementary_entropy_bracket(cycle_graph(5), np.full(5, 0.2), n_max=2)
    assert b.exact is None
    assert b.lower == pytest.approx(1.0, abs=1e-8)
    assert b.upper == pytest.approx(0.5 * math.log2(5), abs=1e-12)
    assert b.estimates["graph_entropy"] == pytest.approx(math.log2(2.5), abs=1e-8)
    assert set(b.to_dict()) == {"lower", "upper", "exact", "estimates", "notes"}


def test_bracket_perfect_is_exact(rng):
    for _ in range(10):
        g = path_graph(int(rng.integers(2, 6)))
        p = rng.dirichlet(np.ones(g.n))
        b = complementary_entropy_bracket(g, p, n_max=1)
        assert b.exact == pytest.approx(graph_entropy(g, p)[0], abs=1e-9)
        assert b.lower <= b.exact + 1e-9 <= b.upper + 2e-9


def test_bracket_orders(rng):
    for _ in range(10):
        g = random_graph(rng, 5)
        p = rng.dirichlet(np.ones(g.n))
        b = complementary_entropy_bracket(g, p, n_max=2)
        assert b.lower <= b.upper + 1e-7


def test_union_rate_matches_complementary_delivery(rng):
    # [[.4, .2], [.2, .2]]: both conditional entropies equal 0.4 h(1/2) + 0.6 h(1/3)
    p = JointPmf([[0.4, 0.2], [0.2, 0.2]])
    d = np.array([p.probs[c] for c in p.support])
    b = union_rate_min([one_receiver_graph(p), column_receiver_graph(p)], d)
    ref = 0.4 * oracles.h2(0.5) + 0.6 * oracles.h2(1 / 3)
    assert b.exact == pytest.approx(ref, abs=1e-6)
    for _ in range(20):
        p = random_pmf(rng, 3, 3)
        d = np.array([p.probs[c] for c in p.support])
        b = union_rate_min([one_receiver_graph(p), column_receiver_graph(p)], d)
        assert b.exact == pytest.approx(complementary_delivery_rate(p), abs=1e-6)
