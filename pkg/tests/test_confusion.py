import itertools

import numpy as np
import pytest

import oracles
from conftest import ONE_EDGE_PAIR, PRODUCT_PAIR, XOR_PAIR, random_compatible, random_pair, random_pmf
from sidecode import dsbs
from sidecode.confusion import (
    FunctionPair,
    IndexCodingInstance,
    column_receiver_graph,
    column_receiver_pair,
    complementary_delivery_graph,
    complementary_pair,
    forced_merge_table,
    index_confusion_graph,
    is_compatible,
    n_instance_graph,
    one_receiver_graph,
    one_receiver_pair,
    rooks_graph,
    support_blocks,
    tabulate,
)
from sidecode.graphs import Graph, and_power, chromatic_number, complete_graph, union
from sidecode.pmf import JointPmf, MultiPmf, PmfError


def oracle_graph(vertices, edges):
    return Graph.from_edges(vertices, [tuple(e) for e in edges])


def test_rooks_graph_examples():
    p = dsbs(0.25)
    g = complementary_delivery_graph(p)
    assert g.n == 4 and g.n_edges == 4 and all(len(g.neighbors(i)) == 2 for i in range(4))
    diag = JointPmf([[0.5, 0], [0, 0.5]])
    assert complementary_delivery_graph(diag).n_edges == 0
    grid = complementary_delivery_graph(JointPmf(np.full((2, 3), 1 / 6)))
    # 2x3 rook's graph: 2 * C(3,2) row edges + 3 column edges
    assert grid.n_edges == 9
    one = one_receiver_graph(p)
    assert one.n_edges == 2 and one.has_edge((0, 0), (0, 1)) and one.has_edge((1, 0), (1, 1))
    row = one_receiver_graph(JointPmf([[0.2, 0.3, 0.5]]))
    assert row == complete_graph(list(row.vertices))


def test_one_edge_pair_graph():
    g = rooks_graph(dsbs(0.25), ONE_EDGE_PAIR)
    assert g.edges() == [((0, 0), (0, 1))]


def test_rooks_graph_matches_oracle(rng):
    for _ in range(50):
        p = random_pmf(rng, 4, 4)
        fp = random_pair(rng, p)
        vs, es = oracles.rook_edges(p.probs, fp.f, fp.g)
        assert rooks_graph(p, fp) == oracle_graph(vs, es)


def test_block_graph_matches_oracle(rng):
    for _ in range(25):
        p = random_pmf(rng, 3, 3, zero_prob=0.4)
        fp = random_pair(rng, p, values=2)
        for n in (1, 2):
            vs, es = oracles.block_edges(p.probs, fp.f, fp.g, n)
            expected = oracle_graph(vs if n > 1 else [b[0] for b in vs], [tuple(b[0] for b in e) if n == 1 else tuple(e) for e in es])
            assert n_instance_graph(p, fp, n) == expected


def test_block_graph_is_union_of_receiver_powers(rng):
    # the n-letter graph for complementary delivery is the union of each
    # receiver's AND power, and it equals the AND power of the single-letter
    # graph for one receiver
    for _ in range(20):
        p = random_pmf(rng, 3, 3)
        for n in (2, 3):
            gn = n_instance_graph(p, complementary_pair(p), n)
            assert gn == union(and_power(one_receiver_graph(p), n), and_power(column_receiver_graph(p), n))
            assert gn.is_subgraph_of(and_power(complementary_delivery_graph(p), n))
            assert n_instance_graph(p, one_receiver_pair(p), n) == and_power(one_receiver_graph(p), n)
            assert n_instance_graph(p, column_receiver_pair(p), n) == and_power(column_receiver_graph(p), n)


def test_complementary_delivery_block_graph_differs_from_and_power():
    p = JointPmf(np.full((2, 2), 0.25))
    gn = n_instance_graph(p, complementary_pair(p), 2)
    a, b = ((0, 0), (0, 0)), ((0, 1), (1, 0))
    assert and_power(complementary_delivery_graph(p), 2).has_edge(a, b)
    assert not gn.has_edge(a, b)


def test_support_blocks_and_cap():
    p = dsbs(0.25)
    assert len(support_blocks(p, 3)) == 64
    from sidecode._config import CapExceeded, caps_override

    with caps_override(power_vertices=10):
        with pytest.raises(CapExceeded):
            n_instance_graph(p, complementary_pair(p), 2)


def test_function_pair_validation():
    with pytest.raises(PmfError):
        rooks_graph(dsbs(0.25), FunctionPair([[0, None], [0, 0]], [[0, 0], [0, 0]]))
    fp = FunctionPair([[0, None], [None, 1]], [[0, None], [None, 1]])
    assert rooks_graph(JointPmf([[0.5, 0], [0, 0.5]]), fp).n_edges == 0
    assert tabulate(lambda x, y: x * y, 2, 2) == ((0, 0), (0, 1))


def test_compatibility_examples():
    p = dsbs(0.25)
    wit = is_compatible(p, PRODUCT_PAIR)
    assert wit is not None
    assert wit.partition(p) == {frozenset({(0, 0), (0, 1), (1, 0)}), frozenset({(1, 1)})}
    assert is_compatible(p, ONE_EDGE_PAIR) is None
    wit = is_compatible(p, XOR_PAIR)
    # no two XOR cells in a row or column agree, so the finest witness is
    # the identity
    assert wit is not None and len(wit.partition(p)) == 4
    same = FunctionPair([[2, 0], [1, 2]], [[2, 0], [1, 2]])
    wit = is_compatible(p, same)
    # cells in different rows and columns are never forced together
    assert wit.partition(p) == {frozenset({c}) for c in p.support}
    assert rooks_graph(p, FunctionPair(wit.h, wit.h)) == rooks_graph(p, same)


def test_compatibility_witness_reproduces_graph(rng):
    found = 0
    for _ in range(60):
        p = random_pmf(rng, 3, 3)
        fp = random_pair(rng, p)
        wit = is_compatible(p, fp)
        if wit is not None:
            found += 1
            assert rooks_graph(p, FunctionPair(wit.h, wit.h)) == rooks_graph(p, fp)
    for _ in range(30):
        p, fp = random_compatible(rng)
        wit = is_compatible(p, fp)
        assert wit is not None
        assert rooks_graph(p, FunctionPair(wit.h, wit.h)) == rooks_graph(p, fp)
    assert found > 0


def _brute_compatible(p, fp):
    cells = p.support
    target = rooks_graph(p, fp)
    for h in itertools.product(range(len(cells)), repeat=len(cells)):
        table = [[None] * p.y_size for _ in range(p.x_size)]
        for c, v in zip(cells, h):
            table[c[0]][c[1]] = v
        if rooks_graph(p, FunctionPair(table, table)) == target:
            return True
    return False


def test_compatibility_matches_brute_force(rng):
    for _ in range(25):
        p = random_pmf(rng, 2, 3, zero_prob=0.2)
        if len(p.support) > 5:
            continue
        fp = random_pair(rng, p, values=2)
        assert (is_compatible(p, fp) is not None) == _brute_compatible(p, fp)


def test_forced_merge_ids_first_occurrence():
    table = forced_merge_table(dsbs(0.25), PRODUCT_PAIR)
    assert table == ((0, 0), (0, 1))


def three_bits():
    return IndexCodingInstance(MultiPmf.from_flat([2, 2, 2], np.full(8, 1 / 8)), ({0}, {1, 2}))


def test_index_graph_examples():
    g = index_confusion_graph(three_bits(), 1)
    assert g.n == 8
    assert chromatic_number(g) == 4
    solo = IndexCodingInstance(MultiPmf.from_flat([2, 2], np.full(4, 0.25)), (set(),))
    g = index_confusion_graph(solo, 1)
    assert g == complete_graph(list(g.vertices))


def test_index_graph_matches_complementary_delivery(rng):
    for _ in range(10):
        p = random_pmf(rng, 3, 3)
        inst = IndexCodingInstance(MultiPmf(p.probs), ({0}, {1}))
        for n in (1, 2):
            assert index_confusion_graph(inst, n) == n_instance_graph(p, complementary_pair(p), n)


def test_index_instance_validation():
    with pytest.raises(PmfError):
        IndexCodingInstance(MultiPmf.from_flat([2, 2], np.full(4, 0.25)), ({3},))
    inst = three_bits()
    assert inst.wants(0) == (1, 2) and inst.has(1) == (1, 2)
