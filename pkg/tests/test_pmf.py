import math

import numpy as np
import pytest

import oracles
from conftest import ONE_EDGE_PAIR, XOR_PAIR, random_pmf
from sidecode.pmf import (
    JointPmf,
    MultiPmf,
    PmfError,
    conditional_entropy,
    dsbs,
    entropy,
    function_conditional_entropy,
    iid_extension,
    typical_set,
)
from sidecode._config import CapExceeded, caps_override


def test_entropy_examples():
    assert entropy(JointPmf(np.full((2, 2), 0.25))) == pytest.approx(2.0, abs=1e-12)
    assert entropy(dsbs(0.25)) == pytest.approx(1 + oracles.h2(0.25), abs=1e-12)
    assert entropy(dsbs(0.25)) == pytest.approx(1.811278, abs=1e-6)
    assert entropy(JointPmf([[1.0, 0.0], [0.0, 0.0]])) == 0.0


def test_conditional_entropy_examples():
    assert conditional_entropy(dsbs(0.25), "x") == pytest.approx(0.811278, abs=1e-6)
    assert conditional_entropy(JointPmf(np.full((2, 2), 0.25)), "x") == pytest.approx(1.0, abs=1e-12)
    assert conditional_entropy(JointPmf([[0.5, 0], [0, 0.5]]), "x") == pytest.approx(0.0, abs=1e-12)


def test_function_conditional_entropy_examples():
    p = dsbs(0.25)
    assert function_conditional_entropy(p, ONE_EDGE_PAIR.f, "x") == pytest.approx(0.5 * oracles.h2(0.25), abs=1e-12)
    assert function_conditional_entropy(p, ONE_EDGE_PAIR.f, "x") == pytest.approx(0.405639, abs=1e-6)
    assert function_conditional_entropy(p, ONE_EDGE_PAIR.g, "y") == pytest.approx(0.0, abs=1e-12)
    assert function_conditional_entropy(p, XOR_PAIR.f, "x") == pytest.approx(0.811278, abs=1e-6)


def test_function_table_must_cover_support():
    with pytest.raises(PmfError):
        function_conditional_entropy(dsbs(0.25), [[0, None], [1, 1]], "x")
    # off-support holes are fine
    p = JointPmf([[0.5, 0.0], [0.0, 0.5]])
    assert function_conditional_entropy(p, [[0, None], [None, 1]], "x") == 0.0


def test_validation():
    with pytest.raises(PmfError):
        JointPmf([[0.5, 0.4]])
    with pytest.raises(PmfError):
        JointPmf([[1.2, -0.2]])
    renorm = JointPmf([[0.5, 0.5 + 5e-10]])
    assert renorm.probs.sum() == pytest.approx(1.0, abs=1e-15)


def test_iid_extension_examples():
    p = dsbs(0.25)
    p1 = iid_extension(p, 1)
    assert np.array_equal(p1.probs, p.probs)
    assert p1.x_labels == ((0,), (1,))
    p2 = iid_extension(p, 2)
    assert p2.probs[0, 0] == pytest.approx(0.375**2, abs=1e-15)
    assert p2.x_labels[0] == (0, 0)
    point = JointPmf([[0, 0], [0, 1.0]])
    p3 = iid_extension(point, 3)
    assert p3.support == [(7, 7)]
    assert p3.x_labels[7] == (1, 1, 1)


def test_iid_extension_cap():
    with caps_override(block_cells=100):
        with pytest.raises(CapExceeded):
            iid_extension(dsbs(0.1), 4)


def test_chain_rule_and_extension_entropy(rng):
    for _ in range(100):
        p = random_pmf(rng, 4, 4)
        hx = oracles.H(p.marginal("x"))
        assert entropy(p) == pytest.approx(hx + conditional_entropy(p, "x"), abs=1e-9)
    for _ in range(10):
        p = random_pmf(rng, 3, 3)
        assert entropy(iid_extension(p, 3)) == pytest.approx(3 * entropy(p), abs=1e-9)


def test_conditional_entropy_matches_oracle(rng):
    for _ in range(30):
        p = random_pmf(rng, 3, 4)
        ref = oracles.cond_entropy_table(p.probs, lambda x, y: y, lambda x, y: x)
        assert conditional_entropy(p, "x") == pytest.approx(ref, abs=1e-12)


def test_typical_set_deterministic_source():
    ts = typical_set([1.0, 0.0], 5, 0.1)
    assert list(ts.members()) == [(0, 0, 0, 0, 0)]
    assert ts.probability == pytest.approx(1.0)


def test_typical_set_fair_coin_enumeration():
    # relative tolerance 0.3 around 0.5 allows frequencies in [0.35, 0.65]:
    # with n = 4 only two ones qualify
    ts = typical_set([0.5, 0.5], 4, 0.3)
    ref = oracles.typical_members([0.5, 0.5], 4, 0.3)
    assert list(ts.members()) == ref
    assert {sum(s) for s in ref} == {2}
    assert ts.size == 6
    assert ts.probability == pytest.approx(6 / 16)


def test_typical_set_dsbs_joint_enumeration():
    p = dsbs(0.25)
    flat = p.probs.ravel()
    for n, eps in ((6, 0.2), (4, 0.5), (6, 0.6)):
        ts = typical_set(p, n, eps)
        ref = oracles.typical_members(flat, n, eps)
        assert ts.size == len(ref)
        assert ts.probability == pytest.approx(sum(oracles.seq_prob(flat, s) for s in ref), abs=1e-12)
    # the 0.125 cells need 6 * 0.125 = 0.75 +/- 0.15 occurrences: impossible
    assert typical_set(p, 6, 0.2).size == 0


def test_typical_probability_grows():
    probs = [typical_set([0.5, 0.5], n, 0.5).probability for n in (4, 8, 12)]
    assert probs[0] < probs[1] < probs[2]


def test_typical_membership_predicate():
    ts = typical_set([0.25, 0.75], 8, 0.5)
    assert (0, 1, 1, 1, 0, 1, 1, 1) in ts
    assert (0, 0, 0, 0, 0, 1, 1, 1) not in ts
    assert (0, 1) not in ts


def test_multipmf():
    m = MultiPmf.from_flat([2, 2, 2], np.full(8, 1 / 8))
    assert m.k == 3
    assert m.conditional_entropy([1, 2], [0]) == pytest.approx(2.0)
    assert m.conditional_entropy([0], [1, 2]) == pytest.approx(1.0)
    with pytest.raises(PmfError):
        MultiPmf.from_flat([2, 2], [0.5, 0.5])
    assert len(m.support) == 8
    assert math.isclose(m.marginal([0]).sum(), 1.0)
