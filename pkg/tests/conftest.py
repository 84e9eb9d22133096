import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sidecode.confusion import FunctionPair  # noqa: E402
from sidecode.pmf import JointPmf  # noqa: E402

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


def random_pmf(rng, max_x=3, max_y=3, zero_prob=0.25, min_x=1, min_y=1) -> JointPmf:
    nx = int(rng.integers(min_x, max_x + 1))
    ny = int(rng.integers(min_y, max_y + 1))
    p = rng.dirichlet(np.ones(nx * ny)).reshape(nx, ny)
    p[rng.random((nx, ny)) < zero_prob] = 0.0
    if p.sum() == 0:
        p[0, 0] = 1.0
    return JointPmf(p / p.sum())


def random_pair(rng, pmf: JointPmf, values=3) -> FunctionPair:
    f = rng.integers(0, values, pmf.probs.shape).tolist()
    g = rng.integers(0, values, pmf.probs.shape).tolist()
    return FunctionPair(f, g)


def random_compatible(rng, max_x=3, max_y=3, values=3):
    """Compatible by construction: f and g relabel a common h injectively
    within each row and within each column respectively."""
    pmf = random_pmf(rng, max_x, max_y, min_x=2, min_y=2)
    h = rng.integers(0, values, pmf.probs.shape)
    nx, ny = pmf.probs.shape
    f = [[int((h[x, y] + x) % values) for y in range(ny)] for x in range(nx)]
    g = [[int((h[x, y] + 2 * y) % values) for y in range(ny)] for x in range(nx)]
    return pmf, FunctionPair(f, g)


def random_binary(rng, values=3):
    p = rng.dirichlet(np.ones(4)).reshape(2, 2)
    pmf = JointPmf(p)
    return pmf, random_pair(rng, pmf, values)


# Tables from the worked examples: Z1 = X*Y with Z2 = Y if Y = 0 else X,
# and Z1 = Y if X = 0 else X with Z2 = Y.
PRODUCT_PAIR = FunctionPair([[0, 0], [0, 1]], [[0, 0], [0, 1]])
ONE_EDGE_PAIR = FunctionPair([[0, 1], [1, 1]], [[0, 1], [0, 1]])
XOR_PAIR = FunctionPair([[0, 1], [1, 0]], [[0, 1], [1, 0]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
