"""Confusion graphs for computing functions with complementary side information.

Decoder 1 sees X and wants Z1 = f(X, Y); decoder 2 sees Y and wants
Z2 = g(X, Y).  Two support cells must get different codewords exactly when
they share x and differ in f, or share y and differ in g.  The graph of
that relation, its n-letter block version, compatibility of (f, g) and the
index-coding analogue live here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from . import kernels
from ._config import check_cap
from .graphs import Graph
from .pmf import JointPmf, MultiPmf, PmfError, table_values


@dataclass(frozen=True)
class FunctionPair:
    """Tables ``f[x][y]`` and ``g[x][y]``; entries off the support are ignored
    and may be ``None``."""

    f: tuple
    g: tuple
    z1_labels: tuple = ()
    z2_labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "f", _freeze(self.f))
        object.__setattr__(self, "g", _freeze(self.g))

    def f_values(self, pmf: JointPmf) -> dict[tuple[int, int], Hashable]:
        return table_values(pmf, self.f)

    def g_values(self, pmf: JointPmf) -> dict[tuple[int, int], Hashable]:
        return table_values(pmf, self.g)

    def check(self, pmf: JointPmf) -> None:
        self.f_values(pmf)
        self.g_values(pmf)


def _freeze(table) -> tuple:
    out = []
    for row in table:
        out.append(tuple(tuple(v) if isinstance(v, list) else v for v in row))
    return tuple(out)


def function_pair(f, g) -> FunctionPair:
    """Build a FunctionPair from nested tables; tabulate callables first
    with :func:`tabulate`."""
    return FunctionPair(f, g)


def tabulate(fn, x_size: int, y_size: int) -> tuple:
    return tuple(tuple(fn(x, y) for y in range(y_size)) for x in range(x_size))


def complementary_pair(pmf: JointPmf) -> FunctionPair:
    """Z1 = Y, Z2 = X."""
    return FunctionPair(tabulate(lambda x, y: y, pmf.x_size, pmf.y_size), tabulate(lambda x, y: x, pmf.x_size, pmf.y_size))


def one_receiver_pair(pmf: JointPmf) -> FunctionPair:
    """Z1 = Y, Z2 constant (only decoder 1 has a demand)."""
    return FunctionPair(tabulate(lambda x, y: y, pmf.x_size, pmf.y_size), tabulate(lambda x, y: 0, pmf.x_size, pmf.y_size))


def column_receiver_pair(pmf: JointPmf) -> FunctionPair:
    """Z1 constant, Z2 = X (only decoder 2 has a demand)."""
    return FunctionPair(tabulate(lambda x, y: 0, pmf.x_size, pmf.y_size), tabulate(lambda x, y: x, pmf.x_size, pmf.y_size))


def _ids(values: Sequence[Hashable]) -> np.ndarray:
    remap: dict = {}
    return np.array([remap.setdefault(v, len(remap)) for v in values], dtype=np.int64)


def _row_ids(rows: np.ndarray) -> np.ndarray:
    if rows.shape[1] == 0:
        return np.zeros(rows.shape[0], np.int64)
    _, inv = np.unique(rows, axis=0, return_inverse=True)
    return inv.reshape(-1).astype(np.int64)


def support_blocks(pmf: JointPmf, n: int) -> list[tuple[tuple[int, int], ...]]:
    """Support of (X^n, Y^n) as tuples of cells, row-major."""
    check_cap("power_vertices", len(pmf.support) ** n, "block support size")
    return list(itertools.product(pmf.support, repeat=n))


def block_probabilities(pmf: JointPmf, blocks) -> np.ndarray:
    return np.array([float(np.prod([pmf.probs[x, y] for x, y in b])) for b in blocks])


def _block_graph(vertices, side: np.ndarray, demand: np.ndarray) -> Graph:
    nv = len(vertices)
    check_cap("edges", nv * nv, "block graph adjacency (worst case)") if nv > 20000 else None
    indptr, indices = kernels.block_graph_csr(np.ascontiguousarray(side, np.int64), np.ascontiguousarray(demand, np.int64))
    return Graph(vertices, indptr, indices, _trusted=True)


def n_instance_graph(pmf: JointPmf, fp: FunctionPair, n: int) -> Graph:
    """Block confusion graph on the support of (X^n, Y^n): blocks adjacent
    when they share x^n and differ in some f coordinate, or share y^n and
    differ in some g coordinate."""
    if n < 1:
        raise ValueError("block length must be >= 1")
    cells = pmf.support
    fv, gv = fp.f_values(pmf), fp.g_values(pmf)
    f_id = _ids([fv[c] for c in cells])
    g_id = _ids([gv[c] for c in cells])
    xs = np.array([c[0] for c in cells], np.int64)
    ys = np.array([c[1] for c in cells], np.int64)
    blocks = support_blocks(pmf, n)
    idx = np.array(list(itertools.product(range(len(cells)), repeat=n)), np.int64).reshape(len(blocks), n)
    side = np.vstack([_row_ids(xs[idx]), _row_ids(ys[idx])])
    demand = np.vstack([_row_ids(f_id[idx]), _row_ids(g_id[idx])])
    return _block_graph(blocks if n > 1 else cells, side, demand)


def rooks_graph(pmf: JointPmf, fp: FunctionPair) -> Graph:
    """Single-letter confusion graph on the support cells ``(x, y)``."""
    return n_instance_graph(pmf, fp, 1)


def complementary_delivery_graph(pmf: JointPmf) -> Graph:
    """Support cells adjacent when they share a row or a column."""
    return rooks_graph(pmf, complementary_pair(pmf))


def one_receiver_graph(pmf: JointPmf) -> Graph:
    """Support cells adjacent when they share a row (disjoint row cliques)."""
    return rooks_graph(pmf, one_receiver_pair(pmf))


def column_receiver_graph(pmf: JointPmf) -> Graph:
    """Support cells adjacent when they share a column."""
    return rooks_graph(pmf, column_receiver_pair(pmf))


# ----------------------------------------------------------- compatibility


@dataclass(frozen=True)
class CompatibilityWitness:
    """A single function h whose confusion graph (h, h) equals that of (f, g).
    ``h[x][y]`` is a component id on the support and ``None`` elsewhere."""

    h: tuple

    def values(self, pmf: JointPmf) -> dict[tuple[int, int], int]:
        return table_values(pmf, self.h)

    def partition(self, pmf: JointPmf) -> set[frozenset]:
        groups: dict[int, set] = {}
        for cell, v in self.values(pmf).items():
            groups.setdefault(v, set()).add(cell)
        return {frozenset(s) for s in groups.values()}


def forced_merge_table(pmf: JointPmf, fp: FunctionPair) -> tuple:
    """Finest h constant on cells forced equal: same row with equal f, or
    same column with equal g (transitively closed).  Ids in first-occurrence
    order over the row-major support."""
    cells = pmf.support
    pos = {c: i for i, c in enumerate(cells)}
    parent = list(range(len(cells)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def join(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    fv, gv = fp.f_values(pmf), fp.g_values(pmf)
    for (x1, y1), (x2, y2) in itertools.combinations(cells, 2):
        if (x1 == x2 and fv[(x1, y1)] == fv[(x2, y2)]) or (y1 == y2 and gv[(x1, y1)] == gv[(x2, y2)]):
            join(pos[(x1, y1)], pos[(x2, y2)])
    ids: dict[int, int] = {}
    table = [[None] * pmf.y_size for _ in range(pmf.x_size)]
    for c in cells:
        table[c[0]][c[1]] = ids.setdefault(find(pos[c]), len(ids))
    return tuple(tuple(r) for r in table)


def is_compatible(pmf: JointPmf, fp: FunctionPair) -> CompatibilityWitness | None:
    """Return a witness h with the same confusion graph as (f, g), or None.

    Any valid h must be constant on the forced-merge classes, and the finest
    such h separates every pair the classes separate, so checking that one
    candidate decides compatibility."""
    h = forced_merge_table(pmf, fp)
    if rooks_graph(pmf, FunctionPair(h, h)) == rooks_graph(pmf, fp):
        return CompatibilityWitness(h)
    return None


# ------------------------------------------------------------ index coding


@dataclass(frozen=True)
class IndexCodingInstance:
    """K correlated sources; receiver i holds sources ``has[i]`` and wants
    all the others.  Source indices are 0-based."""

    sources: MultiPmf
    receivers: tuple[frozenset[int], ...]

    def __post_init__(self):
        recv = tuple(frozenset(int(i) for i in r) for r in self.receivers)
        if not recv:
            raise PmfError("index coding instance needs at least one receiver")
        for r in recv:
            if any(i < 0 or i >= self.sources.k for i in r):
                raise PmfError(f"receiver side information {sorted(r)} outside sources 0..{self.sources.k - 1}")
        object.__setattr__(self, "receivers", recv)

    @property
    def k(self) -> int:
        return self.sources.k

    def wants(self, i: int) -> tuple[int, ...]:
        return tuple(j for j in range(self.k) if j not in self.receivers[i])

    def has(self, i: int) -> tuple[int, ...]:
        return tuple(sorted(self.receivers[i]))


def index_support_blocks(inst: IndexCodingInstance, n: int) -> list[tuple[tuple[int, ...], ...]]:
    supp = inst.sources.support
    check_cap("power_vertices", len(supp) ** n, "block support size")
    return list(itertools.product(supp, repeat=n))


def index_block_probabilities(inst: IndexCodingInstance, blocks) -> np.ndarray:
    probs = inst.sources.probs
    return np.array([float(np.prod([probs[s] for s in b])) for b in blocks])


def index_confusion_graph(inst: IndexCodingInstance, n: int) -> Graph:
    """Blocks adjacent when some receiver sees the same side information in
    both but demands differ."""
    if n < 1:
        raise ValueError("block length must be >= 1")
    supp = np.array(inst.sources.support, np.int64).reshape(-1, inst.k)
    blocks = index_support_blocks(inst, n)
    idx = np.array(list(itertools.product(range(len(supp)), repeat=n)), np.int64).reshape(len(blocks), n)
    vals = supp[idx]  # (blocks, n, K)
    side, demand = [], []
    for i in range(len(inst.receivers)):
        side.append(_row_ids(vals[:, :, list(inst.has(i))].reshape(len(blocks), -1)))
        demand.append(_row_ids(vals[:, :, list(inst.wants(i))].reshape(len(blocks), -1)))
    labels = blocks if n > 1 else [tuple(s) for s in inst.sources.support]
    return _block_graph(labels, np.vstack(side), np.vstack(demand))
