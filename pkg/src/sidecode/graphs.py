"""Labeled simple graphs and the exact searches run on them.

A :class:`Graph` is immutable: an ordered tuple of hashable vertex labels
plus a symmetric CSR adjacency with sorted rows and no self-loops.  Product
graphs label vertices by tuples in row-major order (first coordinate most
significant), which is also their index order.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import kernels
from ._config import CapExceeded, check_cap, get_caps


class GraphError(ValueError):
    """Malformed graph or incompatible graph operands."""


class Graph:
    def __init__(self, vertices: Sequence[Hashable], indptr, indices, *, _trusted: bool = False):
        self.vertices = tuple(vertices)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        if not _trusted:
            self._validate()
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    def _validate(self) -> None:
        n = len(self.vertices)
        if len(set(self.vertices)) != n:
            raise GraphError("vertex labels must be unique")
        if self.indptr.shape != (n + 1,) or self.indptr[0] != 0 or self.indptr[-1] != len(self.indices):
            raise GraphError("malformed adjacency pointers")
        if np.any(np.diff(self.indptr) < 0):
            raise GraphError("malformed adjacency pointers")
        if len(self.indices) and (self.indices.min() < 0 or self.indices.max() >= n):
            raise GraphError("adjacency index out of range")
        rows = np.repeat(np.arange(n), np.diff(self.indptr))
        if np.any(rows == self.indices):
            raise GraphError("self-loops are not allowed")
        keys = rows * n + self.indices
        if np.any(np.diff(keys) <= 0):
            raise GraphError("adjacency rows must be sorted without duplicates")
        back = np.sort(self.indices * n + rows)
        if not np.array_equal(back, keys):
            raise GraphError("adjacency must be symmetric")

    # ------------------------------------------------------- constructors

    @classmethod
    def from_index_edges(cls, vertices: Sequence[Hashable], edges: Iterable[tuple[int, int]]) -> "Graph":
        n = len(vertices)
        pairs = [(int(a), int(b)) for a, b in edges]
        for a, b in pairs:
            if a == b:
                raise GraphError(f"self-loop at vertex {vertices[a]!r}")
        keys = np.array(sorted({a * n + b for a, b in pairs} | {b * n + a for a, b in pairs}), dtype=np.int64)
        indptr = np.zeros(n + 1, np.int64)
        np.cumsum(np.bincount(keys // n, minlength=n) if n else [], out=indptr[1:])
        return cls(vertices, indptr, keys % n if n else keys, _trusted=False)

    @classmethod
    def from_edges(cls, vertices: Sequence[Hashable], edges: Iterable[tuple[Hashable, Hashable]]) -> "Graph":
        vertices = tuple(vertices)
        pos = {v: i for i, v in enumerate(vertices)}
        try:
            pairs = [(pos[a], pos[b]) for a, b in edges]
        except KeyError as exc:
            raise GraphError(f"edge endpoint {exc.args[0]!r} is not a vertex") from None
        return cls.from_index_edges(vertices, pairs)

    @classmethod
    def from_adjacency(cls, vertices: Sequence[Hashable], adj) -> "Graph":
        a = np.asarray(adj, dtype=bool)
        n = len(vertices)
        if a.shape != (n, n):
            raise GraphError(f"adjacency shape {a.shape} does not match {n} vertices")
        if not np.array_equal(a, a.T):
            raise GraphError("adjacency must be symmetric")
        if np.any(np.diag(a)):
            raise GraphError("self-loops are not allowed")
        rows, cols = np.nonzero(a)
        indptr = np.zeros(n + 1, np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(vertices, indptr, cols, _trusted=True)

    # --------------------------------------------------------- accessors

    @property
    def n(self) -> int:
        return len(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    @cached_property
    def index(self) -> dict[Hashable, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def adjacent(self, i: int, j: int) -> bool:
        row = self.neighbors(i)
        k = np.searchsorted(row, j)
        return bool(k < len(row) and row[k] == j)

    def has_edge(self, a: Hashable, b: Hashable) -> bool:
        return self.adjacent(self.index[a], self.index[b])

    def index_edges(self) -> list[tuple[int, int]]:
        """Edges as index pairs ``i < j`` in lexicographic order."""
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        keep = rows < self.indices
        return list(zip(rows[keep].tolist(), self.indices[keep].tolist()))

    def edges(self) -> list[tuple[Hashable, Hashable]]:
        return [(self.vertices[i], self.vertices[j]) for i, j in self.index_edges()]

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense boolean adjacency (read-only)."""
        a = np.zeros((self.n, self.n), dtype=bool)
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        a[rows, self.indices] = True
        a.setflags(write=False)
        return a

    @cached_property
    def bit_rows(self) -> np.ndarray:
        """One uint64 neighbor mask per vertex; only for graphs of <= 64 vertices."""
        if self.n > 64:
            raise CapExceeded(f"bitset kernels take at most 64 vertices, graph has {self.n}")
        rows = np.zeros(self.n, np.uint64)
        for i in range(self.n):
            m = 0
            for j in self.neighbors(i).tolist():
                m |= 1 << j
            rows[i] = np.uint64(m)
        rows.setflags(write=False)
        return rows

    def _edge_keys(self) -> set[tuple[Hashable, Hashable]]:
        out = set()
        for a, b in self.edges():
            out.add((a, b))
            out.add((b, a))
        return out

    def __eq__(self, other) -> bool:
        """Labeled equality: same vertex labels and same edges between them."""
        if not isinstance(other, Graph):
            return NotImplemented
        if self.vertices == other.vertices:
            return bool(np.array_equal(self.indptr, other.indptr) and np.array_equal(self.indices, other.indices))
        if set(self.vertices) != set(other.vertices) or self.n_edges != other.n_edges:
            return False
        return self._edge_keys() == other._edge_keys()

    __hash__ = None  # type: ignore[assignment]

    def is_subgraph_of(self, other: "Graph") -> bool:
        """Same vertex labels and every edge of ``self`` is an edge of ``other``."""
        if set(self.vertices) != set(other.vertices):
            return False
        pos = other.index
        return all(other.adjacent(pos[a], pos[b]) for a, b in self.edges())

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.n_edges})"

    # ------------------------------------------------------- derivations

    def induced(self, idx: Sequence[int]) -> "Graph":
        idx = [int(i) for i in idx]
        sub = self.matrix[np.ix_(idx, idx)]
        return Graph.from_adjacency([self.vertices[i] for i in idx], sub)

    def complement(self) -> "Graph":
        a = ~self.matrix
        np.fill_diagonal(a, False)
        return Graph.from_adjacency(self.vertices, a)

    def relabel(self, vertices: Sequence[Hashable]) -> "Graph":
        if len(vertices) != self.n:
            raise GraphError("relabel needs one label per vertex")
        return Graph(vertices, self.indptr, self.indices)

    def reorder(self, vertices: Sequence[Hashable]) -> "Graph":
        """Same labeled graph with vertices listed in the given order."""
        if set(vertices) != set(self.vertices) or len(vertices) != self.n:
            raise GraphError("reorder needs a permutation of the vertex labels")
        perm = [self.index[v] for v in vertices]
        return self.induced(perm)

    def components(self) -> list[list[int]]:
        """Connected components as sorted index lists, ordered by smallest member."""
        if self.n == 0:
            return []
        m = csr_matrix((np.ones(len(self.indices)), self.indices, self.indptr), shape=(self.n, self.n))
        _, labels = connected_components(m, directed=False)
        groups: dict[int, list[int]] = {}
        for i, lab in enumerate(labels.tolist()):
            groups.setdefault(lab, []).append(i)
        return sorted(groups.values(), key=lambda g: g[0])

    def to_dot(self, name: str = "G") -> str:
        def q(label) -> str:
            return '"' + str(label).replace("\\", "\\\\").replace('"', '\\"') + '"'

        lines = [f"graph {name} {{"]
        lines += [f"  {q(v)};" for v in self.vertices]
        lines += [f"  {q(a)} -- {q(b)};" for a, b in self.edges()]
        lines.append("}")
        return "\n".join(lines) + "\n"


# ------------------------------------------------------------ families


def complete_graph(vertices: int | Sequence[Hashable]) -> Graph:
    vs = list(range(vertices)) if isinstance(vertices, int) else list(vertices)
    return Graph.from_index_edges(vs, itertools.combinations(range(len(vs)), 2))


def empty_graph(vertices: int | Sequence[Hashable]) -> Graph:
    vs = list(range(vertices)) if isinstance(vertices, int) else list(vertices)
    return Graph.from_index_edges(vs, [])


def cycle_graph(m: int) -> Graph:
    return Graph.from_index_edges(list(range(m)), [(i, (i + 1) % m) for i in range(m)])


def path_graph(m: int) -> Graph:
    return Graph.from_index_edges(list(range(m)), [(i, i + 1) for i in range(m - 1)])


# ------------------------------------------------------------ products


def _power_labels(g: Graph, n: int) -> list[tuple]:
    return list(itertools.product(g.vertices, repeat=n))


def and_power(g: Graph, n: int) -> Graph:
    """n-fold AND product: distinct tuples adjacent when every coordinate is
    equal or adjacent."""
    if n < 1:
        raise ValueError("power must be >= 1")
    if n == 1:
        return g
    check_cap("power_vertices", g.n**n, "AND power vertices")
    check_cap("edges", (2 * g.n_edges + g.n) ** n - g.n**n, "AND power adjacency entries")
    indptr, indices = kernels.and_power_csr(g.indptr, g.indices, g.n, n)
    return Graph(_power_labels(g, n), indptr, indices, _trusted=True)


def or_power(g: Graph, n: int) -> Graph:
    """n-fold OR product: tuples adjacent when some coordinate is adjacent."""
    if n < 1:
        raise ValueError("power must be >= 1")
    if n == 1:
        return g
    big = g.n**n
    check_cap("power_vertices", big, "OR power vertices")
    check_cap("edges", big * big - (g.n * g.n - 2 * g.n_edges) ** n, "OR power adjacency entries")
    indptr, indices = kernels.or_power_csr(g.indptr, g.indices, g.n, n)
    return Graph(_power_labels(g, n), indptr, indices, _trusted=True)


def union(*graphs: Graph) -> Graph:
    """Edge union of graphs on the same vertex set (vertex order of the first)."""
    if not graphs:
        raise GraphError("union needs at least one graph")
    base = graphs[0]
    keys = [np.repeat(np.arange(base.n), np.diff(base.indptr)) * base.n + base.indices]
    for g in graphs[1:]:
        if g.vertices != base.vertices:
            if set(g.vertices) != set(base.vertices) or g.n != base.n:
                raise GraphError("union requires identical vertex sets")
            g = g.reorder(base.vertices)
        keys.append(np.repeat(np.arange(g.n), np.diff(g.indptr)) * g.n + g.indices)
    allk = np.unique(np.concatenate(keys)) if base.n else np.zeros(0, np.int64)
    indptr = np.zeros(base.n + 1, np.int64)
    if base.n:
        np.cumsum(np.bincount(allk // base.n, minlength=base.n), out=indptr[1:])
    return Graph(base.vertices, indptr, allk % base.n if base.n else allk, _trusted=True)


# ------------------------------------------------- independent sets etc.


def _bron_kerbosch(nbrs: list[int], full: int) -> list[int]:
    """All maximal cliques of the graph with neighbor bitmasks ``nbrs``."""
    out: list[int] = []

    def expand(r: int, p: int, x: int) -> None:
        if not p and not x:
            out.append(r)
            return
        px = p | x
        # pivot maximizing |P ∩ N(u)|, smallest index on ties
        best_u, best_c = -1, -1
        m = px
        while m:
            low = m & -m
            u = low.bit_length() - 1
            m ^= low
            c = bin(p & nbrs[u]).count("1")
            if c > best_c:
                best_u, best_c = u, c
        cand = p & ~nbrs[best_u]
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            expand(r | low, p & nbrs[v], x & nbrs[v])
            p &= ~low
            x |= low

    expand(0, full, 0)
    return out


def maximal_independent_set_indices(g: Graph) -> list[tuple[int, ...]]:
    """Maximal independent sets as sorted index tuples, lexicographically sorted."""
    check_cap("independent_sets", g.n, "maximal independent set enumeration")
    if g.n == 0:
        return [()]
    full = (1 << g.n) - 1
    comp = []
    for i in range(g.n):
        m = full & ~(1 << i)
        for j in g.neighbors(i).tolist():
            m &= ~(1 << j)
        comp.append(m)
    sets = []
    for mask in _bron_kerbosch(comp, full):
        sets.append(tuple(i for i in range(g.n) if mask >> i & 1))
    return sorted(sets)


def maximal_independent_sets(g: Graph) -> list[frozenset]:
    return [frozenset(g.vertices[i] for i in s) for s in maximal_independent_set_indices(g)]


def is_independent(g: Graph, idx: Iterable[int]) -> bool:
    idx = list(idx)
    return not g.matrix[np.ix_(idx, idx)].any()


def _full_mask(n: int) -> np.uint64:
    return np.uint64((1 << n) - 1)


def clique_number(g: Graph) -> int:
    """Exact clique number by branch and bound with a greedy-coloring bound."""
    check_cap("exact_chromatic", g.n, "clique number")
    if g.n == 0:
        return 0
    return int(kernels.clique_number_bits(g.bit_rows, _full_mask(g.n)))


def chromatic_number(g: Graph) -> int:
    """Exact chromatic number (raises :class:`CapExceeded` above the cap)."""
    value, _ = exact_coloring(g)
    return value


def exact_coloring(g: Graph) -> tuple[int, list[int]]:
    """Exact chromatic number with a witness coloring (color per vertex)."""
    check_cap("exact_chromatic", g.n, "chromatic number")
    if g.n == 0:
        return 0, []
    k, colors = kernels.chromatic_number_bits(g.bit_rows, _full_mask(g.n))
    return int(k), [int(c) for c in colors[: g.n]]


def dsatur_coloring(g: Graph) -> list[int]:
    """DSATUR greedy coloring; ties broken by degree then lowest index."""
    n = g.n
    colors = [-1] * n
    sat: list[set[int]] = [set() for _ in range(n)]
    deg = g.degrees().tolist()
    nbrs = [g.neighbors(i).tolist() for i in range(n)]
    for _ in range(n):
        v = max((i for i in range(n) if colors[i] < 0), key=lambda i: (len(sat[i]), deg[i], -i))
        c = 0
        while c in sat[v]:
            c += 1
        colors[v] = c
        for u in nbrs[v]:
            sat[u].add(c)
    return colors


def chromatic_upper_bound(g: Graph) -> tuple[int, bool]:
    """``(value, exact)``: exact chromatic number when within the cap,
    otherwise the DSATUR color count flagged as an upper bound."""
    if g.n <= get_caps().exact_chromatic:
        return chromatic_number(g), True
    return (max(dsatur_coloring(g)) + 1 if g.n else 0), False


def _is_cluster_graph(g: Graph) -> bool:
    for comp in g.components():
        k = len(comp)
        if any(len(g.neighbors(i)) != k - 1 for i in comp):
            return False
    return True


def _is_bipartite(g: Graph) -> bool:
    side = [-1] * g.n
    for s in range(g.n):
        if side[s] >= 0:
            continue
        side[s] = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for u in g.neighbors(v).tolist():
                if side[u] < 0:
                    side[u] = 1 - side[v]
                    stack.append(u)
                elif side[u] == side[v]:
                    return False
    return True


def imperfect_witness(g: Graph) -> list[int] | None:
    """Vertex indices of an induced subgraph with clique number below its
    chromatic number (exhaustive search), or None if the graph is perfect."""
    check_cap("perfect", g.n, "exhaustive perfection test")
    if g.n == 0:
        return None
    mask = int(kernels.imperfect_subset_bits(g.bit_rows, g.n))
    if mask == 0:
        return None
    return [i for i in range(g.n) if mask >> i & 1]


def is_perfect(g: Graph, method: str = "auto") -> bool:
    """Perfection test.

    ``method="exhaustive"`` compares clique and chromatic numbers on every
    induced subgraph (cap ``perfect`` vertices).  ``"auto"`` first accepts
    disjoint unions of cliques and bipartite graphs, then runs the
    exhaustive test per connected component.
    """
    if method == "exhaustive":
        return imperfect_witness(g) is None
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if _is_cluster_graph(g) or _is_bipartite(g):
        return True
    return all(imperfect_witness(g.induced(comp)) is None for comp in g.components())
