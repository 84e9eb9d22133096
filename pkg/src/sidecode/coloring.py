"""Proper colorings and minimum-entropy coloring.

Exact search is a branch and bound over vertices in descending probability
order (ties by vertex index), seeded with the best heuristic coloring.  The
heuristic runs DSATUR and a greedy probability-peeling construction, then
improves both by steepest descent over class merges and single-vertex
moves, keeping the lower-entropy result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from . import kernels
from ._config import CapExceeded, get_caps
from .graphs import Graph, dsatur_coloring
from .pmf import entropy_of


@dataclass(frozen=True)
class Coloring:
    """Color id per vertex index, ids contiguous from 0 in first-use order."""

    colors: tuple[int, ...]
    exact: bool = False

    def __post_init__(self):
        object.__setattr__(self, "colors", canonical_colors(self.colors))

    @property
    def color_count(self) -> int:
        return max(self.colors) + 1 if self.colors else 0

    def assignment(self, g: Graph) -> dict[Hashable, int]:
        return dict(zip(g.vertices, self.colors))

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.color_count)]
        for v, c in enumerate(self.colors):
            out[c].append(v)
        return out

    def class_masses(self, dist) -> np.ndarray:
        return np.bincount(np.asarray(self.colors, dtype=np.int64), weights=np.asarray(dist, float), minlength=self.color_count)

    def entropy(self, dist) -> float:
        return entropy_of(self.class_masses(dist))

    def is_proper(self, g: Graph) -> bool:
        if len(self.colors) != g.n:
            return False
        c = np.asarray(self.colors)
        return not any(c[i] == c[j] for i, j in g.index_edges())


def canonical_colors(colors: Sequence[int]) -> tuple[int, ...]:
    remap: dict[int, int] = {}
    return tuple(remap.setdefault(int(c), len(remap)) for c in colors)


def _phi(t: float) -> float:
    return -t * math.log2(t) if t > 0 else 0.0


def _peeling_coloring(g: Graph, p: np.ndarray) -> list[int]:
    """Repeatedly take a greedy heavy independent set among uncolored vertices."""
    order = sorted(range(g.n), key=lambda v: (-p[v], v))
    adj = g.matrix
    colors = [-1] * g.n
    c = 0
    left = order
    while left:
        chosen: list[int] = []
        rest: list[int] = []
        for v in left:
            if any(adj[v, u] for u in chosen):
                rest.append(v)
            else:
                chosen.append(v)
        for v in chosen:
            colors[v] = c
        c += 1
        left = rest
    return colors


def _local_search(g: Graph, p: np.ndarray, colors: list[int]) -> list[int]:
    """Steepest descent on entropy over class merges and single-vertex moves."""
    adj = g.matrix
    colors = list(canonical_colors(colors))
    while True:
        k = max(colors) + 1 if colors else 0
        members = [[] for _ in range(k)]
        for v, c in enumerate(colors):
            members[c].append(v)
        mass = [float(sum(p[v] for v in m)) for m in members]
        best_delta, best_move = -1e-15, None
        for a in range(k):
            for b in range(a + 1, k):
                if adj[np.ix_(members[a], members[b])].any():
                    continue
                delta = _phi(mass[a] + mass[b]) - _phi(mass[a]) - _phi(mass[b])
                if delta < best_delta:
                    best_delta, best_move = delta, ("merge", a, b)
        for v in range(g.n):
            a = colors[v]
            if p[v] <= 0:
                continue
            for b in range(k):
                if b == a or any(adj[v, u] for u in members[b]):
                    continue
                delta = (_phi(mass[a] - p[v]) + _phi(mass[b] + p[v])) - (_phi(mass[a]) + _phi(mass[b]))
                if delta < best_delta:
                    best_delta, best_move = delta, ("move", v, b)
        if best_move is None:
            return list(canonical_colors(colors))
        kind, s, t = best_move
        if kind == "merge":
            colors = [s if c == t else c for c in colors]
        else:
            colors[s] = t
        colors = list(canonical_colors(colors))


def heuristic_min_entropy_coloring(g: Graph, dist) -> tuple[Coloring, float]:
    p = np.asarray(dist, dtype=float)
    best: tuple[float, tuple[int, ...]] | None = None
    for start in (dsatur_coloring(g), _peeling_coloring(g, p)):
        improved = Coloring(tuple(_local_search(g, p, start)))
        h = improved.entropy(p)
        if best is None or h < best[0] - 1e-12:
            best = (h, improved.colors)
    assert best is not None
    return Coloring(best[1], exact=False), best[0]


def min_entropy_coloring(g: Graph, dist, *, allow_heuristic: bool = False) -> tuple[Coloring, float]:
    """Minimum-entropy proper coloring of ``g`` under vertex distribution ``dist``.

    Exact up to the ``exact_coloring`` cap.  Above it, raises
    :class:`CapExceeded` unless ``allow_heuristic`` is set, in which case the
    heuristic coloring is returned with ``Coloring.exact == False`` (its
    entropy is then an upper bound on the chromatic entropy).
    """
    p = np.asarray(dist, dtype=float)
    if p.shape != (g.n,):
        raise ValueError(f"distribution has {p.size} entries for {g.n} vertices")
    if np.any(p < 0):
        raise ValueError("negative vertex probabilities")
    if g.n == 0:
        return Coloring((), exact=True), 0.0
    total = p.sum()
    if total <= 0:
        raise ValueError("vertex distribution has zero mass")
    p = p / total
    if g.n > get_caps().exact_coloring:
        if not allow_heuristic:
            raise CapExceeded(
                f"exact min-entropy coloring: {g.n} vertices exceeds cap exact_coloring={get_caps().exact_coloring}"
            )
        return heuristic_min_entropy_coloring(g, p)
    seed, h_seed = heuristic_min_entropy_coloring(g, p)
    order = np.array(sorted(range(g.n), key=lambda v: (-p[v], v)), dtype=np.int64)
    inc = np.array(seed.colors, dtype=np.int64)
    colors, value = kernels.min_entropy_coloring_bits(g.bit_rows, p, order, h_seed + 1e-9, inc)
    col = Coloring(tuple(int(c) for c in colors[: g.n]), exact=True)
    return col, col.entropy(p)
