"""Graph information quantities: chromatic entropy, graph entropy,
Körner's union formula and brackets on complementary graph entropy.

Graph entropy is ``min I(W; X)`` over channels from a vertex to an
independent set containing it.  Restricting W to maximal independent sets
and writing ``q`` for the law of W, the objective becomes
``-sum_x p(x) log2 sum_{w ∋ x} q(w)``, convex in ``q`` and minimized by
multiplicative updates ``q <- q * A^T (p / A q)``.  Each iterate carries a
duality-gap certificate ``(max_w [A^T (p / A q)]_w - 1) / ln 2`` bounding its
distance to the optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from ._config import CapExceeded, get_caps
from .coloring import Coloring, min_entropy_coloring
from .graphs import (
    Graph,
    and_power,
    chromatic_upper_bound,
    is_perfect,
    maximal_independent_set_indices,
    union,
)
from .pmf import entropy_of, typical_bounds

GAP_TOL = 1e-10
RTOL = 1e-10


def _dist(g: Graph, dist) -> np.ndarray:
    p = np.asarray(dist, dtype=float).ravel()
    if p.shape != (g.n,):
        raise ValueError(f"distribution has {p.size} entries for {g.n} vertices")
    if np.any(p < 0) or p.sum() <= 0:
        raise ValueError("vertex distribution must be non-negative with positive mass")
    return p / p.sum()


def chromatic_entropy(g: Graph, dist, *, allow_heuristic: bool = False) -> tuple[float, Coloring]:
    """Minimum entropy of a proper coloring; ``Coloring.exact`` is False when
    the value is only a heuristic upper bound."""
    coloring, bits = min_entropy_coloring(g, _dist(g, dist), allow_heuristic=allow_heuristic)
    return bits, coloring


@dataclass(frozen=True)
class AuxiliaryChannel:
    """Channel from vertices to independent sets.

    ``sets[j]`` is a tuple of vertex labels; ``cond[i, j]`` is the probability
    of set j given vertex i, zero unless vertex i belongs to set j."""

    sets: tuple[tuple, ...]
    cond: np.ndarray
    set_probs: np.ndarray = field(default=None)  # type: ignore[assignment]
    iterations: int = 0
    gap: float = 0.0
    trace: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def mutual_information(self, dist) -> float:
        p = np.asarray(dist, float)
        joint = p[:, None] * self.cond
        pw = joint.sum(axis=0)
        nz = joint > 0
        ratio = np.ones_like(joint)
        ratio[nz] = joint[nz] / (p[:, None] * pw[None, :])[nz]
        return float(np.sum(joint[nz] * np.log2(ratio[nz])))


def _membership(g: Graph) -> tuple[list[tuple[int, ...]], np.ndarray]:
    sets = maximal_independent_set_indices(g)
    member = np.zeros((g.n, len(sets)))
    for j, s in enumerate(sets):
        member[list(s), j] = 1.0
    return sets, member


def _channel_from_q(g: Graph, sets, member: np.ndarray, q: np.ndarray, **extra) -> AuxiliaryChannel:
    weights = member * q[None, :]
    rows = weights.sum(axis=1)
    cond = np.zeros_like(member)
    for i in range(g.n):
        if rows[i] > 0:
            cond[i] = weights[i] / rows[i]
        else:
            cond[i] = member[i] / member[i].sum()
    labels = tuple(tuple(g.vertices[i] for i in s) for s in sets)
    return AuxiliaryChannel(labels, cond, q, **extra)


def graph_entropy(
    g: Graph,
    dist,
    *,
    restarts: int = 0,
    seed: int = 0,
    max_iter: int | None = None,
    rtol: float = RTOL,
    gap_tol: float = GAP_TOL,
) -> tuple[float, AuxiliaryChannel]:
    """Graph entropy in bits with an optimal channel to maximal independent sets.

    Starts from the uniform law on maximal independent sets; ``restarts``
    adds seeded Dirichlet starting points and the best result is kept.
    """
    p = _dist(g, dist)
    if g.n_edges == 0:
        sets, member = _membership(g)
        return 0.0, _channel_from_q(g, sets, member, np.ones(1), trace=np.zeros(1))
    sets, member = _membership(g)
    iters = get_caps().iterations if max_iter is None else int(max_iter)
    rng = np.random.default_rng(seed)
    starts = [np.full(len(sets), 1.0 / len(sets))]
    starts += [rng.dirichlet(np.ones(len(sets))) for _ in range(restarts)]
    best = None
    for q0 in starts:
        q, value, it, trace, gap = kernels.graph_entropy_am(member, p, q0, iters, rtol, gap_tol)
        if best is None or value < best[1] - 1e-15:
            best = (q, value, it, trace, gap)
    q, value, it, trace, gap = best
    value = min(max(float(value), 0.0), entropy_of(p))
    return value, _channel_from_q(g, sets, member, q, iterations=int(it), gap=float(gap), trace=trace)


# -------------------------------------------------------------- Körner


@dataclass(frozen=True)
class Component:
    graph: Graph
    prob: float
    dist: np.ndarray


def components_of(g: Graph, dist) -> list[Component]:
    """Connected components with their probabilities and renormalized
    conditional distributions (zero-mass components are dropped)."""
    p = _dist(g, dist)
    out = []
    for comp in g.components():
        mass = float(p[comp].sum())
        if mass > 0:
            out.append(Component(g.induced(comp), mass, p[comp] / mass))
    return out


def koerner_union(components) -> float:
    """Graph entropy of a disjoint union: the probability-weighted sum of the
    component graph entropies under renormalized distributions.  Complete
    components use the closed form H(dist)."""
    comps = [c if isinstance(c, Component) else Component(*c) for c in components]
    total = sum(c.prob for c in comps)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"component probabilities sum to {total:.12g}, expected 1")
    value = 0.0
    for c in comps:
        if c.prob == 0:
            continue
        d = np.asarray(c.dist, float)
        d = d / d.sum()
        m = c.graph.n
        if c.graph.n_edges == m * (m - 1) // 2:
            value += c.prob * entropy_of(d)
        else:
            value += c.prob * graph_entropy(c.graph, d)[0]
    return value


# ------------------------------------------------------ bracket estimates


@dataclass
class EntropyBracket:
    """Bounds on a complementary graph entropy (or minimum rate of a family).

    ``lower`` and ``upper`` are rigorous; ``exact`` is attached only when the
    two provably coincide.  ``estimates`` holds the per-n sequences and
    ``notes`` names the method behind each bound."""

    lower: float
    upper: float
    exact: float | None = None
    estimates: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "estimates": self.estimates,
            "notes": self.notes,
        }


def _typical_vertices(p: np.ndarray, n: int, epsilon: float) -> list[int]:
    """Indices (row-major over V^n) of robustly typical vertex tuples."""
    lo, hi = typical_bounds(p, n, epsilon)
    m = len(p)
    idx = np.arange(m**n)
    digits = (idx[:, None] // (m ** np.arange(n - 1, -1, -1))[None, :]) % m
    counts = np.stack([(digits == a).sum(axis=1) for a in range(m)], axis=1)
    ok = np.all((counts >= lo) & (counts <= hi), axis=1)
    return np.nonzero(ok)[0].tolist()


def _power_dist(p: np.ndarray, n: int) -> np.ndarray:
    out = np.ones(1)
    for _ in range(n):
        out = np.kron(out, p)
    return out


def _power_estimates(gn: Graph, pn: np.ndarray, n: int, p: np.ndarray, epsilon: float) -> dict:
    chi, chi_exact = chromatic_upper_bound(gn)
    keep = pn > 0
    support = gn.induced(np.nonzero(keep)[0].tolist()) if not keep.all() else gn
    hchi, col = chromatic_entropy(support, pn[keep], allow_heuristic=True)
    typical = _typical_vertices(p, n, epsilon)
    if typical:
        tchi, texact = chromatic_upper_bound(gn.induced(typical))
        typical_est = math.log2(tchi) / n if tchi > 0 else 0.0
    else:
        typical_est, texact = None, True
    return {
        "n": n,
        "log_chromatic": math.log2(chi) / n if chi > 0 else 0.0,
        "log_chromatic_exact": chi_exact,
        "chromatic_entropy": hchi / n,
        "chromatic_entropy_exact": col.exact,
        "typical_log_chromatic": typical_est,
        "typical_log_chromatic_exact": texact,
        "typical_vertices": len(typical),
    }


def _check_power_cap(g: Graph, n_max: int) -> None:
    if g.n**n_max > get_caps().power_vertices:
        raise CapExceeded(f"bracket: {g.n}^{n_max} power vertices exceeds cap power_vertices={get_caps().power_vertices}")


def complementary_entropy_bracket(g: Graph, dist, n_max: int = 2, epsilon: float = 0.1) -> EntropyBracket:
    """Bracket the complementary graph entropy of ``(g, dist)``.

    Lower bound: ``H(dist) - H_complement(dist)``, the entropy minus the graph
    entropy of the complement.  Upper bound: the smallest of the graph
    entropy, ``(1/n) log2 chi(G^n)`` and ``(1/n) H(c)`` over the colorings
    found for the AND powers (each valid for every n by subadditivity).  The
    typical-set restricted ``(1/n) log2 chi`` at fixed ``epsilon`` is recorded
    as an estimate only.  For perfect graphs the bounds meet at the graph
    entropy, which is attached as the exact value."""
    p = _dist(g, dist)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    _check_power_cap(g, n_max)
    h_graph, _ = graph_entropy(g, p)
    h_complement, _ = graph_entropy(g.complement(), p)
    lower = max(entropy_of(p) - h_complement, 0.0)
    per_n = []
    for n in range(1, n_max + 1):
        gn = and_power(g, n)
        per_n.append(_power_estimates(gn, _power_dist(p, n), n, p, epsilon))
    upper = min([h_graph] + [min(e["log_chromatic"], e["chromatic_entropy"]) for e in per_n])
    notes = {
        "lower": "entropy minus graph entropy of the complement",
        "upper": "min of graph entropy and, over n, (1/n)log2 chi and (1/n) coloring entropy of AND powers",
        "typical_log_chromatic": f"typical-set restricted estimate at epsilon={epsilon}, not a bound",
    }
    exact = None
    try:
        perfect = is_perfect(g)
    except CapExceeded:
        perfect = False
    if perfect:
        exact = h_graph
        lower = upper = exact
        notes["exact"] = "perfect graph: equals graph entropy"
    upper = max(upper, lower)
    return EntropyBracket(lower, upper, exact, {"per_n": per_n, "graph_entropy": h_graph}, notes)


def union_rate_min(gs, dist, n_max: int = 1, epsilon: float = 0.1) -> EntropyBracket:
    """Bracket the minimum rate for a family of graphs on one vertex set,
    which equals the largest complementary graph entropy in the family."""
    gs = list(gs)
    if not gs:
        raise ValueError("need at least one graph")
    base = gs[0]
    aligned = [base]
    for g in gs[1:]:
        if set(g.vertices) != set(base.vertices) or g.n != base.n:
            raise ValueError("graphs must share a vertex set")
        aligned.append(g.reorder(base.vertices))
    p = _dist(base, dist)
    brackets = [complementary_entropy_bracket(g, p, n_max, epsilon) for g in aligned]
    lower = max(b.lower for b in brackets)
    upper = max(b.upper for b in brackets)
    per_n = []
    for n in range(1, n_max + 1):
        un = union(*[and_power(g, n) for g in aligned])
        pn = _power_dist(p, n)
        keep = pn > 0
        sub = un.induced(np.nonzero(keep)[0].tolist()) if not keep.all() else un
        h, col = chromatic_entropy(sub, pn[keep], allow_heuristic=True)
        per_n.append({"n": n, "chromatic_entropy": h / n, "chromatic_entropy_exact": col.exact})
        upper = min(upper, h / n)
    exact = None
    if all(b.exact is not None for b in brackets):
        exact = max(b.exact for b in brackets)
        lower = upper = exact
    upper = max(upper, lower)
    return EntropyBracket(
        lower,
        upper,
        exact,
        {"members": [b.to_dict() for b in brackets], "union_per_n": per_n},
        {
            "lower": "max over members of their lower bounds",
            "upper": "min of max member upper bound and (1/n) coloring entropy of the union of AND powers",
        },
    )


__all__ = [
    "AuxiliaryChannel",
    "Component",
    "EntropyBracket",
    "chromatic_entropy",
    "complementary_entropy_bracket",
    "components_of",
    "graph_entropy",
    "koerner_union",
    "union_rate_min",
]
