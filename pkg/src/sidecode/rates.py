"""Broadcast rates for computing functions with complementary side information.

Closed forms (cut-set bound, complementary delivery, index coding), the
epsilon-error rate where it is known, the single-letter achievable rate
``R_I = min max(I(X;U|Y), I(Y;U|X))`` over channels to independent sets of
the confusion graph, and the zero-error bracket, assembled into a
:class:`RateReport`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import _kernels_np, kernels
from ._config import get_caps
from .coloring import min_entropy_coloring
from .confusion import (
    FunctionPair,
    IndexCodingInstance,
    block_probabilities,
    column_receiver_graph,
    complementary_delivery_graph,
    is_compatible,
    n_instance_graph,
    one_receiver_graph,
    rooks_graph,
    support_blocks,
)
from .gentropy import AuxiliaryChannel, graph_entropy
from .graphs import maximal_independent_set_indices
from .pmf import JointPmf, PmfError, conditional_entropy, function_conditional_entropy

AGREE_TOL = 1e-6


def cutset_bound(pmf: JointPmf, fp: FunctionPair) -> float:
    """max(H(Z1|X), H(Z2|Y)): each decoder alone needs this rate."""
    return max(function_conditional_entropy(pmf, fp.f, "x"), function_conditional_entropy(pmf, fp.g, "y"))


def complementary_delivery_rate(pmf: JointPmf) -> float:
    """Zero-error rate when decoder 1 wants Y and decoder 2 wants X."""
    return max(conditional_entropy(pmf, "x"), conditional_entropy(pmf, "y"))


def index_coding_rate(inst: IndexCodingInstance) -> float:
    """Zero-error rate when each receiver wants every source it lacks."""
    return max(inst.sources.conditional_entropy(inst.wants(i), inst.has(i)) for i in range(len(inst.receivers)))


def eps_error_exact(pmf: JointPmf, fp: FunctionPair) -> float | None:
    """The epsilon-error rate where it is known: for compatible functions
    and for binary X and Y it equals the cut-set bound.  None otherwise."""
    if is_compatible(pmf, fp) is not None or (pmf.x_size <= 2 and pmf.y_size <= 2):
        return cutset_bound(pmf, fp)
    return None


# --------------------------------------------------------------- R_I


@dataclass
class _RiProblem:
    cells: list[tuple[int, int]]
    pc: np.ndarray
    xid: np.ndarray
    yid: np.ndarray
    nx: int
    ny: int
    sets: list[tuple[int, ...]]
    mask: np.ndarray

    def objective(self, P: np.ndarray) -> tuple[float, float]:
        a, b = kernels.ri_objective(self.pc, self.xid, self.yid, self.nx, self.ny, np.ascontiguousarray(P))
        return float(a), float(b)

    def value(self, P: np.ndarray) -> float:
        return max(self.objective(P))

    def deterministic(self, choice) -> np.ndarray:
        P = np.zeros(self.mask.shape)
        P[np.arange(len(self.cells)), np.asarray(choice)] = 1.0
        return P


def _ri_problem(pmf: JointPmf, fp: FunctionPair) -> _RiProblem:
    g = rooks_graph(pmf, fp)
    sets = maximal_independent_set_indices(g)
    mask = np.zeros((g.n, len(sets)), dtype=np.bool_)
    for j, s in enumerate(sets):
        mask[list(s), j] = True
    cells = pmf.support
    return _RiProblem(
        cells,
        np.array([pmf.probs[c] for c in cells]),
        np.array([c[0] for c in cells], np.int64),
        np.array([c[1] for c in cells], np.int64),
        pmf.x_size,
        pmf.y_size,
        sets,
        mask,
    )


def _line_search(prob: _RiProblem, A: np.ndarray, B: np.ndarray) -> tuple[float, np.ndarray]:
    res = minimize_scalar(lambda t: prob.value(t * A + (1 - t) * B), bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-10})
    cands = [(prob.value(A), A), (prob.value(B), B)]
    P = res.x * A + (1 - res.x) * B
    cands.append((prob.value(P), P))
    return min(cands, key=lambda c: c[0])


def _polish(prob: _RiProblem, P0: np.ndarray) -> tuple[float, np.ndarray]:
    """Epigraph form ``min t`` with both informations ``<= t``, solved by SLSQP
    over the free (membership) entries of the channel."""
    free = np.argwhere(prob.mask)
    nfree = len(free)
    rows = free[:, 0]

    def unpack(v):
        P = np.zeros(prob.mask.shape)
        P[free[:, 0], free[:, 1]] = np.clip(v[:nfree], 0.0, 1.0)
        return P

    def parts(v):
        P = unpack(v)
        a, ga = _kernels_np._cond_mi(prob.pc, prob.yid, prob.ny, P)
        b, gb = _kernels_np._cond_mi(prob.pc, prob.xid, prob.nx, P)
        return a, ga[free[:, 0], free[:, 1]], b, gb[free[:, 0], free[:, 1]]

    def con_a(v):
        return v[-1] - parts(v)[0]

    def con_b(v):
        return v[-1] - parts(v)[2]

    def jac(which):
        def f(v):
            _, ga, _, gb = parts(v)
            out = np.zeros(nfree + 1)
            out[:nfree] = -(ga if which == "a" else gb)
            out[-1] = 1.0
            return out

        return f

    ncells = prob.mask.shape[0]
    eq_mat = np.zeros((ncells, nfree + 1))
    eq_mat[rows, np.arange(nfree)] = 1.0
    v0 = np.append(P0[free[:, 0], free[:, 1]], prob.value(P0))
    res = minimize(
        lambda v: v[-1],
        v0,
        jac=lambda v: np.append(np.zeros(nfree), 1.0),
        method="SLSQP",
        bounds=[(0.0, 1.0)] * nfree + [(0.0, None)],
        constraints=[
            {"type": "ineq", "fun": con_a, "jac": jac("a")},
            {"type": "ineq", "fun": con_b, "jac": jac("b")},
            {"type": "eq", "fun": lambda v: eq_mat @ v - 1.0, "jac": lambda v: eq_mat},
        ],
        options={"maxiter": 500, "ftol": 1e-13},
    )
    P = unpack(res.x)
    sums = P.sum(axis=1, keepdims=True)
    P = np.where(sums > 0, P / np.where(sums > 0, sums, 1.0), prob.mask / prob.mask.sum(axis=1, keepdims=True))
    return prob.value(P), P


def _witness_channel(prob: _RiProblem, pmf: JointPmf, fp: FunctionPair) -> np.ndarray | None:
    """Deterministic channel sending each level set of a compatibility
    witness to the first maximal independent set containing it."""
    wit = is_compatible(pmf, fp)
    if wit is None:
        return None
    h = wit.values(pmf)
    pos = {c: i for i, c in enumerate(prob.cells)}
    choice = np.zeros(len(prob.cells), np.int64)
    for level in set(h.values()):
        idx = [pos[c] for c in prob.cells if h[c] == level]
        j = next(j for j, s in enumerate(prob.sets) if set(idx) <= set(s))
        choice[idx] = j
    return prob.deterministic(choice)


@dataclass
class RiResult:
    value: float
    channel: AuxiliaryChannel
    method: str
    candidates: dict = field(default_factory=dict)


def inner_bound_RI(
    pmf: JointPmf,
    fp: FunctionPair,
    *,
    iterations: int = 5000,
    restarts: int = 5,
    step: float = 0.5,
    seed: int = 0,
    top_k: int = 8,
    polish: bool = True,
) -> RiResult:
    """Achievable rate ``min max(I(X;U|Y), I(Y;U|X))`` over channels from
    support cells to maximal independent sets of the confusion graph.

    Candidates: exhaustive deterministic channels (when their count is within
    the ``deterministic_channels`` cap) with pairwise time-sharing between
    the best ones, the witness channel for compatible functions, and
    projected subgradient descent from ``restarts`` seeded starts.  The best
    candidate is then polished by SLSQP on the epigraph form.
    """
    prob = _ri_problem(pmf, fp)
    candidates: dict[str, tuple[float, np.ndarray]] = {}
    if len(prob.sets) == 1:
        P = prob.mask.astype(float)
        return RiResult(0.0, _aux(prob, P), "single independent set", {"single": 0.0})

    sizes = prob.mask.sum(axis=1)
    count = math.prod(int(s) for s in sizes)
    if count <= get_caps().deterministic_channels:
        opt_ptr = np.zeros(len(sizes) + 1, np.int64)
        np.cumsum(sizes, out=opt_ptr[1:])
        opt_sets = np.concatenate([np.nonzero(r)[0] for r in prob.mask]).astype(np.int64)
        vals, choices = kernels.deterministic_search(prob.pc, prob.xid, prob.yid, prob.nx, prob.ny, opt_ptr, opt_sets, len(prob.sets), top_k)
        good = [(float(v), prob.deterministic(c)) for v, c in zip(vals, choices) if np.isfinite(v)]
        candidates["deterministic"] = good[0]
        best_pair = good[0]
        for (_, A), (_, B) in itertools.combinations(good, 2):
            cand = _line_search(prob, A, B)
            if cand[0] < best_pair[0]:
                best_pair = cand
        candidates["time_sharing"] = best_pair

    W = _witness_channel(prob, pmf, fp)
    if W is not None:
        candidates["witness"] = (prob.value(W), W)

    rng = np.random.default_rng(seed)
    starts = [prob.mask / prob.mask.sum(axis=1, keepdims=True)]
    for _ in range(max(restarts - 1, 0)):
        raw = rng.random(prob.mask.shape) * prob.mask
        starts.append(raw / raw.sum(axis=1, keepdims=True))
    for k, P0 in enumerate(starts):
        best, best_val, _ = kernels.ri_subgradient(
            prob.pc, prob.xid, prob.yid, prob.nx, prob.ny, prob.mask, np.ascontiguousarray(P0), iterations, step
        )
        key = f"subgradient_{k}"
        candidates[key] = (prob.value(best), best)

    name, (value, P) = min(candidates.items(), key=lambda kv: kv[1][0])
    method = name
    if polish and value > 0:
        pv, PP = _polish(prob, P)
        candidates["polished"] = (pv, PP)
        if pv < value:
            value, P, method = pv, PP, f"{name}+slsqp"
    return RiResult(float(value), _aux(prob, P), method, {k: v[0] for k, v in candidates.items()})


def _aux(prob: _RiProblem, P: np.ndarray) -> AuxiliaryChannel:
    labels = tuple(tuple(prob.cells[i] for i in s) for s in prob.sets)
    return AuxiliaryChannel(labels, P, prob.pc @ P)


# ---------------------------------------------------------- zero error


def _cells_dist(pmf: JointPmf) -> np.ndarray:
    return np.array([pmf.probs[c] for c in pmf.support])


def zero_error_bounds(pmf: JointPmf, fp: FunctionPair) -> tuple[float, float]:
    """(cut-set bound, graph entropy of the confusion graph)."""
    upper, _ = graph_entropy(rooks_graph(pmf, fp), _cells_dist(pmf))
    return cutset_bound(pmf, fp), upper


def multi_letter_upper(pmf: JointPmf, fp: FunctionPair, n_max: int = 2) -> list[dict]:
    """``(1/n) H(c)`` for the best coloring found of each block graph.  The
    block-graph chromatic entropy is subadditive in n, so every entry is an
    upper bound on the zero-error rate."""
    out = []
    for n in range(1, n_max + 1):
        g = n_instance_graph(pmf, fp, n)
        probs = block_probabilities(pmf, support_blocks(pmf, n))
        col, h = min_entropy_coloring(g, probs, allow_heuristic=True)
        out.append({"n": n, "rate": h / n, "exact": col.exact, "vertices": g.n})
    return out


def converse_RO(pmf: JointPmf, fp: FunctionPair, channel) -> float:
    """max(I(X;V|Y), I(Y;V|X)) for a caller-supplied channel ``p(v|x,y)``
    of shape ``(x_size, y_size, |V|)`` or ``(support cells, |V|)``.

    This is a converse only when the channel is induced by an actual code;
    the cut-set bound is the unconditional lower bound."""
    fp.check(pmf)
    ch = np.asarray(channel, dtype=float)
    cells = pmf.support
    if ch.ndim == 3:
        if ch.shape[:2] != pmf.probs.shape:
            raise PmfError(f"channel shape {ch.shape} does not match pmf {pmf.probs.shape}")
        P = np.array([ch[x, y] for x, y in cells])
    elif ch.ndim == 2 and ch.shape[0] == len(cells):
        P = ch
    else:
        raise PmfError(f"channel shape {ch.shape} matches neither the table nor the support")
    if np.any(P < -1e-12) or np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-9):
        raise PmfError("channel rows must be probability vectors on every support cell")
    P = np.clip(P, 0.0, None)
    pc = _cells_dist(pmf)
    xid = np.array([c[0] for c in cells], np.int64)
    yid = np.array([c[1] for c in cells], np.int64)
    a, b = kernels.ri_objective(pc, xid, yid, pmf.x_size, pmf.y_size, np.ascontiguousarray(P))
    return float(max(a, b))


# -------------------------------------------------------------- report


@dataclass
class RateReport:
    """Rates and bounds in bits per source symbol, with the method behind each."""

    cutset: float
    zero_error_lower: float
    zero_error_upper: float
    zero_error_exact: float | None = None
    eps_error_exact: float | None = None
    inner_RI: float | None = None
    compatible: bool = False
    witness: list | None = None
    zero_error_upper_multi_letter: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def analyze(pmf: JointPmf, fp: FunctionPair, *, with_ri: bool = True, n_letters: int = 2, seed: int = 0) -> RateReport:
    fp.check(pmf)
    g = rooks_graph(pmf, fp)
    cut = cutset_bound(pmf, fp)
    lower, upper = zero_error_bounds(pmf, fp)
    prov = {
        "cutset": "max(H(Z1|X), H(Z2|Y))",
        "zero_error_lower": "cut-set bound",
        "zero_error_upper": "graph entropy of the confusion graph (alternating minimization)",
    }
    exact = None
    if g == complementary_delivery_graph(pmf):
        exact = complementary_delivery_rate(pmf)
        prov["zero_error_exact"] = "confusion graph is the complementary-delivery graph: max(H(Y|X), H(X|Y))"
    elif g == one_receiver_graph(pmf):
        exact = conditional_entropy(pmf, "x")
        prov["zero_error_exact"] = "confusion graph has row edges only: H(Y|X)"
    elif g == column_receiver_graph(pmf):
        exact = conditional_entropy(pmf, "y")
        prov["zero_error_exact"] = "confusion graph has column edges only: H(X|Y)"
    elif upper - lower <= AGREE_TOL:
        exact = lower
        prov["zero_error_exact"] = "lower and upper bounds agree"
    if exact is not None:
        upper = max(upper, exact)
    wit = is_compatible(pmf, fp)
    report = RateReport(
        cutset=cut,
        zero_error_lower=lower,
        zero_error_upper=upper,
        zero_error_exact=exact,
        eps_error_exact=eps_error_exact(pmf, fp),
        compatible=wit is not None,
        witness=[list(r) for r in wit.h] if wit is not None else None,
        provenance=prov,
    )
    if report.eps_error_exact is not None:
        prov["eps_error_exact"] = "cut-set bound (compatible functions)" if wit is not None else "cut-set bound (binary X and Y)"
    if with_ri:
        ri = inner_bound_RI(pmf, fp, seed=seed)
        report.inner_RI = ri.value
        prov["inner_RI"] = f"min over channels to maximal independent sets; best candidate: {ri.method}"
    if n_letters > 0:
        report.zero_error_upper_multi_letter = multi_letter_upper(pmf, fp, n_letters)
        prov["zero_error_upper_multi_letter"] = "(1/n) entropy of the best coloring found of the n-block confusion graph"
    return report
