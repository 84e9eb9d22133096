"""Finite joint distributions, entropies, block extensions and typical sets.

All entropies are in bits.  Probability tables are validated on
construction: negative entries are rejected, and a total within ``1e-9`` of
one is renormalized while anything further off is rejected.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterator, Sequence

import numpy as np
from scipy.special import gammaln

from ._config import check_cap

SUM_TOL = 1e-9


class PmfError(ValueError):
    """Invalid probability table."""


def _validated(probs, ndim: int | None = None) -> np.ndarray:
    arr = np.array(probs, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise PmfError(f"expected a {ndim}-D probability table, got shape {arr.shape}")
    if arr.size == 0:
        raise PmfError("empty probability table")
    if not np.all(np.isfinite(arr)):
        raise PmfError("probability table contains non-finite entries")
    if np.any(arr < 0):
        raise PmfError("probability table has negative entries")
    total = float(arr.sum())
    if abs(total - 1.0) > SUM_TOL:
        raise PmfError(f"probabilities sum to {total:.12g} (expected 1 within {SUM_TOL:g})")
    arr = arr / total
    arr.setflags(write=False)
    return arr


def entropy_of(p) -> float:
    """Shannon entropy (bits) of a probability vector; zeros contribute 0."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def binary_entropy(p: float) -> float:
    return entropy_of([p, 1.0 - p])


def _axis(given) -> int:
    if given in (0, "x", "X"):
        return 0
    if given in (1, "y", "Y"):
        return 1
    raise ValueError(f"given must be 'x' or 'y', got {given!r}")


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Joint distribution of (X, Y) as an ``x_size`` by ``y_size`` table."""

    probs: np.ndarray
    x_labels: tuple = ()
    y_labels: tuple = ()

    def __post_init__(self):
        arr = _validated(self.probs, ndim=2)
        object.__setattr__(self, "probs", arr)
        xs, ys = arr.shape
        xl = tuple(self.x_labels) or tuple(range(xs))
        yl = tuple(self.y_labels) or tuple(range(ys))
        if len(xl) != xs or len(yl) != ys:
            raise PmfError("label count does not match table shape")
        object.__setattr__(self, "x_labels", xl)
        object.__setattr__(self, "y_labels", yl)

    @property
    def x_size(self) -> int:
        return self.probs.shape[0]

    @property
    def y_size(self) -> int:
        return self.probs.shape[1]

    @property
    def support(self) -> list[tuple[int, int]]:
        """Support cells ``(x, y)`` in row-major order."""
        xs, ys = np.nonzero(self.probs > 0)
        return list(zip(xs.tolist(), ys.tolist()))

    @property
    def support_mask(self) -> np.ndarray:
        return self.probs > 0

    def prob(self, x: int, y: int) -> float:
        return float(self.probs[x, y])

    def marginal(self, axis) -> np.ndarray:
        """Marginal of X (``'x'``) or Y (``'y'``)."""
        return self.probs.sum(axis=1 - _axis(axis))

    def __eq__(self, other):
        if not isinstance(other, JointPmf):
            return NotImplemented
        return (
            self.probs.shape == other.probs.shape
            and bool(np.array_equal(self.probs, other.probs))
            and self.x_labels == other.x_labels
            and self.y_labels == other.y_labels
        )

    __hash__ = None  # type: ignore[assignment]


def dsbs(p: float) -> JointPmf:
    """Doubly symmetric binary source: X uniform, Y = X flipped w.p. ``p``."""
    return JointPmf([[(1 - p) / 2, p / 2], [p / 2, (1 - p) / 2]])


def entropy(pmf) -> float:
    """H of the whole table (JointPmf, MultiPmf or array)."""
    probs = pmf.probs if hasattr(pmf, "probs") else pmf
    return entropy_of(probs)


def conditional_entropy(pmf: JointPmf, given) -> float:
    """H(Y|X) for ``given='x'``, H(X|Y) for ``given='y'``."""
    return max(entropy_of(pmf.probs) - entropy_of(pmf.marginal(given)), 0.0)


def table_values(pmf: JointPmf, table) -> dict[tuple[int, int], Hashable]:
    """Values of a function table on the support; raises if any is missing."""
    values = {}
    for x, y in pmf.support:
        try:
            v = table[x][y]
        except (IndexError, KeyError, TypeError):
            v = None
        if v is None:
            raise PmfError(f"function table undefined on support cell ({x}, {y})")
        if isinstance(v, list):
            v = tuple(v)
        values[(x, y)] = v
    return values


def conditional_entropy_of(pmf: JointPmf, target: Callable, given: Callable) -> float:
    """H(A | B) where A = target(x, y), B = given(x, y) on the support."""
    joint: dict = {}
    cond: dict = {}
    for x, y in pmf.support:
        p = pmf.probs[x, y]
        a, b = target(x, y), given(x, y)
        joint[(a, b)] = joint.get((a, b), 0.0) + p
        cond[b] = cond.get(b, 0.0) + p
    return max(entropy_of(list(joint.values())) - entropy_of(list(cond.values())), 0.0)


def function_conditional_entropy(pmf: JointPmf, table, given) -> float:
    """H(Z | X) or H(Z | Y) for Z = table[x][y]."""
    values = table_values(pmf, table)
    ax = _axis(given)
    return conditional_entropy_of(pmf, lambda x, y: values[(x, y)], lambda x, y: (x, y)[ax])


def iid_extension(pmf: JointPmf, n: int) -> JointPmf:
    """Block pmf of ``n`` i.i.d. copies, rows indexed by x^n and columns by
    y^n in row-major (first symbol most significant) order."""
    if n < 1:
        raise ValueError("block length must be >= 1")
    check_cap("block_cells", (pmf.x_size * pmf.y_size) ** n, "block pmf entries")
    out = np.ones((1, 1))
    for _ in range(n):
        # kron keeps the first coordinate most significant on both axes
        out = np.kron(out, pmf.probs)
    xl = tuple(itertools.product(pmf.x_labels, repeat=n))
    yl = tuple(itertools.product(pmf.y_labels, repeat=n))
    return JointPmf(out, xl, yl)


@dataclass(frozen=True, eq=False)
class MultiPmf:
    """Joint distribution of K discrete sources X_0..X_{K-1}."""

    probs: np.ndarray

    def __post_init__(self):
        arr = _validated(self.probs)
        object.__setattr__(self, "probs", arr)

    @classmethod
    def from_flat(cls, shape: Sequence[int], flat) -> "MultiPmf":
        flat = np.asarray(flat, dtype=float)
        if flat.size != int(np.prod(shape)):
            raise PmfError(f"flattened pmf has {flat.size} entries, shape {list(shape)} needs {int(np.prod(shape))}")
        return cls(flat.reshape(tuple(shape)))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.probs.shape

    @property
    def k(self) -> int:
        return self.probs.ndim

    @property
    def support(self) -> list[tuple[int, ...]]:
        return [tuple(int(i) for i in idx) for idx in zip(*np.nonzero(self.probs > 0))]

    def marginal(self, axes: Sequence[int]) -> np.ndarray:
        axes = tuple(sorted(set(axes)))
        drop = tuple(a for a in range(self.k) if a not in axes)
        return self.probs.sum(axis=drop) if drop else self.probs

    def conditional_entropy(self, target: Sequence[int], given: Sequence[int]) -> float:
        """H(X_target | X_given)."""
        both = set(target) | set(given)
        h_joint = entropy_of(self.marginal(tuple(both))) if both else 0.0
        h_given = entropy_of(self.marginal(tuple(given))) if given else 0.0
        return max(h_joint - h_given, 0.0)


# ------------------------------------------------------------ typicality


def typical_bounds(p, n: int, epsilon: float) -> tuple[np.ndarray, np.ndarray]:
    """Allowed symbol counts under robust typicality:
    ``|count(a)/n - p(a)| <= epsilon * p(a)``."""
    p = np.asarray(p, dtype=float)
    lo = np.ceil(n * p * (1 - epsilon) - 1e-9).astype(np.int64)
    hi = np.floor(n * p * (1 + epsilon) + 1e-9).astype(np.int64)
    lo = np.maximum(lo, 0)
    return lo, np.minimum(hi, n)


def is_typical_counts(counts, p, epsilon: float) -> bool:
    counts = np.asarray(counts)
    n = int(counts.sum())
    lo, hi = typical_bounds(p, n, epsilon)
    return bool(np.all(counts >= lo) and np.all(counts <= hi))


def _compositions(n: int, lo: np.ndarray, hi: np.ndarray) -> Iterator[tuple[int, ...]]:
    if len(lo) == 1:
        if lo[0] <= n <= hi[0]:
            yield (n,)
        return
    rest_lo = int(lo[1:].sum())
    rest_hi = int(hi[1:].sum())
    for k in range(max(int(lo[0]), n - rest_hi), min(int(hi[0]), n - rest_lo) + 1):
        for tail in _compositions(n - k, lo[1:], hi[1:]):
            yield (k,) + tail


@dataclass(frozen=True)
class TypicalSet:
    """Robustly typical sequences of length ``n`` over ``range(len(p))``."""

    p: tuple[float, ...]
    n: int
    epsilon: float
    _types: tuple = field(repr=False, default=())

    def __post_init__(self):
        lo, hi = typical_bounds(self.p, self.n, self.epsilon)
        object.__setattr__(self, "_types", tuple(_compositions(self.n, lo, hi)))

    def __contains__(self, seq) -> bool:
        seq = np.asarray(seq, dtype=np.int64)
        if seq.shape != (self.n,) or seq.min(initial=0) < 0 or seq.max(initial=0) >= len(self.p):
            return False
        return is_typical_counts(np.bincount(seq, minlength=len(self.p)), self.p, self.epsilon)

    @property
    def types(self) -> tuple[tuple[int, ...], ...]:
        """Symbol-count vectors of the member sequences."""
        return self._types

    @property
    def probability(self) -> float:
        p = np.asarray(self.p)
        total = 0.0
        for counts in self._types:
            c = np.asarray(counts)
            if np.any((p == 0) & (c > 0)):
                continue
            nz = c > 0
            logm = gammaln(self.n + 1) - gammaln(c + 1).sum()
            total += math.exp(logm + float(np.sum(c[nz] * np.log(p[nz]))))
        return total

    @property
    def size(self) -> int:
        return sum(
            math.factorial(self.n) // math.prod(math.factorial(k) for k in counts)
            for counts in self._types
        )

    def members(self) -> Iterator[tuple[int, ...]]:
        """Enumerate members in lexicographic order (small ``n`` only)."""
        check_cap("power_vertices", len(self.p) ** self.n, "typical-set enumeration")
        for seq in itertools.product(range(len(self.p)), repeat=self.n):
            if seq in self:
                yield seq


def typical_set(pmf, n: int, epsilon: float) -> TypicalSet:
    """Typical set of a marginal vector, a JointPmf (over flattened cells) or
    a MultiPmf (over flattened cells)."""
    if n < 1 or epsilon <= 0:
        raise ValueError("need n >= 1 and epsilon > 0")
    p = pmf.probs.ravel() if hasattr(pmf, "probs") else np.asarray(pmf, dtype=float).ravel()
    return TypicalSet(tuple(float(v) for v in p), n, float(epsilon))
