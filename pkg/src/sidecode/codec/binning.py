"""Monte Carlo simulation of epsilon-error schemes.

``scheme="binning"`` (compatible functions): both decoders need
Z = h(X, Y) for a compatibility witness h.  The encoder sends the bin of
z^n under a uniformly random binning at ``rate`` bits per symbol; decoder 1
looks for the unique z'^n in that bin jointly typical with x^n, decoder 2
with y^n.  A block fails when the true pair is atypical for either decoder
or another jointly typical candidate shares its bin.

For long blocks the bin assignment is averaged over the random-binning
ensemble: with N typical candidates besides the truth and M bins, the
chance that none of them lands in the true bin is ``(1 - 1/M)^N``, where N
is the exact conditional typical count obtained by a dynamic program over
joint types.  Candidates typical for both decoders are counted once per
decoder, which can only overstate the error.  When ``n log2 |Z|`` is small
an explicit random binning of every z^n is drawn and decoded by search.

``scheme="covering"`` is the covering-and-packing scheme on a channel to
independent sets, for binary alphabets and n <= 12 only; its numbers are
illustrative at such short blocks.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import kernels
from ..confusion import FunctionPair, is_compatible
from ..pmf import JointPmf, is_typical_counts, typical_bounds

DEFAULT_EPSILON = 0.25
EXPLICIT_BITS = 20
COVERING_MAX_N = 12
COVERING_EPSILON = 1.0


@dataclass
class SimOutcome:
    trials: int
    errors: int
    empirical_error: float
    rate_used: float
    seed: int
    n: int
    scheme: str
    epsilon: float
    path: str
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _trial_rngs(seed: int, trials: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def _sample_cells(pmf: JointPmf, n: int, rng: np.random.Generator) -> np.ndarray:
    cells = pmf.support
    probs = np.array([pmf.probs[c] for c in cells])
    return rng.choice(len(cells), size=n, p=probs)


def _side_z_table(pmf: JointPmf, h: dict, axis: int, nz: int) -> np.ndarray:
    """Joint pmf of (side symbol, z)."""
    size = pmf.x_size if axis == 0 else pmf.y_size
    out = np.zeros((size, nz))
    for c, z in h.items():
        out[c[axis], z] += pmf.probs[c]
    return out


class _Decoder:
    """Joint typicality of (side^n, z^n) for one decoder."""

    def __init__(self, joint: np.ndarray, n: int, epsilon: float):
        self.joint = joint
        self.n = n
        self.epsilon = epsilon
        self.lo, self.hi = (b.reshape(joint.shape) for b in typical_bounds(joint.ravel(), n, epsilon))

    def typical(self, side: np.ndarray, z: np.ndarray) -> bool:
        na, nb = self.joint.shape
        counts = np.bincount(side * nb + z, minlength=na * nb)
        return is_typical_counts(counts, self.joint.ravel(), self.epsilon)

    def log2_candidates(self, side: np.ndarray) -> float:
        """log2 of the number of z^n jointly typical with this side^n."""
        side_counts = np.bincount(side, minlength=self.joint.shape[0]).astype(np.int64)
        return float(kernels.typical_log2_count(side_counts, self.lo.astype(np.int64), self.hi.astype(np.int64)))


def _no_collision_log(others_log2: float, log2_bins: float) -> float:
    """ln P(no other candidate in the true bin) for 2^others_log2 candidates."""
    if not np.isfinite(others_log2):
        return 0.0
    if log2_bins <= 0:
        return -math.inf
    count = 2.0**others_log2 - 1.0 if others_log2 < 1000 else math.inf
    if count <= 0:
        return 0.0
    if log2_bins > 60:
        per = -(2.0**-log2_bins)
    else:
        per = math.log1p(-(2.0**-log2_bins))
    return count * per if np.isfinite(count) else -math.inf


def binning_simulate(
    pmf: JointPmf,
    fp: FunctionPair,
    rate: float,
    n: int,
    trials: int,
    seed: int = 0,
    *,
    epsilon: float | None = None,
    scheme: str = "binning",
    explicit: bool | None = None,
    allow_uncoded: bool = True,
) -> SimOutcome:
    """Simulate ``trials`` blocks of length ``n`` at ``rate`` bits per symbol.

    The binned sequence is f^n when f and g agree on the support, otherwise
    h^n for the canonical compatibility witness h.  With ``allow_uncoded``
    a rate of at least log2 |Z| sends z^n uncoded (no errors); turning it off
    forces random binning at every rate."""
    if rate <= 0 or n < 1 or trials < 1:
        raise ValueError("need rate > 0, n >= 1 and trials >= 1")
    if scheme == "covering":
        return covering_simulate(pmf, fp, rate, n, trials, seed, epsilon=COVERING_EPSILON if epsilon is None else epsilon)
    epsilon = DEFAULT_EPSILON if epsilon is None else epsilon
    if scheme != "binning":
        raise ValueError(f"unknown scheme {scheme!r}")
    wit = is_compatible(pmf, fp)
    if wit is None:
        raise ValueError("binning scheme needs compatible functions; use scheme='covering'")
    fv, gv = fp.f_values(pmf), fp.g_values(pmf)
    if fv == gv:
        ids: dict = {}
        h = {c: ids.setdefault(v, len(ids)) for c, v in fv.items()}
    else:
        h = wit.values(pmf)
    nz = max(h.values()) + 1
    cells = pmf.support
    hz = np.array([h[c] for c in cells], np.int64)
    xs = np.array([c[0] for c in cells], np.int64)
    ys = np.array([c[1] for c in cells], np.int64)
    base = dict(trials=trials, seed=seed, n=n, scheme=scheme, epsilon=epsilon)
    if nz == 1 or (allow_uncoded and rate >= math.log2(nz)):
        return SimOutcome(errors=0, empirical_error=0.0, rate_used=math.log2(nz) if nz > 1 else 0.0, path="uncoded", **base)

    log2_bins = math.floor(n * rate) if n * rate < 60 else n * rate
    dec = [_Decoder(_side_z_table(pmf, h, 0, nz), n, epsilon), _Decoder(_side_z_table(pmf, h, 1, nz), n, epsilon)]
    if explicit is None:
        explicit = n * math.log2(nz) <= EXPLICIT_BITS
    errors = 0
    for rng in _trial_rngs(seed, trials):
        idx = _sample_cells(pmf, n, rng)
        z, sides = hz[idx], (xs[idx], ys[idx])
        if not all(d.typical(s, z) for d, s in zip(dec, sides)):
            errors += 1
            continue
        if explicit:
            errors += _explicit_trial(dec, sides, z, nz, n, int(log2_bins), rng)
            continue
        log_ok = sum(_no_collision_log(d.log2_candidates(s), log2_bins) for d, s in zip(dec, sides))
        if rng.random() >= math.exp(log_ok):
            errors += 1
    return SimOutcome(
        errors=errors,
        empirical_error=errors / trials,
        rate_used=log2_bins / n,
        path="explicit" if explicit else "ensemble",
        notes={"z_alphabet": nz},
        **base,
    )


def _explicit_trial(dec, sides, z, nz, n, log2_bins, rng) -> int:
    """Draw a binning of all z^n and decode both receivers by search."""
    bins = rng.integers(0, 2**log2_bins, size=nz**n) if log2_bins < 63 else None
    weights = nz ** np.arange(n - 1, -1, -1)
    true_index = int(z @ weights)
    true_bin = bins[true_index]
    members = np.nonzero(bins == true_bin)[0]
    for d, s in zip(dec, sides):
        found = [m for m in members.tolist() if d.typical(s, (m // weights) % nz)]
        if found != [true_index]:
            return 1
    return 0


# ------------------------------------------------- covering and packing


def _cell_decoder_tables(pmf, fp, sets):
    """For each set and side symbol, the demanded value shared by the set's
    cells in that row (decoder 1) or column (decoder 2); None if none."""
    fv, gv = fp.f_values(pmf), fp.g_values(pmf)
    row = [{} for _ in sets]
    col = [{} for _ in sets]
    for j, s in enumerate(sets):
        for c in s:
            row[j].setdefault(c[0], fv[c])
            col[j].setdefault(c[1], gv[c])
    return row, col


def covering_simulate(pmf: JointPmf, fp: FunctionPair, rate: float, n: int, trials: int, seed: int = 0, *, epsilon: float = COVERING_EPSILON, slack: float = 0.1) -> SimOutcome:
    """Covering (find a u^n jointly typical with the source block) followed
    by packing (each decoder finds the unique typical u^n in the received bin
    given its side information).  U ranges over maximal independent sets of
    the confusion graph with the channel minimizing the achievable rate."""
    from ..rates import inner_bound_RI

    if pmf.x_size > 2 or pmf.y_size > 2:
        raise ValueError("covering simulation supports binary alphabets only")
    if n > COVERING_MAX_N:
        raise ValueError(f"covering simulation supports n <= {COVERING_MAX_N}")
    ri = inner_bound_RI(pmf, fp, iterations=500, restarts=1)
    cells = pmf.support
    P = np.asarray(ri.channel.cond)
    sets = ri.channel.sets
    pc = np.array([pmf.probs[c] for c in cells])
    joint = pc[:, None] * P  # (cell, u)
    pu = joint.sum(axis=0)
    mi = float(np.sum(np.where(joint > 0, joint * np.log2(np.where(joint > 0, joint, 1) / (pc[:, None] * pu[None, :] + 1e-300)), 0)))
    log2_codebook = min(int(math.ceil(n * (mi + slack))), 16)
    log2_bins = max(int(math.floor(n * rate)), 0)
    row_val, col_val = _cell_decoder_tables(pmf, fp, sets)
    fv, gv = fp.f_values(pmf), fp.g_values(pmf)
    xs = np.array([c[0] for c in cells])
    ys = np.array([c[1] for c in cells])
    nu = len(sets)
    jx = np.zeros((pmf.x_size, nu))
    jy = np.zeros((pmf.y_size, nu))
    for i, c in enumerate(cells):
        jx[c[0]] += joint[i]
        jy[c[1]] += joint[i]
    errors = 0
    for rng in _trial_rngs(seed, trials):
        book = rng.choice(nu, size=(2**log2_codebook, n), p=pu / pu.sum())
        bins = rng.integers(0, 2**log2_bins, size=len(book)) if log2_bins > 0 else np.zeros(len(book), np.int64)
        idx = _sample_cells(pmf, n, rng)
        full = joint.ravel()
        enc = [l for l in range(len(book)) if is_typical_counts(np.bincount(idx * nu + book[l], minlength=full.size), full, epsilon)]
        if not enc:
            errors += 1
            continue
        l = enc[0]
        same = np.nonzero(bins == bins[l])[0]
        ok = True
        for side, table, vals, jt in ((xs[idx], row_val, fv, jx), (ys[idx], col_val, gv, jy)):
            cands = [m for m in same.tolist() if is_typical_counts(np.bincount(side * nu + book[m], minlength=jt.size), jt.ravel(), epsilon)]
            if cands != [l]:
                ok = False
                break
            demand = [table[u].get(s) for u, s in zip(book[l], side)]
            truth = [vals[cells[i]] for i in idx]
            if demand != truth:
                ok = False
                break
        errors += 0 if ok else 1
    return SimOutcome(
        trials=trials,
        errors=errors,
        empirical_error=errors / trials,
        rate_used=log2_bins / n,
        seed=seed,
        n=n,
        scheme="covering",
        epsilon=epsilon,
        path="explicit",
        notes={"illustrative": True, "codebook_log2_size": log2_codebook, "inner_RI": ri.value},
    )


__all__ = ["SimOutcome", "binning_simulate", "covering_simulate"]
