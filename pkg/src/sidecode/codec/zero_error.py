"""Zero-error block codes: color the block confusion graph, then prefix-code
the colors.  Blocks sharing a color share a codeword, so every receiver
decodes from the codeword plus its side information alone."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Hashable

import numpy as np

from ..coloring import Coloring, min_entropy_coloring
from ..confusion import (
    FunctionPair,
    IndexCodingInstance,
    block_probabilities,
    index_block_probabilities,
    index_confusion_graph,
    index_support_blocks,
    n_instance_graph,
    support_blocks,
)
from ..pmf import JointPmf
from .huffman import huffman_code, is_prefix_free, kraft_sum


class DecodeError(LookupError):
    """The codeword and side information do not identify a unique demand."""


@dataclass(frozen=True)
class Receiver:
    """Side-information key and demanded value for every block."""

    name: str
    side: tuple
    demand: tuple


@dataclass
class Codebook:
    n: int
    blocks: list
    colors: list[int]
    codewords: list[str]
    receivers: list[Receiver]
    block_probs: np.ndarray
    kind: str = "zero_error"
    exact: bool = True
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._word_to_color = {w: c for c, w in enumerate(self.codewords)}
        self._position = {b: i for i, b in enumerate(self.blocks)}
        self._index = {}
        for r_i, rec in enumerate(self.receivers):
            for b, (s, d) in enumerate(zip(rec.side, rec.demand)):
                self._index.setdefault((r_i, s, self.colors[b]), set()).add(d)

    def encode(self, block) -> str:
        if block and not isinstance(block[0], (tuple, list)):
            block = (tuple(block),)
        block = _key(block)
        try:
            return self.codewords[self.colors[self._position[block]]]
        except KeyError:
            raise DecodeError(f"block {block!r} is not in the support") from None

    def decode(self, receiver: int, word: str, side) -> Hashable:
        """Demand of ``receiver`` given the codeword and its side information."""
        color = self._word_to_color.get(word)
        if color is None:
            raise DecodeError(f"unknown codeword {word!r}")
        found = self._index.get((receiver, _key(side), color))
        if not found:
            raise DecodeError(f"no support block with this codeword and side information {side!r}")
        if len(found) > 1:
            raise DecodeError(f"codeword and side information {side!r} leave {len(found)} candidate demands")
        return next(iter(found))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "exact_coloring": self.exact,
            "codewords": list(self.codewords),
            "colors": [{"block": _jsonable(b), "color": c} for b, c in zip(self.blocks, self.colors)],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _key(v):
    if isinstance(v, list):
        return tuple(_key(u) for u in v)
    if isinstance(v, tuple):
        return tuple(_key(u) for u in v)
    return v


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(u) for u in v]
    if isinstance(v, np.integer):
        return int(v)
    return v


def _as_block(v) -> tuple:
    return _key(v) if isinstance(v, (tuple, list)) else (v,)


def decode1(codebook: Codebook, word: str, x_block) -> tuple:
    """z1^n from the codeword and x^n (a bare symbol is accepted when n = 1)."""
    return codebook.decode(0, word, _as_block(x_block))


def decode2(codebook: Codebook, word: str, y_block) -> tuple:
    """z2^n from the codeword and y^n (a bare symbol is accepted when n = 1)."""
    return codebook.decode(1, word, _as_block(y_block))


# ------------------------------------------------------- receivers


def _pair_receivers(pmf: JointPmf, fp: FunctionPair, blocks) -> list[Receiver]:
    fv, gv = fp.f_values(pmf), fp.g_values(pmf)
    xs = tuple(tuple(c[0] for c in b) for b in blocks)
    ys = tuple(tuple(c[1] for c in b) for b in blocks)
    z1 = tuple(tuple(fv[c] for c in b) for b in blocks)
    z2 = tuple(tuple(gv[c] for c in b) for b in blocks)
    return [Receiver("decoder1", xs, z1), Receiver("decoder2", ys, z2)]


def _index_receivers(inst: IndexCodingInstance, blocks) -> list[Receiver]:
    out = []
    for i in range(len(inst.receivers)):
        has, wants = inst.has(i), inst.wants(i)
        side = tuple(tuple(tuple(s[j] for j in has) for s in b) for b in blocks)
        demand = tuple(tuple(tuple(s[j] for j in wants) for s in b) for b in blocks)
        out.append(Receiver(f"receiver{i}", side, demand))
    return out


def _pair_blocks(pmf: JointPmf, n: int) -> list:
    return [tuple(b) for b in support_blocks(pmf, n)]


def _codebook(n, blocks, coloring: Coloring, probs, receivers) -> Codebook:
    masses = coloring.class_masses(probs)
    words = huffman_code(masses)
    return Codebook(n, blocks, list(coloring.colors), words, receivers, np.asarray(probs, float), exact=coloring.exact)


def build_zero_error_code(pmf: JointPmf, fp: FunctionPair, n: int, *, allow_heuristic: bool = False) -> Codebook:
    """Minimum-entropy coloring of the n-block confusion graph followed by a
    canonical Huffman code on the color masses."""
    fp.check(pmf)
    g = n_instance_graph(pmf, fp, n)
    blocks = _pair_blocks(pmf, n)
    probs = block_probabilities(pmf, blocks)
    coloring, _ = min_entropy_coloring(g, probs, allow_heuristic=allow_heuristic)
    return _codebook(n, blocks, coloring, probs, _pair_receivers(pmf, fp, blocks))


def build_index_code(inst: IndexCodingInstance, n: int, *, allow_heuristic: bool = False) -> Codebook:
    g = index_confusion_graph(inst, n)
    blocks = [tuple(b) for b in index_support_blocks(inst, n)]
    probs = index_block_probabilities(inst, blocks)
    coloring, _ = min_entropy_coloring(g, probs, allow_heuristic=allow_heuristic)
    return _codebook(n, blocks, coloring, probs, _index_receivers(inst, blocks))


def codebook_from_dict(data: dict, source) -> Codebook:
    """Rebuild a codebook from its JSON form and the instance it codes
    (a ``(JointPmf, FunctionPair)`` pair or an :class:`IndexCodingInstance`)."""
    n = int(data["n"])
    table = {_key(e["block"]): int(e["color"]) for e in data["colors"]}
    words = [str(w) for w in data["codewords"]]
    if isinstance(source, IndexCodingInstance):
        blocks = [tuple(b) for b in index_support_blocks(source, n)]
        receivers = _index_receivers(source, blocks)
        probs = index_block_probabilities(source, blocks)
    else:
        pmf, fp = source
        fp.check(pmf)
        blocks = _pair_blocks(pmf, n)
        receivers = _pair_receivers(pmf, fp, blocks)
        probs = block_probabilities(pmf, blocks)
    missing = [b for b in blocks if b not in table]
    if missing:
        raise ValueError(f"codebook has no color for support block {missing[0]!r}")
    colors = [table[b] for b in blocks]
    if any(c < 0 or c >= len(words) for c in colors):
        raise ValueError("codebook color without a codeword")
    return Codebook(n, blocks, colors, words, receivers, probs, kind=data.get("kind", "zero_error"), exact=bool(data.get("exact_coloring", True)))


def codebook_from_json(text: str, source) -> Codebook:
    return codebook_from_dict(json.loads(text), source)


def measured_rate(codebook: Codebook, source=None) -> float:
    """Expected codeword length per source symbol.  Block probabilities come
    from ``source`` when given, else from the codebook."""
    if source is None:
        probs = codebook.block_probs
    elif isinstance(source, IndexCodingInstance):
        probs = index_block_probabilities(source, codebook.blocks)
    elif isinstance(source, JointPmf):
        probs = block_probabilities(source, codebook.blocks)
    else:
        probs = np.asarray(source, float)
    lengths = np.array([len(codebook.codewords[c]) for c in codebook.colors], float)
    return float(np.dot(probs, lengths)) / codebook.n


# ----------------------------------------------------------- verify


@dataclass
class Verification:
    ok: bool
    counterexample: dict | None = None
    checked: int = 0

    def __bool__(self) -> bool:
        return self.ok


def _check(codebook: Codebook, blocks, expected) -> Verification:
    """``expected[r](block) -> (side, demand)`` recomputed from the instance."""
    if not is_prefix_free(codebook.codewords) or kraft_sum(codebook.codewords) > 1 + 1e-12:
        return Verification(False, {"reason": "codewords are not prefix free"})
    checked = 0
    for b in blocks:
        try:
            word = codebook.encode(b)
        except DecodeError as e:
            return Verification(False, {"block": b, "reason": str(e)}, checked)
        for r, fn in enumerate(expected):
            side, want = fn(b)
            try:
                got = codebook.decode(r, word, side)
            except DecodeError as e:
                clash = [
                    o for o in codebook.blocks
                    if o != b and codebook.encode(o) == word and expected[r](o)[0] == side and expected[r](o)[1] != want
                ]
                return Verification(False, {"block": b, "receiver": r, "reason": str(e), "conflicting_block": clash[0] if clash else None}, checked)
            if got != want:
                return Verification(False, {"block": b, "receiver": r, "reason": f"decoded {got!r}, expected {want!r}"}, checked)
            checked += 1
    return Verification(True, None, checked)


def verify_zero_error(codebook: Codebook, pmf: JointPmf, fp: FunctionPair) -> Verification:
    """Decode every support block through both decoders and compare with
    f^n and g^n computed directly from the tables."""
    fv, gv = fp.f_values(pmf), fp.g_values(pmf)
    blocks = _pair_blocks(pmf, codebook.n)

    def dec1(b):
        return tuple(c[0] for c in b), tuple(fv[c] for c in b)

    def dec2(b):
        return tuple(c[1] for c in b), tuple(gv[c] for c in b)

    return _check(codebook, blocks, [dec1, dec2])


def verify_index_code(codebook: Codebook, inst: IndexCodingInstance) -> Verification:
    blocks = [tuple(b) for b in index_support_blocks(inst, codebook.n)]
    expected = []
    for i in range(len(inst.receivers)):
        has, wants = inst.has(i), inst.wants(i)

        def fn(b, has=has, wants=wants):
            return tuple(tuple(s[j] for j in has) for s in b), tuple(tuple(s[j] for j in wants) for s in b)

        expected.append(fn)
    return _check(codebook, blocks, expected)


def merge_colors(codebook: Codebook, a: int, b: int) -> Codebook:
    """Copy of the codebook with color ``b`` folded into color ``a``
    (for exercising the verifier)."""
    colors = [a if c == b else c for c in codebook.colors]
    return Codebook(codebook.n, codebook.blocks, colors, list(codebook.codewords), codebook.receivers, codebook.block_probs, codebook.kind, codebook.exact)
