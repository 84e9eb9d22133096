"""Canonical Huffman codes over color distributions."""

from __future__ import annotations

import heapq
import itertools

import numpy as np


def huffman_lengths(probs) -> list[int]:
    """Optimal prefix-code lengths.  Merges pick the two lightest subtrees,
    ties broken by the smallest color id they contain; a single symbol gets
    length 0 (the empty codeword)."""
    p = [float(v) for v in probs]
    if not p:
        return []
    if len(p) == 1:
        return [0]
    counter = itertools.count()
    heap = [(v, i, next(counter), [i]) for i, v in enumerate(p)]
    heapq.heapify(heap)
    lengths = [0] * len(p)
    while len(heap) > 1:
        pa, ia, _, a = heapq.heappop(heap)
        pb, ib, _, b = heapq.heappop(heap)
        for s in a + b:
            lengths[s] += 1
        heapq.heappush(heap, (pa + pb, min(ia, ib), next(counter), a + b))
    return lengths


def canonical_code(lengths) -> list[str]:
    """Canonical codewords: symbols sorted by (length, id) get consecutive
    binary values."""
    order = sorted(range(len(lengths)), key=lambda i: (lengths[i], i))
    words = [""] * len(lengths)
    code = 0
    prev = 0
    for rank, i in enumerate(order):
        length = lengths[i]
        if rank:
            code = (code + 1) << (length - prev)
        else:
            code = 0
        words[i] = format(code, f"0{length}b") if length else ""
        prev = length
    return words


def huffman_code(probs) -> list[str]:
    return canonical_code(huffman_lengths(probs))


def kraft_sum(words) -> float:
    return float(sum(2.0 ** -len(w) for w in words))


def is_prefix_free(words) -> bool:
    ws = sorted(words)
    if len(set(ws)) != len(ws):
        return False
    return not any(b.startswith(a) for a, b in zip(ws, ws[1:]))


def expected_length(words, probs) -> float:
    return float(np.dot([len(w) for w in words], np.asarray(probs, float)))
