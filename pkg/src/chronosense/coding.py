"""Source-coding view of sensing times: Kraft sums, entropy, Huffman lengths."""
from __future__ import annotations

import heapq
import math
from fractions import Fraction
from typing import Sequence

from .errors import InputError

CodeLengths = tuple[int, ...]


def kraft_sum(times: Sequence[int], base: float = 2) -> float:
    """Sum of ``base**-t``; a prefix code with these lengths exists iff <= 1."""
    if base < 2:
        raise InputError("Kraft base must be >= 2")
    if any(t < 0 for t in times):
        raise InputError("times must be non-negative")
    return math.fsum(float(base) ** -t for t in times)


def entropy(probs: Sequence[float]) -> float:
    """Shannon entropy in bits."""
    p = [float(v) for v in probs]
    if not p or any(v <= 0.0 for v in p):
        raise InputError("entropy needs strictly positive probabilities")
    if abs(math.fsum(p) - 1.0) > 1e-9:
        raise InputError("probabilities do not sum to 1")
    return max(-math.fsum(v * math.log2(v) for v in p), 0.0)


def huffman_lengths(probs: Sequence[float]) -> CodeLengths:
    """Binary Huffman code lengths, aligned with ``probs``.

    Ties are broken by probability, then by the smallest original index in
    each subtree, so the result is reproducible.
    """
    p = [float(v) for v in probs]
    if len(p) < 2:
        raise InputError("Huffman coding needs at least 2 symbols")
    if any(v <= 0.0 for v in p):
        raise InputError("probabilities must be positive")
    lengths = [0] * len(p)
    heap = [(w, i, [i]) for i, w in enumerate(p)]
    heapq.heapify(heap)
    while len(heap) > 1:
        w1, k1, m1 = heapq.heappop(heap)
        w2, k2, m2 = heapq.heappop(heap)
        for i in m1 + m2:
            lengths[i] += 1
        heapq.heappush(heap, (w1 + w2, min(k1, k2), m1 + m2))
    return tuple(lengths)


def scale_to_budget(lengths: Sequence[int], budget: int) -> tuple[int, ...]:
    """Integer times proportional to ``lengths`` that sum to ``budget``.

    Largest-remainder apportionment, then every band is lifted to at least
    1 and the multiset of times is re-sorted against the lengths so that a
    shorter code never gets a longer time.
    """
    n = len(lengths)
    if n == 0 or any(v < 1 for v in lengths):
        raise InputError("lengths must be positive integers")
    if budget < n:
        raise InputError(f"budget {budget} cannot give each of {n} bands at least 1")
    total = sum(lengths)
    quotas = [Fraction(v * budget, total) for v in lengths]
    times = [math.floor(q) for q in quotas]
    short = budget - sum(times)
    by_remainder = sorted(range(n), key=lambda i: (-(quotas[i] - times[i]), i))
    for i in by_remainder[:short]:
        times[i] += 1

    while min(times) < 1:
        lift = times.index(min(times))
        donor = max(range(n), key=lambda i: (times[i], lengths[i], i))
        times[donor] -= 1
        times[lift] += 1

    order = sorted(range(n), key=lambda i: (lengths[i], i))
    repaired = [0] * n
    for i, t in zip(order, sorted(times)):
        repaired[i] = t
    return tuple(repaired)


def mean_length(lengths: Sequence[int], probs: Sequence[float]) -> float:
    return math.fsum(v * w for v, w in zip(lengths, probs))
