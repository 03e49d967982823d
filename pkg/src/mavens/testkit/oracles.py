"""Slow, obviously-correct reference computations in plain Python."""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter


def reference_l2_sq(a, b) -> float:
    return math.fsum((float(x) - float(y)) ** 2 for x, y in zip(a, b))


def brute_force_topk(vectors, query, k: int) -> list:
    """``vectors`` is a list of (id, vector); ties keep list order."""
    if k <= 0:
        return []
    scored = [(reference_l2_sq(v, query), i, id_) for i, (id_, v) in enumerate(vectors)]
    scored.sort(key=lambda t: (t[0], t[1]))
    return [id_ for _, _, id_ in scored[:k]]


def reference_tfidf(sentences) -> tuple[list, list]:
    """Returns (vocabulary, rows) with rows as lists of floats."""
    docs = [re.findall(r"[^\W_]+", s.lower()) for s in sentences]
    vocab = sorted({t for d in docs for t in d})
    n = len(docs)
    rows = []
    for d in docs:
        c = Counter(d)
        row = []
        for t in vocab:
            df = sum(1 for other in docs if t in other)
            row.append(c[t] * (math.log((1 + n) / (1 + df)) + 1))
        norm = math.sqrt(math.fsum(x * x for x in row))
        rows.append([x / norm for x in row] if norm > 0 else row)
    return vocab, rows


def brute_force_knee(curve: dict) -> int:
    ks = sorted(curve)
    if len(ks) < 3:
        return ks[0]
    x0, x1 = ks[0], ks[-1]
    ys = [curve[k] for k in ks]
    lo, hi = min(ys), max(ys)
    if hi == lo:
        return ks[0]

    def pt(k):
        return (k - x0) / (x1 - x0), (curve[k] - lo) / (hi - lo)

    (ax, ay), (bx, by) = pt(ks[0]), pt(ks[-1])
    length = math.sqrt((bx - ax) ** 2 + (by - ay) ** 2)
    best_k, best_d = ks[0], -1.0
    for k in ks:
        px, py = pt(k)
        # twice the triangle area over the base
        d = abs((bx - ax) * (ay - py) - (ax - px) * (by - ay)) / length
        if d > best_d + 1e-12:
            best_k, best_d = k, d
    return best_k if best_d > 1e-12 else ks[0]


def exhaustive_kmeans(rows, k: int) -> tuple[float, list]:
    """Optimal k-partition by enumerating every labelling (tiny inputs only)."""
    rows = [list(map(float, r)) if hasattr(r, "__iter__") else [float(r)] for r in rows]
    n = len(rows)
    best = (math.inf, None)
    for labels in itertools.product(range(k), repeat=n):
        if len(set(labels)) != k or labels[0] != 0:
            continue
        total = 0.0
        for j in range(k):
            members = [rows[i] for i in range(n) if labels[i] == j]
            center = [math.fsum(c) / len(members) for c in zip(*members)]
            total += math.fsum(reference_l2_sq(m, center) for m in members)
        if total < best[0] - 1e-12:
            best = (total, list(labels))
    return best


def adjusted_rand_index(a, b) -> float:
    n = len(a)
    pairs = Counter(zip(a, b))
    ca, cb = Counter(a), Counter(b)

    def c2(x):
        return x * (x - 1) / 2

    index = sum(c2(v) for v in pairs.values())
    sa = sum(c2(v) for v in ca.values())
    sb = sum(c2(v) for v in cb.values())
    expected = sa * sb / c2(n)
    maximum = (sa + sb) / 2
    if maximum == expected:
        return 1.0
    return (index - expected) / (maximum - expected)


def reference_mean_variance(xs, ddof: int = 0) -> tuple[float, float]:
    xs = [float(x) for x in xs]
    m = sum(xs) / len(xs)
    return m, sum((x - m) ** 2 for x in xs) / (len(xs) - ddof)
