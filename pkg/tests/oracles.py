"""Independent brute-force oracles the implementation is checked against.

These deliberately avoid the package's algorithms: matching enumerates raw
injective assignments, the Pareto filter is the quadratic definition, and the
statistics are textbook formulas evaluated directly.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from tracepatterns.partial_order import POTrace
from tracepatterns.patterns import Pattern


def brute_force_instances(p: Pattern, po: POTrace) -> list[tuple[int, ...]]:
    """Every injective node->event assignment that preserves labels and the
    pairwise relation classification, checked pair by pair."""
    n = len(p)
    found = []
    for assignment in itertools.permutations(range(len(po)), n):
        if any(po.events[assignment[u]].activity != p.labels[u] for u in range(n)):
            continue
        ok = True
        for u in range(n):
            for v in range(n):
                if u != v and po.relation_code(assignment[u], assignment[v]) != p.codes[u][v]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            found.append(assignment)
    return sorted(found)


def brute_force_front(vectors: Sequence[tuple[float, ...]], directions: Sequence[str]) -> list[int]:
    """Indices of non-dominated vectors by the O(n^2) definition."""
    signs = [1.0 if d == "max" else -1.0 for d in directions]
    oriented = [tuple(s * v for s, v in zip(signs, vec)) for vec in vectors]

    def dominates(a: tuple[float, ...], b: tuple[float, ...]) -> bool:
        return all(x >= y for x, y in zip(a, b)) and any(x > y for x, y in zip(a, b))

    return [
        i
        for i, vec in enumerate(oriented)
        if not any(dominates(other, vec) for j, other in enumerate(oriented) if j != i)
    ]


def brute_force_front_numpy(points: np.ndarray, directions: Sequence[str]) -> np.ndarray:
    """Vectorized version of the same quadratic filter for large batches."""
    signs = np.array([1.0 if d == "max" else -1.0 for d in directions])
    oriented = points * signs
    geq = (oriented[:, None, :] >= oriented[None, :, :]).all(axis=2)
    gt = (oriented[:, None, :] > oriented[None, :, :]).any(axis=2)
    dominated = (geq & gt).any(axis=0)
    return ~dominated


def rank_with_average_ties(values: Sequence[float]) -> list[float]:
    ordered = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[ordered[j + 1]] == values[ordered[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[ordered[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman_direct(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of average-tie ranks, straight from the formula."""
    rx = rank_with_average_ties(x)
    ry = rank_with_average_ties(y)
    mx = sum(rx) / len(rx)
    my = sum(ry) / len(ry)
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    den = math.sqrt(sum((a - mx) ** 2 for a in rx) * sum((b - my) ** 2 for b in ry))
    return num / den


def entropy_bits(labels: Sequence[str]) -> float:
    counts: dict[str, int] = {}
    for label in labels:
        counts[label] = counts.get(label, 0) + 1
    n = len(labels)
    return -sum((c / n) * math.log2(c / n) for c in counts.values())


def information_gain_direct(feature: Sequence[object], labels: Sequence[str]) -> float:
    total = entropy_bits(labels)
    n = len(labels)
    for value in set(feature):
        subset = [lab for f, lab in zip(feature, labels) if f == value]
        total -= len(subset) / n * entropy_bits(subset)
    return total


def log_rank_table(
    group_a: tuple[Sequence[float], Sequence[bool]],
    group_b: tuple[Sequence[float], Sequence[bool]],
) -> float:
    """Chi-square statistic from the expected-vs-observed event table."""
    times = sorted(
        {t for t, f in zip(*group_a) if f} | {t for t, f in zip(*group_b) if f}
    )
    observed = expected = variance = 0.0
    for t in times:
        n1 = sum(1 for x in group_a[0] if x >= t)
        n2 = sum(1 for x in group_b[0] if x >= t)
        d1 = sum(1 for x, f in zip(*group_a) if f and x == t)
        d2 = sum(1 for x, f in zip(*group_b) if f and x == t)
        n, d = n1 + n2, d1 + d2
        observed += d1
        expected += d * n1 / n
        if n > 1:
            variance += d * (n1 / n) * (n2 / n) * (n - d) / (n - 1)
    return (observed - expected) ** 2 / variance if variance else 0.0


def brute_force_canonical(p: Pattern) -> str:
    """Canonical form by minimizing over all node permutations (not just
    topological orders), serializing labels plus the full 0..4 code matrix."""
    n = len(p)
    best = None
    for perm in itertools.permutations(range(n)):
        labels = tuple(p.labels[node] for node in perm)
        codes = tuple(
            p.codes[perm[i]][perm[j]] for i in range(n) for j in range(n) if i != j
        )
        form = (labels, codes)
        if best is None or form < best:
            best = form
    return repr(best)


def random_pattern(rng, n_nodes: int, alphabet: Sequence[str]) -> Pattern | None:
    """A random total relation map; None when the draw is cyclic."""
    from tracepatterns.patterns import PatternError, normalize_relations

    labels = tuple(rng.choice(alphabet) for _ in range(n_nodes))
    rel = {}
    for u in range(n_nodes):
        for v in range(u + 1, n_nodes):
            kind = rng.choice(["direct", "eventual", "concurrent"])
            if kind != "concurrent" and rng.random() < 0.5:
                rel[(v, u)] = kind
            else:
                rel[(u, v)] = kind
    try:
        return Pattern(labels=labels, relations=normalize_relations(labels, rel))
    except PatternError:
        return None
