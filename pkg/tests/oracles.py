from __future__ import annotations

from itertools import combinations


def naive_dominating_counts(n: int, edges) -> list[int]:
    """Reference oracle: test every subset against the definition with plain sets."""
    nbrs = {v: {v} for v in range(n)}
    for u, v in edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    counts = [0] * (n + 1)
    for size in range(n + 1):
        for s in combinations(range(n), size):
            covered = set()
            for v in s:
                covered |= nbrs[v]
            if len(covered) == n:
                counts[size] += 1
    return counts

