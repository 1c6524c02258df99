"""Exact domination polynomials.

``brute_force`` enumerates every vertex subset and is the independent
oracle.  ``tree_dompoly`` is the linear-size rooted dynamic program over
states A (root chosen), B (root unchosen, dominated by a child) and
C (root unchosen, left for the parent to dominate).
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graphs import Graph, Tree
from .poly import ONE, X, ZERO, IntPoly, add, mul, sub

log = logging.getLogger(__name__)

BRUTE_FORCE_CAP = 26
# low bits enumerated per chunk; each chunk is one vectorized pass
_CHUNK_BITS = 18


class SizeError(ValueError):
    pass


def _subset_tables(masks: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Union of closed neighborhoods and popcount for every subset of ``masks``.

    Built by doubling: subsets containing vertex v are the subsets without
    it, OR-ed with N[v].
    """
    dom = np.zeros(1 << len(masks), dtype=np.uint64)
    size = np.zeros(1 << len(masks), dtype=np.uint8)
    for v, m in enumerate(masks):
        half = 1 << v
        dom[half:2 * half] = dom[:half] | np.uint64(m)
        size[half:2 * half] = size[:half] + 1
    return dom, size


def resolve_threads(threads: int | None) -> int:
    if threads:
        return max(1, threads)
    env = os.environ.get("THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def brute_force(g: Graph, cap: int = BRUTE_FORCE_CAP, threads: int | None = 1) -> IntPoly:
    """Count dominating sets of each size by checking all 2^n subsets."""
    n = g.n
    if n > cap:
        raise SizeError(f"brute force limited to n <= {cap} vertices (got {n}); raise the cap explicitly")
    if cap > BRUTE_FORCE_CAP and n > BRUTE_FORCE_CAP:
        log.warning("brute force on n=%d enumerates %d subsets", n, 1 << n)
    if n == 0:
        return ONE
    full = np.uint64((1 << n) - 1)
    low_bits = min(n, _CHUNK_BITS)
    low_dom, low_size = _subset_tables(g.closed_nbhd[:low_bits])
    high_masks = g.closed_nbhd[low_bits:]

    def run_chunk(h: int) -> np.ndarray:
        cover, extra = 0, 0
        for i, m in enumerate(high_masks):
            if h >> i & 1:
                cover |= m
                extra += 1
        hit = (low_dom | np.uint64(cover)) == full
        return np.bincount(low_size[hit], minlength=n + 1)[: n + 1].astype(np.int64), extra

    chunks = range(1 << len(high_masks))
    workers = min(resolve_threads(threads), len(chunks))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run_chunk, chunks))
    else:
        results = [run_chunk(h) for h in chunks]
    counts = [0] * (n + 1)
    for hist, extra in results:
        for j, c in enumerate(hist.tolist()):
            if c:
                counts[j + extra] += c
    return IntPoly(counts)


@dataclass(frozen=True)
class StateTriple:
    a: IntPoly
    b: IntPoly
    c: IntPoly

    @property
    def total(self) -> IntPoly:
        return self.a + self.b + self.c


LEAF_STATES = StateTriple(X, ZERO, ONE)


def combine(children: Sequence[StateTriple]) -> StateTriple:
    """Rooted states of a vertex from the states of its child subtrees."""
    all_states, a_or_b, only_b = ONE, ONE, ONE
    for s in children:
        ab = s.a + s.b
        all_states = mul(all_states, add(ab, s.c))
        a_or_b = mul(a_or_b, ab)
        only_b = mul(only_b, s.b)
    return StateTriple(mul(X, all_states), sub(a_or_b, only_b), only_b)


def tree_states(t: Tree, root: int = 0) -> StateTriple:
    """States at ``root`` by an explicit-stack post-order walk (no recursion limit)."""
    if not 0 <= root < t.n:
        raise ValueError(f"root {root} out of range")
    parent = [-1] * t.n
    order = [root]
    parent[root] = root
    for v in order:
        for u in t.adj[v]:
            if parent[u] == -1:
                parent[u] = v
                order.append(u)
    pending: list[list[StateTriple]] = [[] for _ in range(t.n)]
    states: StateTriple = LEAF_STATES
    for v in reversed(order):
        states = combine(pending[v])
        pending[v] = []
        if v != root:
            pending[parent[v]].append(states)
    return states


def tree_dompoly(t: Tree, root: int = 0) -> IntPoly:
    s = tree_states(t, root)
    return s.a + s.b


def dompoly(obj: Graph | Tree, threads: int | None = 1) -> IntPoly:
    """Route trees to the DP and general graphs to the oracle."""
    if isinstance(obj, Tree):
        return tree_dompoly(obj)
    return brute_force(obj, threads=threads)


def upper_domination_number(g: Graph, cap: int = 22) -> int:
    """Largest minimal dominating set size, by enumeration (small graphs only)."""
    n = g.n
    if n > cap:
        raise SizeError(f"upper domination by enumeration limited to n <= {cap}")
    dom, size = _subset_tables(g.closed_nbhd)
    is_dom = dom == np.uint64((1 << n) - 1)
    subsets = np.arange(1 << n, dtype=np.int64)
    minimal = is_dom.copy()
    for v in range(n):
        bit = 1 << v
        has_v = (subsets & bit) != 0
        minimal &= ~has_v | ~is_dom[subsets ^ bit]
    return int(size[minimal].max())
