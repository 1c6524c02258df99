"""Graph and tree representations, Prüfer codes, graph6 and edge-list I/O."""

from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_BITMASK_N = 64


class GraphError(ValueError):
    pass


class Graph6Error(GraphError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


def _normalize_edges(n: int, edges: Iterable[Sequence[int]]) -> tuple[tuple[int, int], ...]:
    seen: set[tuple[int, int]] = set()
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise GraphError(f"loop ({u}, {v})")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphError(f"duplicate edge ({u}, {v})")
        seen.add(key)
    return tuple(sorted(seen))


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1 stored as closed-neighborhood bitmasks."""

    n: int
    closed_nbhd: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 0 <= self.n <= MAX_BITMASK_N:
            raise GraphError(f"bitmask graphs support 0..{MAX_BITMASK_N} vertices, got {self.n}")
        if len(self.closed_nbhd) != self.n:
            raise GraphError("closed_nbhd length must equal n")
        for v, mask in enumerate(self.closed_nbhd):
            if not mask >> v & 1 or mask >> self.n:
                raise GraphError(f"bad closed neighborhood for vertex {v}")
            for u in range(self.n):
                if (mask >> u & 1) != (self.closed_nbhd[u] >> v & 1):
                    raise GraphError(f"asymmetric adjacency between {u} and {v}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> Graph:
        masks = [1 << v for v in range(n)]
        for u, v in _normalize_edges(n, edges):
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return cls(n, tuple(masks))

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in range(u + 1, self.n) if self.closed_nbhd[u] >> v & 1]

    @property
    def edge_count(self) -> int:
        return (sum(bin(m).count("1") for m in self.closed_nbhd) - self.n) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and bool(self.closed_nbhd[u] >> v & 1)

    def degree(self, v: int) -> int:
        return bin(self.closed_nbhd[v]).count("1") - 1

    def neighbors(self, v: int) -> list[int]:
        m = self.closed_nbhd[v]
        return [u for u in range(self.n) if u != v and m >> u & 1]

    def has_isolated(self) -> bool:
        return any(self.closed_nbhd[v] == 1 << v for v in range(self.n))

    def toggle(self, u: int, v: int) -> Graph:
        """Return a copy with edge {u, v} added or removed."""
        masks = list(self.closed_nbhd)
        masks[u] ^= 1 << v
        masks[v] ^= 1 << u
        return Graph(self.n, tuple(masks))

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen, frontier = 1, 1
        while frontier:
            nxt = 0
            for v in range(self.n):
                if frontier >> v & 1:
                    nxt |= self.closed_nbhd[v]
            frontier = nxt & ~seen
            seen |= nxt
        return seen == (1 << self.n) - 1

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}


class Tree:
    """Labeled tree on 0..n-1 in adjacency-list form, any size."""

    __slots__ = ("n", "edges", "adj")

    def __init__(self, n: int, edges: Iterable[Sequence[int]]):
        if n < 1:
            raise GraphError("a tree needs at least one vertex")
        self.n = n
        self.edges = _normalize_edges(n, edges)
        if len(self.edges) != n - 1:
            raise GraphError(f"a tree on {n} vertices has {n - 1} edges, got {len(self.edges)}")
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self.adj = tuple(tuple(sorted(a)) for a in adj)
        seen = [False] * n
        seen[0] = True
        stack = [0]
        while stack:
            v = stack.pop()
            for u in self.adj[v]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        if not all(seen):
            raise GraphError("edge set is not connected")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Tree) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Tree(n={self.n}, edges={list(self.edges)})"

    def to_graph(self) -> Graph:
        return Graph.from_edges(self.n, self.edges)

    def path(self, u: int, v: int) -> list[int]:
        """Vertices on the unique u-v path, inclusive."""
        parent = {u: -1}
        stack = [u]
        while stack:
            w = stack.pop()
            if w == v:
                break
            for x in self.adj[w]:
                if x not in parent:
                    parent[x] = w
                    stack.append(x)
        out = [v]
        while out[-1] != u:
            out.append(parent[out[-1]])
        return out[::-1]

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}


# --------------------------------------------------------------------------
# Prüfer codes (smallest-labeled leaf removed first)
# --------------------------------------------------------------------------


def prufer_encode(t: Tree) -> list[int]:
    n = t.n
    if n < 2:
        raise GraphError("Prüfer codes need n >= 2")
    degree = [len(a) for a in t.adj]
    removed = [False] * n
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    code = []
    for _ in range(n - 2):
        leaf = heapq.heappop(leaves)
        removed[leaf] = True
        nb = next(u for u in t.adj[leaf] if not removed[u])
        code.append(nb)
        degree[nb] -= 1
        if degree[nb] == 1:
            heapq.heappush(leaves, nb)
    return code


def prufer_decode(code: Sequence[int], n: int | None = None) -> Tree:
    if n is None:
        n = len(code) + 2
    if n < 2 or len(code) != n - 2:
        raise GraphError(f"Prüfer code of length {len(code)} does not describe a tree on {n} vertices")
    for i, c in enumerate(code):
        if not 0 <= c < n:
            raise GraphError(f"Prüfer entry {c} at position {i} out of range 0..{n - 1}")
    degree = [1] * n
    for c in code:
        degree[c] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for c in code:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, c))
        degree[c] -= 1
        if degree[c] == 1:
            heapq.heappush(leaves, c)
    edges.append((heapq.heappop(leaves), heapq.heappop(leaves)))
    return Tree(n, edges)


def parse_prufer_line(line: str) -> list[int]:
    line = line.strip()
    return [int(tok) for tok in line.split(",")] if line else []


def format_prufer_line(code: Sequence[int]) -> str:
    return ",".join(str(c) for c in code)


# --------------------------------------------------------------------------
# graph6
# --------------------------------------------------------------------------

_G6_HEADER = ">>graph6<<"


def graph6_encode(g: Graph) -> str:
    n = g.n
    if n <= 62:
        out = [chr(63 + n)]
    elif n <= 258047:
        out = [chr(126)] + [chr(63 + (n >> s & 63)) for s in (12, 6, 0)]
    else:  # pragma: no cover - unreachable with the 64-vertex cap
        raise GraphError("graph too large for graph6")
    bits = [g.closed_nbhd[j] >> i & 1 for j in range(1, n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    for k in range(0, len(bits), 6):
        val = 0
        for b in bits[k:k + 6]:
            val = val << 1 | b
        out.append(chr(63 + val))
    return "".join(out)


def graph6_decode(text: str) -> Graph:
    s = text.strip()
    if s.startswith(_G6_HEADER):
        s = s[len(_G6_HEADER):]
    if not s:
        raise Graph6Error("empty graph6 string", 0)
    for i, ch in enumerate(s):
        if not 63 <= ord(ch) <= 126:
            raise Graph6Error(f"invalid graph6 byte {ch!r}", i)
    vals = [ord(ch) - 63 for ch in s]
    if vals[0] < 63:
        n, pos = vals[0], 1
    elif len(vals) >= 4 and vals[1] < 63:
        n, pos = vals[1] << 12 | vals[2] << 6 | vals[3], 4
    else:
        raise Graph6Error("unsupported graph6 size prefix", 0)
    nbits = n * (n - 1) // 2
    nbytes = -(-nbits // 6)
    if len(vals) - pos != nbytes:
        raise Graph6Error(f"expected {nbytes} data bytes for n={n}, got {len(vals) - pos}", pos)
    if n > MAX_BITMASK_N:
        raise Graph6Error(f"n={n} exceeds the {MAX_BITMASK_N}-vertex limit", 0)
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if vals[pos + k // 6] >> (5 - k % 6) & 1:
                edges.append((i, j))
            k += 1
    if nbits % 6 and vals[-1] & ((1 << (6 - nbits % 6)) - 1):
        raise Graph6Error("nonzero padding bits", len(vals) - 1)
    return Graph.from_edges(n, edges)


# --------------------------------------------------------------------------
# JSON edge lists
# --------------------------------------------------------------------------


def edge_list_from_json(text: str) -> tuple[int, list[tuple[int, int]]]:
    data = json.loads(text)
    try:
        n = int(data["n"])
        edges = [(int(u), int(v)) for u, v in data["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"bad edge-list JSON: {exc}") from exc
    return n, edges


def is_tree_edge_set(n: int, edges: Sequence[Sequence[int]]) -> bool:
    if len(edges) != n - 1:
        return False
    try:
        Tree(n, edges)
    except GraphError:
        return False
    return True


# --------------------------------------------------------------------------
# random generation
# --------------------------------------------------------------------------


def random_prufer(n: int, rng: random.Random) -> list[int]:
    return [rng.randrange(n) for _ in range(n - 2)]


def random_tree(n: int, seed: int | random.Random) -> Tree:
    """Uniform labeled tree on n >= 2 vertices via a uniform Prüfer code."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    if n < 2:
        raise GraphError("random_tree needs n >= 2")
    return prufer_decode(random_prufer(n, rng), n)


def random_graph(n: int, edge_prob: float, seed: int | random.Random) -> Graph:
    """Erdős–Rényi G(n, p)."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < edge_prob]
    return Graph.from_edges(n, edges)


def random_connected_graph(n: int, edge_prob: float, seed: int | random.Random) -> Graph:
    """A uniform random spanning tree plus independent extra edges, so always connected."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    if n == 1:
        return Graph.from_edges(1, [])
    t = random_tree(n, rng)
    tree_edges = set(t.edges)
    extra = [(u, v) for u in range(n) for v in range(u + 1, n)
             if (u, v) not in tree_edges and rng.random() < edge_prob]
    return Graph.from_edges(n, sorted(tree_edges) + extra)
