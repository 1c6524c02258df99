"""Reward-driven search for non-log-concave domination sequences.

The reward of a sequence d is d[k+2]*d[k] - d[k+1]**2 with k the first
nonzero index (the domination number); it is positive exactly when
log-concavity fails at k+1.  Graph moves toggle one edge; tree moves add a
random edge and then delete one edge of the cycle it closes.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Literal, Union

from . import sampler as smp
from .dompoly import brute_force, tree_dompoly
from .graphs import (
    Graph,
    GraphError,
    Tree,
    format_prufer_line,
    graph6_encode,
    prufer_decode,
    prufer_encode,
    random_graph,
    random_tree,
)
from .poly import IntPoly

Obj = Union[Graph, Tree]
Window = Literal["gamma", "best"]


def reward(seq: IntPoly | list[int], window: Window = "gamma") -> int:
    d = list(seq.coeffs) if isinstance(seq, IntPoly) else [int(c) for c in seq]
    if not any(d):
        raise ValueError("reward of an all-zero sequence")
    k0 = next(j for j, c in enumerate(d) if c)
    d += [0, 0]

    def at(k: int) -> int:
        return d[k + 2] * d[k] - d[k + 1] ** 2

    if window == "gamma":
        return at(k0)
    if window == "best":
        return max(at(k) for k in range(k0, len(d) - 2))
    raise ValueError(f"unknown reward window {window!r}")


@dataclass
class SearchCandidate:
    obj: Obj
    sequence: IntPoly
    reward: int
    lineage: str = "random"

    @property
    def encoding(self) -> str:
        return encode_object(self.obj)

    def to_json(self) -> dict:
        return {
            "object": self.encoding,
            "kind": "tree" if isinstance(self.obj, Tree) else "graph",
            "n": self.obj.n,
            "sequence": self.sequence.to_json(self.obj.n + 1),
            "reward": str(self.reward),
            "lineage": self.lineage,
        }


def encode_object(obj: Obj) -> str:
    if isinstance(obj, Tree):
        return format_prufer_line(prufer_encode(obj)) if obj.n > 2 else ""
    return graph6_encode(obj)


class Evaluator:
    """Memoized reward evaluation with an evaluation counter."""

    def __init__(self, window: Window = "gamma"):
        self.window = window
        self.evaluations = 0
        self._cache: dict = {}

    def sequence(self, obj: Obj) -> IntPoly:
        key = obj.edges if isinstance(obj, Tree) else obj.closed_nbhd
        seq = self._cache.get(key)
        if seq is None:
            self.evaluations += 1
            seq = tree_dompoly(obj) if isinstance(obj, Tree) else brute_force(obj)
            self._cache[key] = seq
        return seq

    def candidate(self, obj: Obj, lineage: str = "random") -> SearchCandidate:
        seq = self.sequence(obj)
        return SearchCandidate(obj, seq, reward(seq, self.window), lineage)


def local_search_graph(
    g: Graph,
    steps: int = 100,
    seed: int = 0,
    window: Window = "gamma",
    evaluator: Evaluator | None = None,
    check: bool = False,
) -> SearchCandidate:
    """Best-improvement edge toggling until no toggle strictly improves the reward.

    Ties go to the lexicographically smallest toggled pair; ``seed`` is
    accepted for interface symmetry, the walk itself is deterministic.
    """
    ev = evaluator or Evaluator(window)
    cur = ev.candidate(g, "local-search")
    pairs = [(u, v) for u in range(g.n) for v in range(u + 1, g.n)]
    for _ in range(steps):
        best = cur
        for u, v in pairs:
            cand = ev.candidate(cur.obj.toggle(u, v), "local-search")
            if cand.reward > best.reward:
                best = cand
        if best is cur:
            break
        if check and best.reward < cur.reward:
            raise AssertionError("graph local search decreased the reward")
        cur = best
    return cur


def tree_move(t: Tree, rng: random.Random, ev: Evaluator, current: SearchCandidate) -> SearchCandidate:
    """Add a random non-edge, then keep the best tree among the cycle-edge deletions.

    The original tree is among the options (deleting the new edge), and it
    wins ties, so a move never lowers the reward.
    """
    n = t.n
    if n < 3:
        return current
    while True:
        u, v = rng.sample(range(n), 2)
        if v not in t.adj[u]:
            break
    path = t.path(u, v)
    best = current
    base = [e for e in t.edges]
    for a, b in zip(path, path[1:]):
        drop = (min(a, b), max(a, b))
        edges = [e for e in base if e != drop] + [(u, v)]
        cand = ev.candidate(Tree(n, edges), "local-search")
        if cand.reward > best.reward:
            best = cand
    return best


def local_search_tree(
    t: Tree,
    steps: int = 100,
    seed: int | random.Random = 0,
    window: Window = "gamma",
    evaluator: Evaluator | None = None,
    check: bool = False,
) -> SearchCandidate:
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    ev = evaluator or Evaluator(window)
    cur = ev.candidate(t, "local-search")
    for _ in range(steps):
        nxt = tree_move(cur.obj, rng, ev, cur)
        if check:
            Tree(nxt.obj.n, nxt.obj.edges)
            if nxt.reward < cur.reward:
                raise AssertionError("tree local search decreased the reward")
        cur = nxt
    return cur


# --------------------------------------------------------------------------
# the outer loop
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchConfig:
    n: int
    mode: Literal["graph", "tree"] = "tree"
    population_size: int = 500
    epochs: int = 5
    local_search_steps: int = 20
    keep_fraction: float = 0.10
    sampler: Literal["none", "attention"] = "none"
    seed: int = 0
    reward_window: Window = "gamma"
    edge_prob: float = 0.5
    train_steps: int = 200
    train_lr: float = 0.5
    model_dim: int = 16
    model_heads: int = 2
    model_beta: float = 1.0
    sample_beta: float = 1.0
    workers: int = 1

    def __post_init__(self) -> None:
        if not 0 < self.keep_fraction <= 1:
            raise ValueError("keep_fraction must lie in (0, 1]")
        if self.mode not in ("graph", "tree"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.sampler not in ("none", "attention"):
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if self.reward_window not in ("gamma", "best"):
            raise ValueError(f"unknown reward window {self.reward_window!r}")
        if self.population_size < 1 or self.epochs < 0 or self.local_search_steps < 0:
            raise ValueError("population_size >= 1, epochs >= 0 and local_search_steps >= 0 required")
        if self.mode == "tree" and self.n < 2:
            raise ValueError("tree search needs n >= 2")
        if self.mode == "graph" and not 1 <= self.n <= 26:
            raise ValueError("graph search needs 1 <= n <= 26 (brute-force oracle)")


@dataclass
class SearchResult:
    population: list[SearchCandidate]
    best: SearchCandidate
    log: list[dict] = field(default_factory=list)

    def log_jsonl(self) -> str:
        return "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in self.log)


def _member_rng(cfg: SearchConfig, epoch: int, member: int) -> random.Random:
    return random.Random(f"{cfg.seed}:{epoch}:{member}")


def _improve(job: tuple[SearchConfig, Obj, int, int, str]) -> SearchCandidate:
    cfg, obj, epoch, member, lineage = job
    rng = _member_rng(cfg, epoch, member)
    ev = Evaluator(cfg.reward_window)
    if cfg.mode == "graph":
        c = local_search_graph(obj, cfg.local_search_steps, window=cfg.reward_window, evaluator=ev)
    else:
        c = local_search_tree(obj, cfg.local_search_steps, rng, cfg.reward_window, ev)
    c.lineage = lineage
    return c


def _random_object(cfg: SearchConfig, epoch: int, member: int) -> Obj:
    rng = _member_rng(cfg, epoch, -1 - member)
    if cfg.mode == "graph":
        return random_graph(cfg.n, cfg.edge_prob, rng)
    return random_tree(cfg.n, rng)


def _rank_key(c: SearchCandidate) -> tuple:
    return (-c.reward, c.encoding)


def object_tokens(obj: Obj) -> list[int]:
    if isinstance(obj, Tree):
        return prufer_encode(obj)
    return [int(obj.has_edge(u, v)) for u in range(obj.n) for v in range(u + 1, obj.n)]


def decode_tokens(tokens: list[int], mode: str, n: int) -> Obj | None:
    """Turn sampled tokens back into an object; None when they are not valid."""
    if mode == "tree":
        try:
            return prufer_decode(tokens, n)
        except GraphError:
            return None
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if len(tokens) != len(pairs) or any(b not in (0, 1) for b in tokens):
        return None
    return Graph.from_edges(n, [p for p, b in zip(pairs, tokens) if b])


def _dataset(cfg: SearchConfig, kept: list[SearchCandidate]) -> smp.TokenDataset:
    toks = [object_tokens(c.obj) for c in kept]
    return smp.tree_dataset(toks, cfg.n) if cfg.mode == "tree" else smp.graph_dataset(toks, cfg.n)


def run_pipeline(cfg: SearchConfig) -> SearchResult:
    """Seed a population by local search, then alternate keep / (train, sample) / local search."""

    def improve_all(objs: list[Obj], epoch: int, lineage: str) -> list[SearchCandidate]:
        jobs = [(cfg, o, epoch, i, lineage) for i, o in enumerate(objs)]
        if cfg.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(cfg.workers) as pool:
                return list(pool.map(_improve, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
        return [_improve(j) for j in jobs]

    population = improve_all([_random_object(cfg, 0, i) for i in range(cfg.population_size)], 0, "random")
    population.sort(key=_rank_key)
    log = [_epoch_record(cfg, 0, population, invalid=0, losses=None)]
    keep = max(1, int(round(cfg.keep_fraction * cfg.population_size)))
    for epoch in range(1, cfg.epochs + 1):
        kept = population[:keep]
        fresh = cfg.population_size - keep
        invalid = 0
        losses = None
        if cfg.sampler == "attention":
            hyper = smp.TrainConfig(lr=cfg.train_lr, steps=cfg.train_steps, seed=cfg.seed * 1000 + epoch,
                                    dim=cfg.model_dim, heads=cfg.model_heads, beta=cfg.model_beta)
            params, losses = smp.train(_dataset(cfg, kept), hyper)
            samples = smp.sample(params, fresh, seed=cfg.seed * 1000 + epoch, beta=cfg.sample_beta)
            objs = []
            for i, toks in enumerate(samples):
                obj = decode_tokens(toks, cfg.mode, cfg.n)
                if obj is None:
                    invalid += 1
                    obj = _random_object(cfg, epoch, i)
                objs.append(obj)
            lineage = "sampled"
        else:
            objs = [_random_object(cfg, epoch, i) for i in range(fresh)]
            lineage = "random"
        population = kept + improve_all(objs, epoch, lineage)
        population.sort(key=_rank_key)
        log.append(_epoch_record(cfg, epoch, population, invalid, losses))
    return SearchResult(population, population[0], log)


def _epoch_record(cfg: SearchConfig, epoch: int, pop: list[SearchCandidate], invalid: int,
                  losses: list[float] | None) -> dict:
    best = pop[0]
    rewards = sorted(c.reward for c in pop)
    return {
        "epoch": epoch,
        "best_reward": str(best.reward),
        "best_object": best.encoding,
        "best_sequence": best.sequence.to_json(cfg.n + 1),
        "population": len(pop),
        "median_reward": str(rewards[len(rewards) // 2]),
        "positive_rewards": sum(r > 0 for r in rewards),
        "invalid_samples": invalid,
        "final_train_loss": None if losses is None or not losses else round(losses[-1], 12),
        "local_search_steps": cfg.local_search_steps,
    }


def config_dict(cfg: SearchConfig) -> dict:
    return asdict(cfg)


@dataclass
class MultiStartResult:
    best: SearchCandidate
    evaluations: int
    restarts: int
    found_seed: int | None


def multistart(
    mode: Literal["graph", "tree"],
    n: int,
    seeds: list[int],
    steps: int,
    budget: int | None = None,
    edge_prob: float = 0.5,
    window: Window = "gamma",
    stop_at_positive: bool = True,
) -> MultiStartResult:
    """Independent local searches from seeded random starts sharing one reward cache.

    Stops once the cache has evaluated ``budget`` distinct objects (checked
    between restarts) or, with ``stop_at_positive``, at the first positive reward.
    """
    ev = Evaluator(window)
    best: SearchCandidate | None = None
    found = None
    restarts = 0
    for s in seeds:
        if budget is not None and ev.evaluations >= budget:
            break
        restarts += 1
        if mode == "graph":
            c = local_search_graph(random_graph(n, edge_prob, s), steps, s, window, ev)
        else:
            c = local_search_tree(random_tree(n, s), steps, s, window, ev)
        if best is None or c.reward > best.reward:
            best = c
        if c.reward > 0 and found is None:
            found = s
            if stop_at_positive:
                break
    if best is None:
        raise ValueError("no restarts were run")
    return MultiStartResult(best, ev.evaluations, restarts, found)
