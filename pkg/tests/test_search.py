from __future__ import annotations

import random

import pytest

from domseq.dompoly import brute_force, tree_dompoly
from domseq.graphs import Graph, Tree, graph6_decode, random_graph, random_tree
from domseq.poly import analyze
from domseq.search import (
    Evaluator,
    SearchConfig,
    decode_tokens,
    local_search_graph,
    local_search_tree,
    multistart,
    object_tokens,
    reward,
    run_pipeline,
    tree_move,
)


def test_reward_examples():
    assert reward([0, 0, 1, 7, 50, 89, 75, 35, 9, 1]) == 1
    assert reward([0, 1, 3, 1]) == -8
    assert reward([0, 1]) == 0
    with pytest.raises(ValueError):
        reward([0, 0])


def test_best_window_scans_every_index():
    seq = [0, 1, 5, 30, 20]
    # gamma window: 30*1 - 25 = 5; index 2: 20*5 - 900
    assert reward(seq, "gamma") == 5
    assert reward(seq, "best") == 5
    # windows k=1..4: 10-81, 40*9-100, 0-1600, 0
    assert reward([0, 1, 9, 10, 40], "gamma") == -71
    assert reward([0, 1, 9, 10, 40], "best") == 260


def test_positive_reward_iff_break_after_gamma():
    rng = random.Random(0)
    for _ in range(300):
        n = rng.randint(2, 9)
        seq = brute_force(random_graph(n, rng.random(), rng))
        rep = analyze(seq, n)
        assert (reward(seq) > 0) == (rep.gamma + 1 in rep.break_indices)
    for _ in range(300):
        t = random_tree(rng.randint(2, 30), rng)
        seq = tree_dompoly(t)
        rep = analyze(seq, t.n)
        assert (reward(seq) > 0) == (rep.gamma + 1 in rep.break_indices)


def test_graph_local_search_fixed_point():
    start = local_search_graph(random_graph(7, 0.4, 3), 100)
    again = local_search_graph(start.obj, 100)
    assert again.obj == start.obj
    assert again.reward == start.reward


def test_empty_graph_on_three_vertices_is_a_local_optimum():
    # enumerate the moves: x^3 has reward 0, every single edge gives 2x^2 + x^3 with reward -1
    empty = Graph.from_edges(3, [])
    ev = Evaluator()
    assert ev.candidate(empty).reward == 0
    for u, v in [(0, 1), (0, 2), (1, 2)]:
        assert ev.candidate(empty.toggle(u, v)).sequence.padded(4) == [0, 0, 2, 1]
        assert ev.candidate(empty.toggle(u, v)).reward == -1
    assert local_search_graph(empty, 10, evaluator=ev).obj == empty


def test_graph_local_search_is_monotone_and_valid():
    for s in range(20):
        local_search_graph(random_graph(8, 0.5, s), 50, check=True)


def test_tree_local_search_degenerate_and_valid():
    k2 = Tree(2, [(0, 1)])
    assert local_search_tree(k2, 10).obj == k2
    rng = random.Random(4)
    for s in range(10):
        c = local_search_tree(random_tree(15, rng), 40, s, check=True)
        assert isinstance(c.obj, Tree)


def test_tree_move_keeps_current_when_nothing_better():
    # a single move on a path: the current tree is one of the options and wins ties
    t = Tree(4, [(0, 1), (1, 2), (2, 3)])
    ev = Evaluator()
    cur = ev.candidate(t)
    nxt = tree_move(t, random.Random(0), ev, cur)
    assert nxt.reward >= cur.reward
    if nxt.reward == cur.reward:
        assert nxt is cur


def test_multistart_finds_the_nine_vertex_graph(data_dir):
    res = multistart("graph", 9, list(range(10)), 100, budget=10**4, edge_prob=0.2)
    assert res.best.sequence.padded(10) == [0, 0, 1, 7, 50, 89, 75, 35, 9, 1]
    golden = graph6_decode((data_dir / "nine_vertex_graph.g6").read_text())
    assert brute_force(golden) == res.best.sequence


def test_tokens_round_trip():
    t = random_tree(9, 1)
    assert decode_tokens(object_tokens(t), "tree", 9) == t
    g = random_graph(6, 0.5, 2)
    assert decode_tokens(object_tokens(g), "graph", 6) == g
    assert decode_tokens([0, 1], "tree", 9) is None
    assert decode_tokens([1, 0, 1], "graph", 6) is None


def test_pipeline_without_sampler_is_deterministic():
    cfg = SearchConfig(n=10, mode="tree", population_size=20, epochs=2, local_search_steps=5, seed=3)
    a, b = run_pipeline(cfg), run_pipeline(cfg)
    assert a.log_jsonl() == b.log_jsonl()
    assert len(a.log) == 3
    assert [c.reward for c in a.population] == sorted((c.reward for c in a.population), reverse=True)


def test_pipeline_with_attention_sampler():
    cfg = SearchConfig(n=8, mode="tree", population_size=20, epochs=2, local_search_steps=3,
                       sampler="attention", train_steps=20, seed=1)
    res = run_pipeline(cfg)
    assert res.log[-1]["final_train_loss"] is not None
    assert any(c.lineage == "sampled" for c in res.population)
    assert run_pipeline(cfg).log_jsonl() == res.log_jsonl()


def test_pipeline_worker_count_does_not_change_log():
    base = dict(n=7, mode="graph", population_size=12, epochs=1, local_search_steps=3, seed=5)
    one = run_pipeline(SearchConfig(**base, workers=1))
    two = run_pipeline(SearchConfig(**base, workers=2))
    assert one.log_jsonl() == two.log_jsonl()


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(n=5, keep_fraction=0)
    with pytest.raises(ValueError):
        SearchConfig(n=5, mode="hypergraph")
    with pytest.raises(ValueError):
        SearchConfig(n=30, mode="graph")
