"""Acceptance criteria 1-12, one test each.

Every test records a PASS/FAIL line that the terminal summary prints at the end
of the run (see conftest.py). Expected values are computed here independently of
the package where practical: polynomial identities with plain integer lists,
breaks with a direct inequality scan.
"""
from __future__ import annotations

import itertools
import json
import math
import os
import random
import subprocess
import sys

import numpy as np
import pytest

from domseq import constructions as con
from domseq import sampler as smp
from domseq import verify as ver
from domseq.dompoly import brute_force, tree_dompoly, tree_states
from domseq.graphs import Graph, graph6_decode, parse_prufer_line, prufer_decode
from domseq.poly import analyze
from domseq.polytope import lc_certificate, slice_volume
from domseq.search import multistart, reward

from .conftest import DATA, record

GOLDENS = json.loads((DATA / "search_goldens.json").read_text())
NINE_VERTEX_SEQ = [0, 0, 1, 7, 50, 89, 75, 35, 9, 1]

# minimal t per m found by scanning t = 1..60 (frozen after an independent run)
MAIN_THEOREM_FIRST_T = {1: 4, 2: 5, 3: 6}


# plain-list polynomial helpers, deliberately separate from domseq.poly
def pmul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def ppow(a: list[int], k: int) -> list[int]:
    out = [1]
    for _ in range(k):
        out = pmul(out, a)
    return out


def padd(a: list[int], b: list[int], sign: int = 1) -> list[int]:
    n = max(len(a), len(b))
    a, b = a + [0] * (n - len(a)), b + [0] * (n - len(b))
    return [x + sign * y for x, y in zip(a, b)]


def xshift(a: list[int], k: int) -> list[int]:
    return [0] * k + a


def trim(a: list[int]) -> list[int]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def coeffs(p) -> list[int]:
    return trim(list(p.coeffs))


def strict_breaks(seq: list[int]) -> list[int]:
    return [k for k in range(1, len(seq) - 1) if seq[k] ** 2 < seq[k - 1] * seq[k + 1]]


# --------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_01_tree_dp_equals_brute_force_n8():
    n = 8
    mismatches = 0
    count = 0
    for code in itertools.product(range(n), repeat=n - 2):
        t = prufer_decode(list(code), n)
        count += 1
        if tree_dompoly(t) != brute_force(t.to_graph()):
            mismatches += 1
    ok = count == 262_144 and mismatches == 0
    record(1, ok, f"{count} labeled trees on 8 vertices, {mismatches} mismatches")
    assert ok


def test_criterion_02_rooted_state_lemmas():
    failures = []
    s = tree_states(con.build_L(), 0)
    # the rooted 3-path: A = x^2 (2 + x)
    if coeffs(s.a) != [0, 0, 2, 1]:
        failures.append("L")
    s = tree_states(con.build_X(), 0)
    if coeffs(s.c) != []:
        failures.append("X")
    for t in range(1, 11):
        q = ppow([2, 3, 1], t)
        if coeffs(tree_states(con.build_F(t), 0).a) != trim(xshift(q, t + 1)):
            failures.append(f"F_{t}")
    for t in range(1, 7):
        p, q = ppow([1, 3, 1], t), ppow([2, 3, 1], t)
        u = ppow(padd(p, xshift(q, 1)), 3)
        if coeffs(tree_states(con.build_H(t), 0).a) != trim(xshift(u, 3 * t + 1)):
            failures.append(f"H_{t}")
    ok = not failures
    record(2, ok, "L, X, F_t (t <= 10), H_t (t <= 6) rooted states" + (f"; failed {failures}" if failures else ""))
    assert ok


def test_criterion_03_caterpillars():
    rng = random.Random(2024)
    eq_fail = lc_fail = 0
    for _ in range(500):
        legs = [rng.randint(1, 6) for _ in range(rng.randint(1, 10))]
        closed = con.caterpillar_dompoly_closed(legs)
        tree = con.build_caterpillar(legs)
        eq_fail += closed != tree_dompoly(tree)
        lc_fail += bool(analyze(closed, tree.n).break_indices)
    ok = eq_fail == 0 and lc_fail == 0
    record(3, ok, f"500 legged caterpillars: {eq_fail} closed-form mismatches, {lc_fail} with breaks")
    assert ok


def test_criterion_04_wmt_domination_number():
    bad = []
    for m in range(1, 4):
        for t in range(1, 7):
            d = tree_dompoly(con.build_wmt(con.WmtSpec(m, t)))
            if d.low_degree() != m * (3 * t + 1) + 1:
                bad.append((m, t))
    ok = not bad
    record(4, ok, "lowest nonzero index = m(3t+1)+1 for m <= 3, t <= 6" + (f"; failed {bad}" if bad else ""))
    assert ok


def test_criterion_05_main_theorem_small_t():
    found = {}
    for m in (1, 2, 3):
        for t in range(1, 61):
            spec = con.WmtSpec(m, t)
            seq = con.wmt_closed_dompoly(spec).padded(spec.n + 1)
            g = m * (3 * t + 1) + 1
            if set(g + 2 * j + 1 for j in range(m)) <= set(strict_breaks(seq)):
                found[m] = t
                break
    # the closed form at the reported t must agree with the tree itself
    dp_ok = all(con.wmt_closed_dompoly(con.WmtSpec(m, t)) == tree_dompoly(con.build_wmt(con.WmtSpec(m, t)))
                for m, t in found.items())
    ok = found == MAIN_THEOREM_FIRST_T and dp_ok
    record(5, ok, f"minimal t per m: {found}")
    assert ok


def test_criterion_06_growth_law():
    rows = con.growth_exponents(1, 2, 18, 24)
    worst = 0.0
    for row in rows:
        for r, target in enumerate((0, 1, 3)):
            worst = max(worst, abs(row.ratios[r] - target))
    ok = worst <= 0.2 and [row.t for row in rows] == list(range(18, 24))
    record(6, ok, f"m=1, t in [18, 24]: max |log2 ratio - v_r| = {worst:.2e} (tolerance 0.2)")
    assert ok


def test_criterion_07_nine_vertex_graph_search():
    g = GOLDENS["graph_n9"]
    res = multistart("graph", 9, list(range(*g["seeds"])), g["steps"], budget=g["budget"], edge_prob=g["edge_prob"])
    seq = res.best.sequence.padded(10)
    golden = graph6_decode((DATA / "nine_vertex_graph.g6").read_text())
    ok = seq == NINE_VERTEX_SEQ and res.evaluations <= 10**4 and brute_force(golden).padded(10) == NINE_VERTEX_SEQ
    record(7, ok, f"n=9 sequence {seq} after {res.evaluations} evaluations, {res.restarts} restarts")
    assert ok


@pytest.mark.slow
def test_criterion_08_tree_search_n32():
    g = GOLDENS["tree_n32"]
    golden = prufer_decode(parse_prufer_line(g["prufer"]), 32)
    golden_reward = reward(tree_dompoly(golden))
    res = multistart("tree", 32, list(range(*g["seeds"])), g["steps"])
    ok = (res.found_seed == g["found_seed"] and res.best.reward > 0
          and golden_reward == g["reward"] > 0)
    record(8, ok, f"seed {res.found_seed} reached reward {res.best.reward} after {res.evaluations} evaluations; "
                  f"golden tree reward {golden_reward}")
    assert ok


def test_criterion_09_polytope_slices():
    k2 = Graph.from_edges(2, [(0, 1)])
    p3 = Graph.from_edges(3, [(0, 1), (1, 2)])
    nine = graph6_decode((DATA / "nine_vertex_graph.g6").read_text())
    samples = 10**6
    grid = [1.0, 1.25, 1.5, 1.75, 2.0]
    cert_k2 = lc_certificate(k2, grid, samples, seed=0)
    k2_ok = all(abs(e.estimate - (2 - e.k)) <= 4 * e.std_error + 1e-12 for e in cert_k2.estimates)
    est = slice_volume(p3, 1.5, samples, seed=0)
    p3_ok = abs(est.estimate - 0.125) <= 4 * est.std_error
    cert_p3 = lc_certificate(p3, [0.5 * i for i in range(7)], samples, seed=0)
    cert_f1 = lc_certificate(nine, [float(k) for k in range(10)], samples, seed=0)
    no_viol = not (cert_k2.violations or cert_p3.violations or cert_f1.violations)
    ok = k2_ok and p3_ok and no_viol
    record(9, ok, f"K2 within 4 SE: {k2_ok}; P3(1.5) = {est.estimate:.5f} +/- {est.std_error:.1e}; "
                  f"3-sigma violations on K2/P3/9-vertex graph: "
                  f"{len(cert_k2.violations)}/{len(cert_p3.violations)}/{len(cert_f1.violations)}")
    assert ok


def test_criterion_10_bounds():
    checks = ver.suite_bounds(trees=1000, graphs=1000, seed=7)
    ok = all(c.passed for c in checks)
    record(10, ok, "; ".join(f"{c.name}: {'ok' if c.passed else 'FAILED'}" for c in checks))
    assert ok


def _fd(f, arr, h=1e-4):
    out = np.zeros_like(arr)
    for idx in np.ndindex(arr.shape):
        v = arr[idx]
        arr[idx] = v + h
        up = f()
        arr[idx] = v - h
        down = f()
        arr[idx] = v
        out[idx] = (up - down) / (2 * h)
    return out


def test_criterion_11_sampler():
    rng = np.random.default_rng(11)
    rows = smp.softmax(rng.normal(scale=50, size=(200, 12)), 1.7, axis=1)
    row_err = float(np.max(np.abs(rows.sum(axis=1) - 1)))
    perm_err = grad_err = 0.0
    for _ in range(20):
        p = smp.AttentionParams(rng.normal(size=(2, 3, 3)), rng.normal(size=(2, 3, 3)), rng.uniform(0.5, 2))
        Y = rng.normal(size=(5, 3))
        perm = rng.permutation(5)
        perm_err = max(perm_err, float(np.max(np.abs(smp.attention_forward(Y[perm], p)
                                                      - smp.attention_forward(Y, p)[perm]))))
        G = rng.normal(size=(5, 3))
        grads = smp.attention_grad(Y, p, G)
        for name, arr in (("Y", Y), ("A", p.A), ("B", p.B)):
            num = _fd(lambda: float(np.sum(G * smp.attention_forward(Y, p))), arr)
            scale = max(np.max(np.abs(num)), np.max(np.abs(grads[name])))
            grad_err = max(grad_err, float(np.max(np.abs(num - grads[name])) / scale))
    ds = smp.tree_dataset([[3, 1, 4, 1, 5, 0, 2]], 9)
    _, losses = smp.train(ds, smp.TrainConfig(steps=500))
    ok = row_err <= 1e-12 and perm_err <= 1e-10 and grad_err <= 1e-5 and losses[-1] < math.log(2)
    record(11, ok, f"row sums {row_err:.1e}, equivariance {perm_err:.1e}, gradient rel. error {grad_err:.1e}, "
                   f"loss after 500 steps {losses[-1]:.2e} (ln 2 = {math.log(2):.3f})")
    assert ok


def _cli(*argv: str) -> subprocess.CompletedProcess:
    env = {k: v for k, v in os.environ.items() if k != "THREADS"}
    return subprocess.run([sys.executable, "-m", "domseq", *argv], capture_output=True, env=env, check=False)


def test_criterion_12_cli_determinism(tmp_path):
    runs = [
        ["dompoly", "--graph6", "Hkl?GgH"],
        ["polytope", "--graph6", "Bw", "--grid", "1:2:0.25", "--samples", "200000", "--seed", "3"],
        ["search", "graph", "--n", "7", "--pop", "16", "--epochs", "2", "--steps", "5", "--seed", "2"],
        ["verify", "thm-main", "--m", "1"],
    ]
    bad = []
    for i, argv in enumerate(runs):
        man = tmp_path / f"m{i}.json"
        outs = [_cli("--threads", th, "--manifest", str(man) if th == "1" else str(tmp_path / "x.json"), *argv)
                for th in ("1", "4")]
        replayed = _cli("--threads", "2", "replay", str(man))
        if any(o.returncode != 0 for o in outs) or len({o.stdout for o in outs + [replayed]}) != 1:
            bad.append(argv[0])
    ok = not bad
    record(12, ok, f"{len(runs)} commands byte-identical across 1/4 threads and replay"
                   + (f"; differed: {bad}" if bad else ""))
    assert ok
