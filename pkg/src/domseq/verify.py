"""Verification suites behind ``domseq verify``.

Each suite returns a list of ``Check`` records; a suite passes when every
check passes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import constructions as con
from .dompoly import brute_force, tree_dompoly, tree_states, upper_domination_number
from .graphs import Graph, random_connected_graph, random_tree
from .poly import ONE, X, IntPoly, analyze, check_bounds, power
from .polytope import lc_certificate, slice_volume

GROWTH_TOLERANCE = 0.2


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def suite_lemmas(t_fan: int = 10, t_branch: int = 6, caterpillars: int = 500, seed: int = 0) -> list[Check]:
    out = []
    s = tree_states(con.build_L(), 0)
    out.append(Check("L states", (s.a, s.b, s.c) == (IntPoly((0, 0, 2, 1)), IntPoly((0, 1, 1)), X)))
    s = tree_states(con.build_X(), 0)
    out.append(Check("X states", (s.a, s.b, s.c) == (IntPoly((0, 1, 1)), X, IntPoly())))
    bad = []
    for t in range(1, t_fan + 1):
        p, q, r = con.pqr(t)
        s = tree_states(con.build_F(t), 0)
        want = (q.shift(t + 1), r.shift(t + 1), power(ONE + X, t).shift(t))
        if (s.a, s.b, s.c) != want:
            bad.append(t)
        if r.shift(1) + power(ONE + X, t) != p:
            bad.append(("identity", t))
    out.append(Check(f"F_t states, t <= {t_fan}", not bad, {"failures": bad}))
    bad = []
    for t in range(1, t_branch + 1):
        _, _, r = con.pqr(t)
        u, v = con.uv(t)
        s = tree_states(con.build_H(t), 0)
        if (s.a, s.b, s.c) != (u.shift(3 * t + 1), v.shift(3 * t + 3), power(r, 3).shift(3 * t + 3)):
            bad.append(t)
    out.append(Check(f"H_t states, t <= {t_branch}", not bad, {"failures": bad}))
    bad = []
    for m in range(1, 4):
        for t in range(1, 7):
            spec = con.WmtSpec(m, t)
            d = tree_dompoly(con.build_wmt(spec))
            if d != con.wmt_closed_dompoly(spec) or d.low_degree() != con.wmt_gamma(spec):
                bad.append([m, t])
    out.append(Check("W_(m,t) closed form and gamma, m <= 3, t <= 6", not bad, {"failures": bad}))
    rng = random.Random(seed)
    bad_eq, bad_lc = 0, 0
    for _ in range(caterpillars):
        legs = [rng.randint(1, 6) for _ in range(rng.randint(1, 10))]
        tree = con.build_caterpillar(legs)
        closed = con.caterpillar_dompoly_closed(legs)
        bad_eq += closed != tree_dompoly(tree)
        bad_lc += bool(analyze(closed, tree.n).break_indices)
    out.append(Check(f"legged caterpillars closed form = DP ({caterpillars} specs)", bad_eq == 0, {"mismatches": bad_eq}))
    out.append(Check(f"legged caterpillars log-concave ({caterpillars} specs)", bad_lc == 0, {"breaking": bad_lc}))
    return out


def first_main_theorem_t(m: int, t_max: int = 60) -> tuple[int | None, list[int]]:
    """Smallest t whose W_(m,t) breaks log-concavity at gamma+1, gamma+3, ..., gamma+2m-1."""
    for t in range(1, t_max + 1):
        spec = con.WmtSpec(m, t)
        breaks = analyze(con.wmt_closed_dompoly(spec), spec.n).break_indices
        if set(con.main_theorem_breaks(spec)) <= set(breaks):
            return t, list(breaks)
    return None, []


def suite_main_theorem(ms: list[int], t_max: int = 60) -> list[Check]:
    out = []
    for m in ms:
        t, breaks = first_main_theorem_t(m, t_max)
        detail: dict = {"m": m, "first_t": t}
        if t is not None:
            spec = con.WmtSpec(m, t)
            g = con.wmt_gamma(spec)
            detail.update(gamma=g, predicted=con.main_theorem_breaks(spec),
                          breaks_in_window=[k for k in breaks if k <= g + 2 * m - 1], all_breaks=breaks)
        out.append(Check(f"m={m}: {m} failures for some t <= {t_max}", t is not None, detail))
    return out


def suite_growth(m: int, t_lo: int, t_hi: int, r_max: int | None = None,
                 tol: float = GROWTH_TOLERANCE, threads: int = 1) -> list[Check]:
    r_max = min(2, 2 * m) if r_max is None else r_max
    rows = con.growth_exponents(m, r_max, t_lo, t_hi, threads)
    out = []
    for r in range(r_max + 1):
        target = con.growth_exponent_target(r)
        vals = [row.ratios[r] for row in rows]
        ok = all(v is not None and abs(v - target) <= tol for v in vals)
        out.append(Check(f"m={m} r={r}: log2 ratio within {tol} of {target}", ok,
                         {"t": [row.t for row in rows], "log2_ratio": vals, "target": target}))
    return out


def suite_polytope(samples: int = 10**6, seed: int = 0, threads: int = 1,
                   extra: Graph | None = None) -> list[Check]:
    k2 = Graph.from_edges(2, [(0, 1)])
    p3 = Graph.from_edges(3, [(0, 1), (1, 2)])
    out = []
    grid = [1.0, 1.25, 1.5, 1.75, 2.0]
    cert = lc_certificate(k2, grid, samples, seed, threads=threads)
    dev = [abs(e.estimate - (2 - e.k)) for e in cert.estimates]
    ok = all(abs(e.estimate - (2 - e.k)) <= 4 * e.std_error + 1e-12 for e in cert.estimates)
    out.append(Check("K2 slices match 2-k within 4 SE", ok, {"deviation": dev}))
    out.append(Check("K2 certificate has no 3-sigma violations", not cert.violations, cert.to_json()))
    est = slice_volume(p3, 1.5, samples, seed, threads)
    out.append(Check("P3 slice at k=1.5 matches 1/8 within 4 SE",
                     abs(est.estimate - 0.125) <= 4 * est.std_error, {"estimate": est.estimate, "se": est.std_error}))
    cert = lc_certificate(p3, [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0], samples, seed, threads=threads)
    out.append(Check("P3 certificate has no 3-sigma violations", not cert.violations, cert.to_json()))
    if extra is not None:
        cert = lc_certificate(extra, [float(k) for k in range(extra.n + 1)], samples, seed, threads=threads)
        out.append(Check(f"{extra.n}-vertex graph certificate has no 3-sigma violations",
                         not cert.violations, cert.to_json()))
    return out


def suite_bounds(trees: int = 1000, graphs: int = 1000, seed: int = 0,
                 tree_max_n: int = 40, graph_max_n: int = 12, upper_dom_max_n: int = 16) -> list[Check]:
    rng = random.Random(seed)
    bad_t, with_upper = [], 0
    for _ in range(trees):
        n = rng.randint(2, tree_max_n)
        t = random_tree(n, rng)
        d = tree_dompoly(t)
        caps = None
        if n <= upper_dom_max_n:
            caps = (d.low_degree(), upper_domination_number(t.to_graph()))
            with_upper += 1
        v = check_bounds(d, n, is_tree=True, has_isolated=False, gamma_caps=caps)
        if v:
            bad_t.append({"prufer": t.edges, "violations": [x.to_json() for x in v]})
    bad_g = []
    for _ in range(graphs):
        n = rng.randint(1, graph_max_n)
        g = random_connected_graph(n, rng.random() * 0.6, rng)
        v = check_bounds(brute_force(g), n, is_tree=False, has_isolated=g.has_isolated())
        if v:
            bad_g.append({"edges": g.edges, "violations": [x.to_json() for x in v]})
    return [
        Check(f"bounds hold on {trees} random trees (n <= {tree_max_n})", not bad_t,
              {"failures": bad_t[:5], "with_upper_domination": with_upper}),
        Check(f"bounds hold on {graphs} random connected graphs (n <= {graph_max_n})", not bad_g,
              {"failures": bad_g[:5]}),
    ]
