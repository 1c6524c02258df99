from __future__ import annotations

import pytest

from domseq.graphs import Graph
from domseq.polytope import in_polytope, lc_certificate, parse_grid, slice_volume

K2 = Graph.from_edges(2, [(0, 1)])
P3 = Graph.from_edges(3, [(0, 1), (1, 2)])


def test_membership_examples():
    assert in_polytope(K2, [1, 0])
    assert not in_polytope(K2, [0.4, 0.4])
    assert in_polytope(P3, [0, 1, 0])
    assert not in_polytope(P3, [1.2, 0, 0])
    with pytest.raises(ValueError):
        in_polytope(P3, [1, 0])


def test_dominating_set_indicators_are_the_integer_points():
    from itertools import product
    from domseq.dompoly import brute_force

    counts = [0] * 4
    for x in product((0, 1), repeat=3):
        if in_polytope(P3, x):
            counts[sum(x)] += 1
    assert counts == brute_force(P3).padded(4)


# analytic projected lengths/areas: K2 slice at k is x1 in [k-1, 1] -> 2-k;
# P3 at k=1.5 is {x0, x2 in [0, 1/2], x0 + x2 >= 1/2} -> 1/8; P3 at k=1 is a point
@pytest.mark.parametrize("g, k, exact", [(K2, 1.5, 0.5), (P3, 1.5, 0.125), (P3, 1.0, 0.0), (K2, 2.0, 0.0)])
def test_analytic_slices(g, k, exact):
    est = slice_volume(g, k, 10**6, seed=1)
    assert abs(est.estimate - exact) <= 4 * est.std_error + 1e-12


def test_std_error_formula():
    est = slice_volume(K2, 1.5, 1000, seed=3)
    p = est.estimate
    assert est.std_error == pytest.approx((p * (1 - p) / 1000) ** 0.5)
    assert 0 <= p <= 1


def test_bit_reproducible_and_thread_independent():
    a = slice_volume(P3, 1.7, 200_000, seed=9)
    b = slice_volume(P3, 1.7, 200_000, seed=9)
    c = slice_volume(P3, 1.7, 200_000, seed=9, threads=4)
    assert a == b == c
    assert slice_volume(P3, 1.7, 200_000, seed=10) != a


def test_zero_below_lp_minimum():
    assert slice_volume(P3, 0.0, 10_000).estimate == 0.0
    assert slice_volume(K2, 0.5, 10_000).estimate == 0.0


def test_certificate_single_point_and_k2():
    assert lc_certificate(K2, [1.5], 1000).violations == []
    cert = lc_certificate(K2, parse_grid("1.0:2.0:0.25"), 10**5, seed=2)
    assert cert.violations == []
    assert [e.k for e in cert.estimates] == [1.0, 1.25, 1.5, 1.75, 2.0]
    rep = cert.to_json()
    assert set(rep) >= {"k", "estimate", "std_error", "violations"}


def test_certificate_rejects_uneven_grid():
    with pytest.raises(ValueError):
        lc_certificate(K2, [1.0, 1.2, 1.9], 100)


def test_parse_grid():
    assert parse_grid("0:1:0.5") == [0.0, 0.5, 1.0]
    assert parse_grid("1,2,3") == [1.0, 2.0, 3.0]
