"""Parametric tree families and their closed-form domination polynomials.

Gadgets (all rooted at label 0, labels assigned in BFS order):

* ``L``     path u-v-w rooted at an end
* ``F_t``   root with t children, each a copy of L
* ``H_t``   root with three children, each a copy of F_t
* ``X``     path a-b rooted at a
* ``W_mt``  root with m copies of H_t and one copy of X as children

Caterpillars use their own layout: spine 0..k-1, then each spine
vertex's leaves in spine order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .graphs import Tree
from .poly import ONE, X, IntPoly, log2_ratio, power, product

# nested child lists: a rooted tree is the list of its children's subtrees
Shape = list


def shape_tree(shape: Shape) -> Tree:
    """Materialize a nested-children shape with BFS labels from the root."""
    edges = []
    queue = [shape]
    head = 0
    while head < len(queue):
        node = queue[head]
        for child in node:
            edges.append((head, len(queue)))
            queue.append(child)
        head += 1
    return Tree(len(queue), edges)


def shape_L() -> Shape:
    return [[[]]]


def shape_F(t: int) -> Shape:
    return [shape_L() for _ in range(t)]


def shape_H(t: int) -> Shape:
    return [shape_F(t) for _ in range(3)]


def shape_X() -> Shape:
    return [[]]


def shape_wmt(m: int, t: int) -> Shape:
    return [shape_H(t) for _ in range(m)] + [shape_X()]


# --------------------------------------------------------------------------
# caterpillars
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CaterpillarSpec:
    legs: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.legs:
            raise ValueError("a caterpillar needs at least one spine vertex")
        if any(a < 0 for a in self.legs):
            raise ValueError("leg counts must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.legs) + sum(self.legs)

    @property
    def legged(self) -> bool:
        return all(a >= 1 for a in self.legs)


def build_caterpillar(spec: CaterpillarSpec | Sequence[int]) -> Tree:
    legs = spec.legs if isinstance(spec, CaterpillarSpec) else tuple(spec)
    k = len(legs)
    edges = [(i, i + 1) for i in range(k - 1)]
    nxt = k
    for i, a in enumerate(legs):
        for _ in range(a):
            edges.append((i, nxt))
            nxt += 1
    return Tree(nxt, edges)


def caterpillar_dompoly_closed(spec: CaterpillarSpec | Sequence[int]) -> IntPoly:
    legs = spec.legs if isinstance(spec, CaterpillarSpec) else tuple(spec)
    if any(a == 0 for a in legs):
        raise ValueError("legless caterpillar: closed form unsupported")
    one_plus_x = ONE + X
    return product(IntPoly.x(a) + X * power(one_plus_x, a) for a in legs)


# --------------------------------------------------------------------------
# the W_{m,t} family
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class WmtSpec:
    m: int
    t: int

    def __post_init__(self) -> None:
        if self.m < 1 or self.t < 1:
            raise ValueError(f"W_(m,t) needs m >= 1 and t >= 1, got m={self.m}, t={self.t}")

    @property
    def n(self) -> int:
        return 1 + self.m * (9 * self.t + 4) + 2

    @property
    def gamma(self) -> int:
        return wmt_gamma(self)


def build_L() -> Tree:
    return shape_tree(shape_L())


def build_F(t: int) -> Tree:
    return shape_tree(shape_F(t))


def build_H(t: int) -> Tree:
    return shape_tree(shape_H(t))


def build_X() -> Tree:
    return shape_tree(shape_X())


def build_wmt(spec: WmtSpec) -> Tree:
    return shape_tree(shape_wmt(spec.m, spec.t))


def wmt_gamma(spec: WmtSpec) -> int:
    return spec.m * (3 * spec.t + 1) + 1


def pqr(t: int) -> tuple[IntPoly, IntPoly, IntPoly]:
    if t < 0:
        raise ValueError("t must be nonnegative")
    p = power(IntPoly((1, 3, 1)), t)
    q = power(IntPoly((2, 3, 1)), t)
    # exact division by x doubles as a runtime check of the closed form
    r = (p - power(IntPoly((1, 1)), t)).divide_by_x()
    return p, q, r


def uv(t: int) -> tuple[IntPoly, IntPoly]:
    p, q, r = pqr(t)
    u = power(p + X * q, 3)
    v = power(q + r, 3) - power(r, 3)
    return u, v


def wmt_closed_dompoly(spec: WmtSpec) -> IntPoly:
    m, t = spec.m, spec.t
    _, _, r = pqr(t)
    u, v = uv(t)
    gamma = wmt_gamma(spec)
    two_plus_x = IntPoly((2, 1))
    x2 = IntPoly.x(2)
    root_unchosen = two_plus_x * power(u + x2 * v, m) - IntPoly.x(2 * m) * power(v, m)
    root_chosen = two_plus_x * power(u + x2 * (v + power(r, 3)), m)
    return root_unchosen.shift(gamma) + root_chosen.shift(gamma + 1)


def wmt_shifted(spec: WmtSpec, r_max: int | None = None) -> list[int]:
    """Coefficients e_r = d_{gamma + r} of W_{m,t}, r = 0..r_max."""
    d = wmt_closed_dompoly(spec)
    g = wmt_gamma(spec)
    top = d.degree - g if r_max is None else r_max
    return [d[g + r] for r in range(top + 1)]


def growth_exponent_target(r: int) -> int:
    return r + r // 2


@dataclass(frozen=True)
class GrowthRow:
    t: int
    ratios: tuple[float | None, ...]  # None marks a zero coefficient

    def to_json(self) -> dict:
        return {"t": self.t, "log2_ratio": list(self.ratios)}


def growth_exponents(m: int, r_max: int, t_lo: int, t_hi: int, threads: int = 1) -> list[GrowthRow]:
    """log2(e_r(m, t+1) / e_r(m, t)) for 0 <= r <= r_max, t_lo <= t < t_hi."""
    if r_max > 2 * m:
        raise ValueError(f"r_max must be <= 2m = {2 * m}")
    ts = list(range(t_lo, t_hi + 1))

    def shifted(t: int) -> list[int]:
        return wmt_shifted(WmtSpec(m, t), r_max)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(shifted, ts))
    else:
        rows = [shifted(t) for t in ts]
    table = []
    for i, t in enumerate(ts[:-1]):
        cur, nxt = rows[i], rows[i + 1]
        table.append(GrowthRow(t, tuple(
            log2_ratio(nxt[r], cur[r]) if cur[r] and nxt[r] else None for r in range(r_max + 1)
        )))
    return table


def main_theorem_breaks(spec: WmtSpec) -> list[int]:
    """The predicted failure indices gamma + 2j + 1, j < m."""
    g = wmt_gamma(spec)
    return [g + 2 * j + 1 for j in range(spec.m)]
