"""Monte Carlo slice volumes of the domination polytope.

P(G) = {x in [0,1]^n : x_v + sum of x_u over neighbors u >= 1 for every v}.
The level-k slice is cut by sum(x) = k.  We measure its projection onto
the first n-1 coordinates; that differs from the intrinsic (n-1)-volume
by the constant factor sqrt(n), which leaves log-concavity in k intact.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph

# samples per RNG block; blocks, not workers, own the random streams so the
# estimate does not depend on the thread count
BLOCK_SIZE = 1 << 16

MEASURE_NOTE = "projected measure: (n-1)-volume of the slice projected onto the first n-1 coordinates"


def closed_adjacency(g: Graph) -> np.ndarray:
    """A + I as a float matrix."""
    n = g.n
    return np.array([[g.closed_nbhd[i] >> j & 1 for j in range(n)] for i in range(n)], dtype=np.float64)


def in_polytope(g: Graph, x) -> bool:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise ValueError(f"expected a vector of length {g.n}, got shape {x.shape}")
    if np.any(x < 0) or np.any(x > 1):
        return False
    return bool(np.all(closed_adjacency(g) @ x >= 1))


@dataclass(frozen=True)
class SliceEstimate:
    k: float
    estimate: float
    std_error: float
    samples: int
    seed: int
    hits: int = field(default=0, repr=False)


def _count_block(m: np.ndarray, k: float, size: int, seed: int, block: int) -> int:
    n = m.shape[0]
    rng = np.random.default_rng([seed, block])
    free = rng.random((size, n - 1))
    last = k - free.sum(axis=1)
    ok = (last >= 0) & (last <= 1)
    pts = np.column_stack([free[ok], last[ok]])
    # tiny slack so points sitting exactly on a facet are not lost to rounding
    return int(np.count_nonzero(np.all(pts @ m.T >= 1 - 1e-12, axis=1)))


def slice_volume(g: Graph, k: float, samples: int, seed: int = 0, threads: int = 1) -> SliceEstimate:
    """Rejection-sampling estimate of the projected volume of the level-k slice."""
    if g.n < 2:
        raise ValueError("slice volumes need n >= 2")
    if not 0 <= k <= g.n:
        raise ValueError(f"k must lie in [0, {g.n}]")
    if samples < 1:
        raise ValueError("samples must be positive")
    m = closed_adjacency(g)
    sizes = [BLOCK_SIZE] * (samples // BLOCK_SIZE)
    if samples % BLOCK_SIZE:
        sizes.append(samples % BLOCK_SIZE)
    jobs = list(enumerate(sizes))

    def run(job: tuple[int, int]) -> int:
        return _count_block(m, k, job[1], seed, job[0])

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            hits = sum(pool.map(run, jobs))
    else:
        hits = sum(run(j) for j in jobs)
    p = hits / samples
    return SliceEstimate(k, p, math.sqrt(p * (1 - p) / samples), samples, seed, hits)


@dataclass
class Certificate:
    estimates: list[SliceEstimate]
    violations: list[tuple[float, float, float]]
    sigma: float

    def to_json(self) -> dict:
        return {
            "measure": MEASURE_NOTE,
            "sigma": self.sigma,
            "k": [e.k for e in self.estimates],
            "estimate": [e.estimate for e in self.estimates],
            "std_error": [e.std_error for e in self.estimates],
            "violations": [list(v) for v in self.violations],
        }


def lc_certificate(
    g: Graph,
    grid: list[float],
    samples: int,
    seed: int = 0,
    sigma: float = 3.0,
    threads: int = 1,
) -> Certificate:
    """Estimate every grid slice and list triples that break log-concavity by more than ``sigma`` SEs.

    The grid must be uniformly spaced.  Each slice uses its own seed
    (seed + grid position) so slices are independent.
    """
    if len(grid) > 2:
        steps = np.diff(grid)
        if not np.allclose(steps, steps[0]):
            raise ValueError("grid spacing must be uniform")
    ests = [slice_volume(g, k, samples, seed + i, threads) for i, k in enumerate(grid)]
    violations = []
    for i in range(1, len(ests) - 1):
        lo, mid, hi = ests[i - 1], ests[i], ests[i + 1]
        gap = mid.estimate ** 2 - lo.estimate * hi.estimate
        # delta-method standard error of the gap
        se = math.sqrt(
            (2 * mid.estimate * mid.std_error) ** 2
            + (hi.estimate * lo.std_error) ** 2
            + (lo.estimate * hi.std_error) ** 2
        )
        if gap < -sigma * se:
            violations.append((lo.k, mid.k, hi.k))
    return Certificate(ests, violations, sigma)


def parse_grid(text: str) -> list[float]:
    """'lo:hi:step' (inclusive) or a comma list."""
    if ":" in text:
        lo, hi, step = (float(v) for v in text.split(":"))
        count = int(round((hi - lo) / step))
        return [round(lo + i * step, 12) for i in range(count + 1)]
    return [float(v) for v in text.split(",")]
