"""Exact integer polynomials and shape analysis of coefficient sequences.

Coefficients are Python ints, so nothing here ever overflows.  Large
products go through Kronecker substitution (pack both operands into one
big integer, multiply once, unpack), which is much faster than the
schoolbook loop once polynomials have a few dozen terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

# below this many terms in the shorter operand the schoolbook product wins
_KRONECKER_CUTOFF = 12


class PolyError(ValueError):
    pass


def _trim(coeffs: Sequence[int]) -> tuple[int, ...]:
    end = len(coeffs)
    while end and coeffs[end - 1] == 0:
        end -= 1
    return tuple(coeffs[:end])


@dataclass(frozen=True)
class IntPoly:
    """Polynomial with nonnegative integer coefficients; index = degree."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        c = _trim(tuple(int(v) for v in self.coeffs))
        if any(v < 0 for v in c):
            raise PolyError(f"negative coefficient in {list(c)}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def x(cls, power: int = 1, coeff: int = 1) -> IntPoly:
        return cls((0,) * power + (coeff,))

    @classmethod
    def const(cls, c: int) -> IntPoly:
        return cls((c,))

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, j: int) -> int:
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return 0

    def padded(self, length: int) -> list[int]:
        if length < len(self.coeffs):
            raise PolyError(f"polynomial of degree {self.degree} does not fit length {length}")
        return list(self.coeffs) + [0] * (length - len(self.coeffs))

    def low_degree(self) -> int:
        """Index of the first nonzero coefficient."""
        for j, c in enumerate(self.coeffs):
            if c:
                return j
        raise PolyError("zero polynomial has no lowest term")

    def shift(self, k: int) -> IntPoly:
        """Multiply by x**k."""
        if not self.coeffs:
            return self
        return IntPoly((0,) * k + self.coeffs)

    def divide_by_x(self, k: int = 1) -> IntPoly:
        """Exact division by x**k; raises if the division leaves a remainder."""
        if any(self.coeffs[:k]):
            raise PolyError(f"not divisible by x^{k}: {list(self.coeffs)}")
        return IntPoly(self.coeffs[k:])

    def __call__(self, value: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def __add__(self, other: IntPoly) -> IntPoly:
        return add(self, other)

    def __sub__(self, other: IntPoly) -> IntPoly:
        return sub(self, other)

    def __mul__(self, other: IntPoly) -> IntPoly:
        return mul(self, other)

    def __pow__(self, e: int) -> IntPoly:
        return power(self, e)

    def __repr__(self) -> str:
        return f"IntPoly({list(self.coeffs)})"

    def to_json(self, length: int | None = None) -> list[str]:
        """Coefficients as decimal strings (word-size safe interchange)."""
        seq = self.padded(length) if length is not None else list(self.coeffs)
        return [str(c) for c in seq]

    @classmethod
    def from_json(cls, data: Iterable[str | int]) -> IntPoly:
        return cls(tuple(int(v) for v in data))


ZERO = IntPoly()
ONE = IntPoly((1,))
X = IntPoly((0, 1))


def add(p: IntPoly, q: IntPoly) -> IntPoly:
    a, b = p.coeffs, q.coeffs
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return IntPoly(out)


def sub(p: IntPoly, q: IntPoly) -> IntPoly:
    """p - q; the result must stay nonnegative."""
    out = list(p.coeffs) + [0] * max(0, len(q.coeffs) - len(p.coeffs))
    for i, c in enumerate(q.coeffs):
        out[i] -= c
    return IntPoly(out)


def _mul_schoolbook(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _pack(coeffs: Sequence[int], digits: int) -> int:
    # highest degree first so the hex string reads most-significant first
    return int("".join(format(c, "x").zfill(digits) for c in reversed(coeffs)), 16)


def _mul_kronecker(a: Sequence[int], b: Sequence[int]) -> list[int]:
    bound = max(a).bit_length() + max(b).bit_length() + min(len(a), len(b)).bit_length() + 1
    digits = -(-bound // 4)
    prod = _pack(a, digits) * _pack(b, digits)
    size = len(a) + len(b) - 1
    text = format(prod, "x").zfill(size * digits)
    return [int(text[(size - 1 - i) * digits:(size - i) * digits], 16) for i in range(size)]


def mul(p: IntPoly, q: IntPoly) -> IntPoly:
    a, b = p.coeffs, q.coeffs
    if not a or not b:
        return ZERO
    if min(len(a), len(b)) < _KRONECKER_CUTOFF:
        return IntPoly(_mul_schoolbook(a, b))
    return IntPoly(_mul_kronecker(a, b))


def power(p: IntPoly, e: int) -> IntPoly:
    if e < 0:
        raise PolyError("negative exponent")
    result, base = ONE, p
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def product(polys: Iterable[IntPoly]) -> IntPoly:
    result = ONE
    for p in polys:
        result = mul(result, p)
    return result


# --------------------------------------------------------------------------
# sequence shape analysis
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LCReport:
    n: int
    gamma: int
    break_indices: tuple[int, ...]
    unimodal: bool
    mode_range: tuple[int, int]
    sequence: tuple[int, ...] = field(repr=False, default=())

    @property
    def log_concave(self) -> bool:
        return not self.break_indices

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "sequence": [str(c) for c in self.sequence],
            "gamma": self.gamma,
            "break_indices": list(self.break_indices),
            "log_concave": self.log_concave,
            "unimodal": self.unimodal,
            "mode_range": list(self.mode_range),
        }


def _as_sequence(p: IntPoly | Sequence[int], n: int) -> list[int]:
    if isinstance(p, IntPoly):
        return p.padded(n + 1)
    seq = [int(c) for c in p]
    if len(seq) > n + 1 and any(seq[n + 1:]):
        raise PolyError(f"sequence longer than n+1 = {n + 1}")
    return (seq + [0] * (n + 1))[: n + 1]


def is_unimodal(seq: Sequence[int]) -> bool:
    i, last = 0, len(seq) - 1
    while i < last and seq[i] <= seq[i + 1]:
        i += 1
    while i < last and seq[i] >= seq[i + 1]:
        i += 1
    return i == last


def log_concavity_breaks(seq: Sequence[int]) -> list[int]:
    """Indices k with seq[k]**2 < seq[k-1]*seq[k+1] (strict)."""
    return [k for k in range(1, len(seq) - 1) if seq[k] * seq[k] < seq[k - 1] * seq[k + 1]]


def analyze(p: IntPoly | Sequence[int], n: int) -> LCReport:
    seq = _as_sequence(p, n)
    if not any(seq):
        raise PolyError("no dominating sets: all-zero sequence")
    gamma = next(j for j, c in enumerate(seq) if c)
    top = max(seq)
    modes = [j for j, c in enumerate(seq) if c == top]
    return LCReport(
        n=n,
        gamma=gamma,
        break_indices=tuple(log_concavity_breaks(seq)),
        unimodal=is_unimodal(seq),
        mode_range=(modes[0], modes[-1]),
        sequence=tuple(seq),
    )


# --------------------------------------------------------------------------
# monotone-range theorems as a cross-check harness
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundViolation:
    bound: str
    lo: int
    hi: int
    index: int  # first k in [lo, hi) where the required monotonicity fails

    def to_json(self) -> dict:
        return {"bound": self.bound, "range": [self.lo, self.hi], "index": self.index}


def _check_run(seq: Sequence[int], lo: int, hi: int, increasing: bool) -> int | None:
    lo, hi = max(lo, 0), min(hi, len(seq) - 1)
    for k in range(lo, hi):
        if (seq[k] > seq[k + 1]) if increasing else (seq[k] < seq[k + 1]):
            return k
    return None


def check_bounds(
    p: IntPoly | Sequence[int],
    n: int,
    is_tree: bool = False,
    has_isolated: bool = False,
    gamma_caps: tuple[int, int] | None = None,
) -> list[BoundViolation]:
    """Return every known monotone-range theorem the sequence violates.

    Nondecreasing up to ceil(n/2) holds for all graphs; nonincreasing from
    floor(3n/4) holds without isolated vertices (starting one index
    earlier already fails for K2 and P3).  For trees the rising
    run d_gamma..d_floor((n+2*gamma+1)/3) is checked, and when the upper
    domination number is supplied through ``gamma_caps = (gamma, Gamma)``
    so is the falling run from ceil((n+2*Gamma-2)/3).  An empty list is
    the only correct answer for a genuine domination polynomial.
    """
    seq = _as_sequence(p, n)
    checks: list[tuple[str, int, int, bool]] = [("rising-half", 0, -(-n // 2), True)]
    if not has_isolated:
        checks.append(("falling-tail", 3 * n // 4, n, False))
    if is_tree:
        gamma = gamma_caps[0] if gamma_caps else next((j for j, c in enumerate(seq) if c), 0)
        checks.append(("tree-rising", gamma, (n + 2 * gamma + 1) // 3, True))
        if gamma_caps is not None:
            upper = gamma_caps[1]
            checks.append(("tree-falling", -(-(n + 2 * upper - 2) // 3), n, False))
    out = []
    for name, lo, hi, inc in checks:
        k = _check_run(seq, lo, hi, inc)
        if k is not None:
            out.append(BoundViolation(name, lo, hi, k))
    return out


def log2_ratio(a: int, b: int) -> float:
    """log2(a/b) for positive big integers without float overflow."""
    return math.log2(a) - math.log2(b)
