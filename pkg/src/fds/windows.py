"""Window-maximization machinery shared by the estimators.

A window (m, m') encodes the scale pair R = 2**-m, r = 2**-m'.  Estimators
maximize exponents of the form (S[m'] - S[m]) / (m' - m) or
log2(count(m, m')) / (m' - m) over large window fans.  This module holds:

* exact integer fine-level rules for rational theta and for theta**(1/n),
* an offline suffix-hull sweep answering batches of "best m' >= lo from
  coarse level m" slope queries exactly,
* run-length tables that give, for one tree level m', the largest number
  of indices sharing a single level-m ancestor, for every m at once.

All scale arithmetic is integer-exact; floating point only enters when a
finished exponent is reported.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Sequence

import numpy as np

__all__ = [
    "ceil_div",
    "iroot",
    "RationalScale",
    "RootScale",
    "suffix_slope_max",
    "runlen_table",
]


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def iroot(x: int, n: int) -> int:
    """floor(x ** (1/n)) for non-negative integer x via Newton iteration."""
    if x < 0:
        raise ValueError("negative radicand")
    if n < 1:
        raise ValueError("root order must be >= 1")
    if x == 0 or n == 1:
        return x
    if n == 2:
        return isqrt(x)
    z = 1 << ceil_div(x.bit_length(), n)
    while True:
        y = ((n - 1) * z + x // z ** (n - 1)) // n
        if y >= z:
            break
        z = y
    while z**n > x:
        z -= 1
    return z


class RationalScale:
    """Fine-level rule m' = ceil(m / theta) for rational theta in (0, 1).

    Rounding up keeps r = 2**-m' at or below R**(1/theta), matching the
    inequality direction of the spectrum definitions.
    """

    __slots__ = ("p", "q")

    def __init__(self, theta: Fraction):
        theta = Fraction(theta)
        if not 0 < theta < 1:
            raise ValueError(f"theta must lie strictly in (0, 1), got {theta}")
        self.p = theta.numerator
        self.q = theta.denominator

    def fine(self, m: int) -> int:
        return ceil_div(m * self.q, self.p)

    def fine_array(self, marr: np.ndarray) -> np.ndarray:
        if int(marr[-1]) * self.q >= (1 << 62):
            return np.array([self.fine(int(m)) for m in marr], dtype=np.int64)
        return (marr * self.q + self.p - 1) // self.p

    def max_coarse(self, depth: int) -> int:
        """Largest m with fine(m) <= depth."""
        return depth * self.p // self.q

    def contains(self, m: int, m_prime: int) -> bool:
        """Ratio predicate m / m' <= theta, exact."""
        return m * self.q <= m_prime * self.p

    def theta_float(self) -> float:
        return self.p / self.q

    def __repr__(self) -> str:
        return f"RationalScale({self.p}/{self.q})"


class RootScale:
    """Fine-level rule m' = ceil(m / theta ** (1/n)), integer-exact."""

    __slots__ = ("p", "q", "n")

    def __init__(self, theta: Fraction, n: int):
        theta = Fraction(theta)
        if not 0 < theta < 1:
            raise ValueError(f"theta must lie strictly in (0, 1), got {theta}")
        if n < 1:
            raise ValueError("root order must be >= 1")
        self.p = theta.numerator
        self.q = theta.denominator
        self.n = n

    def fine(self, m: int) -> int:
        # smallest z with z**n * p >= m**n * q
        x = m**self.n * self.q
        z = iroot(ceil_div(x, self.p), self.n)
        while z**self.n * self.p < x:
            z += 1
        return z

    def fine_array(self, marr: np.ndarray) -> np.ndarray:
        return np.array([self.fine(int(m)) for m in marr], dtype=np.int64)

    def max_coarse(self, depth: int) -> int:
        # largest m with m**n * q <= depth**n * p
        x = depth**self.n * self.p
        m = iroot(x // self.q, self.n)
        while (m + 1) ** self.n * self.q <= x:
            m += 1
        while m**self.n * self.q > x:
            m -= 1
        return m

    def contains(self, m: int, m_prime: int) -> bool:
        return m**self.n * self.q <= m_prime**self.n * self.p

    def theta_float(self) -> float:
        return (self.p / self.q) ** (1.0 / self.n)

    def __repr__(self) -> str:
        return f"RootScale(({self.p}/{self.q})**(1/{self.n}))"


def suffix_slope_max(
    S: Sequence[int], queries: Sequence[tuple[int, int]]
) -> list[tuple[int, int, int]]:
    """Maximize (S[j] - S[m]) / (j - m) over j in [lo, len(S)-1] per query.

    S is a non-decreasing integer sequence of prefix counts.  Each query is
    a pair (m, lo) with m < lo <= len(S)-1.  Returns, aligned with the
    queries, the exact maximizing fraction as (numerator, denominator, j*);
    value ties resolve to the smallest j.

    Queries are processed offline by descending lo while the points
    (j, S[j]) are folded right-to-left into an upper convex hull; the best
    slope from (m, S[m]) to the admissible suffix is then found by binary
    search along the hull.  Everything is exact integer arithmetic.
    """
    depth = len(S) - 1
    order = sorted(range(len(queries)), key=lambda i: queries[i][1], reverse=True)
    hx: list[int] = []
    hy: list[int] = []
    out: list[tuple[int, int, int]] = [(0, 1, 0)] * len(queries)
    nxt = depth
    for qi in order:
        m, lo = queries[qi]
        if not m < lo <= depth:
            raise ValueError(f"bad query (m={m}, lo={lo}) for depth {depth}")
        while nxt >= lo:
            x = nxt
            y = S[nxt]
            # pop the current leftmost B while it sits on/below the chord
            # from the new point to the vertex right of B
            while len(hx) > 1 and (hx[-2] - x) * (hy[-1] - y) - (hy[-2] - y) * (
                hx[-1] - x
            ) <= 0:
                hx.pop()
                hy.pop()
            hx.append(x)
            hy.append(y)
            nxt -= 1
        sm = S[m]
        n = len(hx)
        # hull is stored right-to-left; search left-to-right rank k for the
        # first vertex whose successor stops improving the chord slope
        lo_k, hi_k = 0, n - 1
        while lo_k < hi_k:
            mid = (lo_k + hi_k) >> 1
            ia = n - 1 - mid
            ib = ia - 1
            if (hy[ib] - sm) * (hx[ia] - m) > (hy[ia] - sm) * (hx[ib] - m):
                lo_k = mid + 1
            else:
                hi_k = mid
        i = n - 1 - lo_k
        out[qi] = (hy[i] - sm, hx[i] - m, hx[i])
    return out


def runlen_table(xs: Sequence[int]) -> np.ndarray:
    """Largest ancestor multiplicity per window width, for one tree level.

    xs holds the sorted, distinct indices present at some level m'.  Two
    indices share their level-(m' - d) ancestor exactly when their XOR fits
    in d bits, so the count below the best level-(m' - d) node is the
    longest run of consecutive entries whose adjacent XOR widths are all
    <= d.  Adjacent gaps are merged in increasing width order, recording
    the running maximum; entry d of the result is that maximum (clamp d to
    the last entry for widths beyond the largest gap).
    """
    n = len(xs)
    if n == 0:
        return np.zeros(1, dtype=np.int64)
    if n == 1:
        return np.ones(1, dtype=np.int64)
    gaps = [(a ^ b).bit_length() for a, b in zip(xs, xs[1:])]
    maxg = max(gaps)
    buckets: list[list[int]] = [[] for _ in range(maxg + 1)]
    for i, g in enumerate(gaps):
        buckets[g].append(i)
    left = list(range(n))
    right = list(range(n))
    best = np.empty(maxg + 1, dtype=np.int64)
    best[0] = 1
    cur = 1
    for d in range(1, maxg + 1):
        for i in buckets[d]:
            l = left[i]
            r = right[i + 1]
            left[r] = l
            right[l] = r
            if r - l + 1 > cur:
                cur = r - l + 1
        best[d] = cur
    return best
