"""Symbolic homogeneous Moran sets and shifted-scaled unions of them.

A branching schedule lists, per level j = 1..depth, how many children
(1 or 2) every surviving dyadic interval keeps.  Homogeneity makes every
covering count a power of two that reads off the prefix sums of branching
levels, so spectra can be evaluated analytically at depths far beyond
materialization.  A composite set places several schedules at dyadic
shifts 2**-e (component i occupies [2**-e_i, 2**-e_i+1)) together with the
origin, the union construction used for prescribed concave spectra.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .dyadic import DyadicTree, embed, merge
from .errors import BudgetError
from .windows import suffix_slope_max

__all__ = [
    "BranchingSchedule",
    "CompositeSet",
    "SpectrumPoint",
    "analytic_local_count",
    "analytic_alpha",
    "analytic_spectrum",
    "analytic_upper",
    "materialize",
    "materialize_composite",
    "composite_spectrum",
    "composite_upper",
]

MAX_MATERIALIZE_NODES = 1 << 22


@dataclass(frozen=True)
class SpectrumPoint:
    """One maximized window exponent with its witness window.

    `part` identifies the piece of a composite that realized the maximum
    (-1 for the node containing the origin, otherwise a component index);
    it is 0 for plain schedules.
    """

    value: Fraction | float
    m: int
    m_prime: int
    part: int = 0


class BranchingSchedule:
    """Run-length encoded child counts c_j in {1, 2} for levels 1..depth."""

    __slots__ = ("runs", "depth", "_ends", "_sends", "_snp")

    def __init__(self, runs: Iterable[tuple[int, int]]):
        norm: list[tuple[int, int]] = []
        for cnt, c in runs:
            cnt = int(cnt)
            c = int(c)
            if cnt <= 0:
                raise ValueError(f"run length must be positive, got {cnt}")
            if c not in (1, 2):
                raise ValueError(f"child count must be 1 or 2, got {c}")
            if norm and norm[-1][1] == c:
                norm[-1] = (norm[-1][0] + cnt, c)
            else:
                norm.append((cnt, c))
        self.runs: tuple[tuple[int, int], ...] = tuple(norm)
        ends: list[int] = []
        sends: list[int] = []
        pos = 0
        acc = 0
        for cnt, c in self.runs:
            pos += cnt
            acc += cnt if c == 2 else 0
            ends.append(pos)
            sends.append(acc)
        self.depth = pos
        self._ends = ends
        self._sends = sends
        self._snp: np.ndarray | None = None

    def prefix(self, m: int) -> int:
        """Number of branching levels among 1..m (the log2 of the level count)."""
        if not 0 <= m <= self.depth:
            raise ValueError(f"level {m} outside [0, {self.depth}]")
        if m == 0:
            return 0
        i = bisect_left(self._ends, m)
        start = self._ends[i - 1] if i else 0
        base = self._sends[i - 1] if i else 0
        return base + (m - start if self.runs[i][1] == 2 else 0)

    def prefix_array(self) -> np.ndarray:
        """S[0..depth] as int64, cached."""
        if self._snp is None:
            incs = np.zeros(self.depth + 1, dtype=np.int64)
            pos = 1
            for cnt, c in self.runs:
                if c == 2:
                    incs[pos : pos + cnt] = 1
                pos += cnt
            self._snp = np.cumsum(incs, dtype=np.int64)
        return self._snp

    def child_count(self, j: int) -> int:
        """c_j for 1 <= j <= depth."""
        if not 1 <= j <= self.depth:
            raise ValueError(f"level {j} outside [1, {self.depth}]")
        return self.runs[bisect_left(self._ends, j)][1]

    def __eq__(self, other) -> bool:
        return isinstance(other, BranchingSchedule) and self.runs == other.runs

    def __hash__(self):
        return hash(self.runs)

    def __repr__(self) -> str:
        return f"BranchingSchedule(depth={self.depth}, runs={len(self.runs)})"


def analytic_local_count(s: BranchingSchedule, m: int, m_prime: int) -> int:
    """Branching levels in (m, m']; every level-m node has exactly
    2**analytic_local_count descendants at level m_prime."""
    if not 0 <= m < m_prime <= s.depth:
        raise ValueError(f"window ({m}, {m_prime}) outside schedule depth {s.depth}")
    return s.prefix(m_prime) - s.prefix(m)


def analytic_alpha(s: BranchingSchedule, m: int, m_prime: int) -> Fraction:
    """Exact window exponent (S[m'] - S[m]) / (m' - m), in [0, 1]."""
    return Fraction(analytic_local_count(s, m, m_prime), m_prime - m)


def analytic_spectrum(s: BranchingSchedule, theta, m_range: tuple[int, int]) -> SpectrumPoint:
    """Max of analytic_alpha(m, fine(m)) over m in m_range, fine = ceil(m/theta).

    The whole range must fit: fine(m_hi) <= depth.  Ties resolve to the
    smallest m.
    """
    scale = _as_scale(theta)
    lo, hi = _check_range(s.depth, scale, m_range)
    S = s.prefix_array()
    best_n, best_d, best_m, best_mp = -1, 1, lo, lo + 1
    for m in range(lo, hi + 1):
        mp = scale.fine(m)
        n = int(S[mp] - S[m])
        d = mp - m
        if n * best_d > best_n * d:
            best_n, best_d, best_m, best_mp = n, d, m, mp
    return SpectrumPoint(Fraction(best_n, best_d), best_m, best_mp)


def analytic_upper(s: BranchingSchedule, theta, m_range: tuple[int, int]) -> SpectrumPoint:
    """Max of analytic_alpha(m, m') over m in m_range and m' in [fine(m), depth]."""
    scale = _as_scale(theta)
    lo, hi = _check_range(s.depth, scale, m_range)
    S = [int(v) for v in s.prefix_array()]
    queries = [(m, scale.fine(m)) for m in range(lo, hi + 1)]
    results = suffix_slope_max(S, queries)
    best = None
    for (m, _), (n, d, j) in zip(queries, results):
        cand = (Fraction(n, d), -m, -j)
        if best is None or cand > best:
            best = cand
    assert best is not None
    return SpectrumPoint(best[0], -best[1], -best[2])


def materialize(
    s: BranchingSchedule, max_nodes: int = MAX_MATERIALIZE_NODES
) -> DyadicTree:
    """Expand the schedule into a tree, keeping the left child always and
    the right child exactly at branching levels."""
    total = 0
    S = 0
    pos = 0
    for cnt, c in s.runs:
        for _ in range(cnt):
            pos += 1
            if c == 2:
                S += 1
            total += 1 << S
            if total > max_nodes:
                raise BudgetError(
                    f"materializing depth {s.depth} needs more than {max_nodes} nodes"
                )
    levels: list[tuple[int, ...]] = [(0,)]
    cur: tuple[int, ...] = (0,)
    j = 0
    for cnt, c in s.runs:
        for _ in range(cnt):
            j += 1
            if c == 2:
                cur = tuple(2 * k + b for k in cur for b in (0, 1))
            else:
                cur = tuple(2 * k for k in cur)
            levels.append(cur)
    return DyadicTree(levels)


class CompositeSet:
    """Shifted-scaled schedules 2**-e_i * F_i + 2**-e_i, plus the origin.

    Shifts are strictly increasing positive integers, so the components
    occupy pairwise disjoint intervals [2**-e_i, 2**-e_i+1).  Below its own
    depth a component continues along left endpoints (no further
    branching), mirroring DyadicTree.merge.
    """

    __slots__ = ("components", "include_origin", "_ext", "_origin_logs")

    def __init__(
        self,
        components: Iterable[tuple[int, BranchingSchedule]],
        include_origin: bool = True,
    ):
        comps = tuple((int(e), s) for e, s in components)
        shifts = [e for e, _ in comps]
        if any(e < 1 for e in shifts):
            raise ValueError("shifts must be >= 1 so components stay inside [0, 1]")
        if any(b <= a for a, b in zip(shifts, shifts[1:])):
            raise ValueError("shifts must be strictly increasing")
        self.components = comps
        self.include_origin = bool(include_origin)
        self._ext: dict[int, np.ndarray] = {}
        self._origin_logs: dict[int, np.ndarray] = {}

    @property
    def depth(self) -> int:
        return max((e + s.depth for e, s in self.components), default=0)

    @property
    def shifts(self) -> list[int]:
        return [e for e, _ in self.components]

    def extended_prefix(self, i: int) -> np.ndarray:
        """Component i's prefix counts on local levels 0..depth-e_i, frozen
        beyond its own depth (left-endpoint continuation)."""
        arr = self._ext.get(i)
        if arr is None:
            e, s = self.components[i]
            span = self.depth - e
            S = s.prefix_array()
            if span > s.depth:
                tail = np.full(span - s.depth, S[-1], dtype=np.int64)
                arr = np.concatenate([S, tail])
            else:
                arr = S[: span + 1]
            self._ext[i] = arr
        return arr

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CompositeSet)
            and self.components == other.components
            and self.include_origin == other.include_origin
        )

    def __repr__(self) -> str:
        return (
            f"CompositeSet(components={len(self.components)}, depth={self.depth}, "
            f"origin={self.include_origin})"
        )


def materialize_composite(
    cs: CompositeSet, max_nodes: int = MAX_MATERIALIZE_NODES
) -> DyadicTree:
    trees = [embed(materialize(s, max_nodes), e) for e, s in cs.components]
    return merge(trees, include_origin=cs.include_origin, depth=cs.depth)


def _as_scale(theta):
    from .windows import RationalScale

    if hasattr(theta, "fine"):
        return theta
    return RationalScale(Fraction(theta))


def _check_range(depth: int, scale, m_range: tuple[int, int]) -> tuple[int, int]:
    lo, hi = m_range
    if not 1 <= lo <= hi:
        raise ValueError(f"bad coarse range [{lo}, {hi}]")
    top = scale.max_coarse(depth)
    if hi > top:
        raise ValueError(
            f"window ({hi}, {scale.fine(hi)}) exceeds depth {depth}; "
            f"coarse levels are limited to {top} at this theta"
        )
    return lo, hi


def origin_log_counts(cs: CompositeSet, bucket: int) -> np.ndarray:
    """log2 of the descendant count of the level-m node at index 0, per fine
    level m', for coarse levels m with bucket = #shifts <= m.

    The node at index 0 contains the origin and every component shifted
    deeper than m.  Its level-m' count is the index-0 chain (present when
    the origin is included or some component lies deeper than m') plus, for
    each contained component, one interval while m' is at or above its
    shift and 2**S_i(m' - e_i) below it.  Computed in floats via
    max-normalized exponentials; exact powers of two keep this
    deterministic.
    """
    logs = cs._origin_logs.get(bucket)
    if logs is not None:
        return logs
    D = cs.depth
    shifts = cs.shifts
    mprimes = np.arange(D + 1, dtype=np.int64)
    exps: list[np.ndarray] = []
    for i in range(bucket, len(cs.components)):
        e, s = cs.components[i]
        loc = np.clip(mprimes - e, 0, None)
        ex = cs.extended_prefix(i)[loc].astype(np.float64)
        exps.append(np.where(mprimes >= e, ex, -np.inf))
    deepest = shifts[-1] if shifts else -1
    chain = np.where(
        np.full(D + 1, cs.include_origin) | (mprimes < deepest), 0.0, -np.inf
    )
    exps.append(chain)
    stack = np.vstack(exps)
    top = stack.max(axis=0)
    top_safe = np.where(np.isinf(top), 0.0, top)
    total = np.exp2(stack - top_safe).sum(axis=0)
    logs = np.where(np.isinf(top), -np.inf, top_safe + np.log2(total))
    cs._origin_logs[bucket] = logs
    return logs


def _origin_coarse_limit(cs: CompositeSet) -> int:
    """Largest coarse m at which the index-0 node still contains a component."""
    return cs.shifts[-1] - 1 if cs.components else -1


def composite_spectrum(cs: CompositeSet, theta, m_range: tuple[int, int]) -> SpectrumPoint:
    """Max window exponent of the union at fixed ratio rule fine = ceil(m/theta).

    Component-interior windows are exact schedule exponents; windows from
    the node containing the origin see the summed component counts plus the
    origin chain.  The range must give at least one admissible window.
    """
    scale = _as_scale(theta)
    lo, hi = _check_range(cs.depth, scale, m_range)
    best: tuple[float, int, int, int] | None = None  # (value, -m, -mp, -part)
    for i, (e, s) in enumerate(cs.components):
        a = max(lo, e)
        if a > hi:
            continue
        marr = np.arange(a, hi + 1, dtype=np.int64)
        mp = scale.fine_array(marr)
        Sx = cs.extended_prefix(i)
        alpha = (Sx[mp - e] - Sx[marr - e]) / (mp - marr)
        k = int(np.argmax(alpha))
        cand = (float(alpha[k]), -int(marr[k]), -int(mp[k]), -i)
        if best is None or cand > best:
            best = cand
    top = min(hi, _origin_coarse_limit(cs))
    if cs.components:
        logs_cache = {}
        for m in range(lo, top + 1):
            b = bisect_left(cs.shifts, m + 1)  # components with e > m
            logs = logs_cache.get(b)
            if logs is None:
                logs = origin_log_counts(cs, b)
                logs_cache[b] = logs
            mp = scale.fine(m)
            cand = (float(logs[mp]) / (mp - m), -m, -mp, 1)  # part -1 sorts last
            if best is None or cand > best:
                best = cand
    if best is None:
        raise ValueError(f"no component admits coarse range [{lo}, {hi}]")
    value, m, mp, part = best[0], -best[1], -best[2], -best[3]
    return SpectrumPoint(value, m, mp, part)


def composite_upper(cs: CompositeSet, theta, m_range: tuple[int, int]) -> SpectrumPoint:
    """Max window exponent over m in range and every m' >= fine(m)."""
    scale = _as_scale(theta)
    lo, hi = _check_range(cs.depth, scale, m_range)
    D = cs.depth
    best: tuple[float, int, int, int] | None = None
    for i, (e, s) in enumerate(cs.components):
        a = max(lo, e)
        if a > hi:
            continue
        Sx = [int(v) for v in cs.extended_prefix(i)]
        queries = [(m - e, scale.fine(m) - e) for m in range(a, hi + 1)]
        for (lm, _), (n, d, j) in zip(queries, suffix_slope_max(Sx, queries)):
            cand = (n / d, -(lm + e), -(j + e), -i)
            if best is None or cand > best:
                best = cand
    top = min(hi, _origin_coarse_limit(cs))
    if cs.components:
        spans_all = np.arange(D + 1, dtype=np.float64)
        logs_cache = {}
        for m in range(lo, top + 1):
            b = bisect_left(cs.shifts, m + 1)
            logs = logs_cache.get(b)
            if logs is None:
                logs = origin_log_counts(cs, b)
                logs_cache[b] = logs
            f = scale.fine(m)
            alpha = logs[f:] / (spans_all[f:] - m)
            k = int(np.argmax(alpha))
            cand = (float(alpha[k]), -m, -(f + k), 1)
            if best is None or cand > best:
                best = cand
    if best is None:
        raise ValueError(f"no component admits coarse range [{lo}, {hi}]")
    value, m, mp, part = best[0], -best[1], -best[2], -best[3]
    return SpectrumPoint(value, m, mp, part)


def composite_level_logs(cs: CompositeSet, m_lo: int, m_hi: int) -> np.ndarray:
    """log2 of the union's level counts for m in [m_lo, m_hi].

    Per level: the index-0 chain (origin or a not-yet-started component),
    one interval for a component exactly at its shift, and 2**S_i(m - e_i)
    inside component i (frozen below its own depth).
    """
    if not 0 <= m_lo <= m_hi <= cs.depth:
        raise ValueError(f"level range [{m_lo}, {m_hi}] outside [0, {cs.depth}]")
    ms = np.arange(m_lo, m_hi + 1, dtype=np.int64)
    exps: list[np.ndarray] = []
    for i, (e, s) in enumerate(cs.components):
        loc = np.clip(ms - e, 0, None)
        ex = cs.extended_prefix(i)[loc].astype(np.float64)
        exps.append(np.where(ms >= e, ex, -np.inf))
    deepest = cs.shifts[-1] if cs.components else -1
    chain = np.where(
        np.full(len(ms), cs.include_origin) | (ms < deepest), 0.0, -np.inf
    )
    exps.append(chain)
    stack = np.vstack(exps)
    top = stack.max(axis=0)
    top_safe = np.where(np.isinf(top), 0.0, top)
    total = np.exp2(stack - top_safe).sum(axis=0)
    return np.where(np.isinf(top), -np.inf, top_safe + np.log2(total))
