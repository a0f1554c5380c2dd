"""Dyadic intervals and materialized set skeletons on [0, 1].

Scales are dyadic throughout: level m names interval width 2**-m, and a
compact subset of [0, 1] is represented by the sorted indices of the
level-m intervals that meet it, for every m up to a finite depth.  Index
counts stand in for covering numbers: a set of diameter 2**-m meets at
most two level-m intervals, and the exponents extracted from window
ratios are insensitive to bounded factors like that.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from math import log2
from typing import Iterable

__all__ = [
    "DyadicInterval",
    "WindowQuery",
    "DyadicTree",
    "Violation",
    "parent",
    "children",
    "neighbors",
    "validate",
    "level_count",
    "local_count",
    "max_alpha",
    "embed",
    "merge",
]


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """The interval [index * 2**-level, (index + 1) * 2**-level)."""

    level: int
    index: int

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValueError(f"negative level {self.level}")
        if not 0 <= self.index < (1 << self.level):
            raise ValueError(f"index {self.index} out of range at level {self.level}")

    @property
    def width(self) -> Fraction:
        return Fraction(1, 1 << self.level)

    @property
    def left(self) -> Fraction:
        return Fraction(self.index, 1 << self.level)


@dataclass(frozen=True)
class WindowQuery:
    """A scale pair: coarse level m, fine level m_prime > m.

    Encodes R = 2**-m, r = 2**-m_prime; the ratio m / m_prime plays the
    role of the interpolation parameter.
    """

    m: int
    m_prime: int
    neighbor_mode: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.m < self.m_prime:
            raise ValueError(f"need m_prime > m >= 0, got ({self.m}, {self.m_prime})")

    @property
    def span(self) -> int:
        return self.m_prime - self.m


def parent(v: DyadicInterval) -> DyadicInterval:
    """The level v.level - 1 interval containing v."""
    if v.level < 1:
        raise ValueError("root interval has no parent")
    return DyadicInterval(v.level - 1, v.index >> 1)


def children(v: DyadicInterval) -> tuple[DyadicInterval, DyadicInterval]:
    """The two halves of v, one level down."""
    return (
        DyadicInterval(v.level + 1, 2 * v.index),
        DyadicInterval(v.level + 1, 2 * v.index + 1),
    )


def neighbors(v: DyadicInterval) -> tuple[DyadicInterval, ...]:
    """Same-level intervals adjacent to v, omitting any outside [0, 1]."""
    out = []
    if v.index > 0:
        out.append(DyadicInterval(v.level, v.index - 1))
    if v.index + 1 < (1 << v.level):
        out.append(DyadicInterval(v.level, v.index + 1))
    return tuple(out)


class DyadicTree:
    """Per-level sorted index tuples for the intervals meeting a compact set.

    Valid trees are prefix closed (a present node's parent is present) and
    have no dangling interior nodes (every node above the deepest level has
    a present child), so every present node owns at least one descendant at
    every deeper level.  Construction only sorts, deduplicates and
    bounds-checks; use validate() to report the structural rules on
    untrusted input.
    """

    __slots__ = ("levels", "_runtables")

    def __init__(self, levels: Iterable[Iterable[int]]):
        packed = []
        for m, idxs in enumerate(levels):
            xs = sorted({int(k) for k in idxs})
            if xs and not (0 <= xs[0] and xs[-1] < (1 << m)):
                raise ValueError(f"index out of range at level {m}")
            packed.append(tuple(xs))
        if not packed:
            packed = [()]
        self.levels: tuple[tuple[int, ...], ...] = tuple(packed)
        self._runtables: dict = {}

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def has(self, level: int, index: int) -> bool:
        if not 0 <= level <= self.depth:
            return False
        xs = self.levels[level]
        i = bisect_left(xs, index)
        return i < len(xs) and xs[i] == index

    def node_count(self) -> int:
        return sum(len(xs) for xs in self.levels)

    def is_empty(self) -> bool:
        return all(not xs for xs in self.levels)

    def __eq__(self, other) -> bool:
        return isinstance(other, DyadicTree) and self.levels == other.levels

    def __hash__(self):
        return hash(self.levels)

    def __repr__(self) -> str:
        return f"DyadicTree(depth={self.depth}, nodes={self.node_count()})"


@dataclass(frozen=True)
class Violation:
    kind: str  # "missing-parent" or "dangling"
    level: int
    index: int


def validate(t: DyadicTree) -> list[Violation]:
    """All prefix-closure and dangling-node violations, empty when valid."""
    out: list[Violation] = []
    for m in range(1, t.depth + 1):
        for k in t.levels[m]:
            if not t.has(m - 1, k >> 1):
                out.append(Violation("missing-parent", m, k))
    for m in range(t.depth):
        nxt = t.levels[m + 1]
        for k in t.levels[m]:
            i = bisect_left(nxt, 2 * k)
            if i >= len(nxt) or nxt[i] > 2 * k + 1:
                out.append(Violation("dangling", m, k))
    return out


def level_count(t: DyadicTree, m: int) -> int:
    """Number of level-m intervals meeting the set (global cover surrogate)."""
    if not 0 <= m <= t.depth:
        raise ValueError(f"level {m} outside [0, {t.depth}]")
    return len(t.levels[m])


def _range_count(xs: tuple[int, ...], lo: int, hi: int) -> int:
    return bisect_left(xs, hi) - bisect_left(xs, lo)


def local_count(
    t: DyadicTree, v: DyadicInterval, m_prime: int, neighbor_mode: bool = False
) -> int:
    """Level-m_prime nodes below v, the localized cover surrogate.

    With neighbor_mode on, nodes below v's present same-level neighbors are
    counted as well; the two modes bracket the count of a metric ball
    centered in v within constant factors.
    """
    if not t.has(v.level, v.index):
        raise ValueError(f"node ({v.level}, {v.index}) not present")
    if not v.level < m_prime <= t.depth:
        raise ValueError(f"fine level {m_prime} outside ({v.level}, {t.depth}]")
    shift = m_prime - v.level
    lo = v.index
    hi = v.index + 1
    if neighbor_mode:
        lo = max(0, v.index - 1)
        hi = min(1 << v.level, v.index + 2)
    # Descendants of consecutive same-level nodes occupy one contiguous
    # index range; absent neighbors contribute nothing by prefix closure.
    return _range_count(t.levels[m_prime], lo << shift, hi << shift)


def max_alpha(t: DyadicTree, w: WindowQuery) -> tuple[float, DyadicInterval]:
    """Window exponent: max over present level-m nodes v of
    log2(local_count(v, m_prime)) / (m_prime - m), with the witness node.

    Ties resolve to the smallest index.
    """
    if w.m_prime > t.depth:
        raise ValueError(f"fine level {w.m_prime} beyond depth {t.depth}")
    nodes = t.levels[w.m]
    if not nodes:
        raise ValueError(f"no nodes at level {w.m}")
    fine = t.levels[w.m_prime]
    shift = w.span
    best = 0
    best_k = nodes[0]
    if w.neighbor_mode:
        size = 1 << w.m
        for k in nodes:
            c = _range_count(fine, max(0, k - 1) << shift, min(size, k + 2) << shift)
            if c > best:
                best, best_k = c, k
    else:
        for k in nodes:
            c = _range_count(fine, k << shift, (k + 1) << shift)
            if c > best:
                best, best_k = c, k
    return log2(best) / shift, DyadicInterval(w.m, best_k)


def embed(t: DyadicTree, e: int) -> DyadicTree:
    """Scale by 2**-e and translate by 2**-e.

    Level m index k maps to level m + e index 2**m + k, so the image sits
    in [2**-e, 2**-(e-1)); ancestor levels 0..e-1 hold the single index 0.
    Requires e >= 1: a zero shift would land in [1, 2], outside the unit
    interval.
    """
    if e < 1:
        raise ValueError("shift must be >= 1 to stay inside [0, 1]")
    if t.is_empty():
        return DyadicTree([()] * (t.depth + e + 1))
    levels: list[tuple[int, ...]] = [(0,)] * e
    for m, xs in enumerate(t.levels):
        base = 1 << m
        levels.append(tuple(base + k for k in xs))
    return DyadicTree(levels)


def merge(
    trees: Iterable[DyadicTree], include_origin: bool = False, depth: int | None = None
) -> DyadicTree:
    """Per-level index union of several trees.

    The output depth is the maximum input depth (or `depth` if larger).  A
    shorter input is continued below its own depth along left endpoints
    (each leaf keeps its leftmost child), which preserves the represented
    set to its stated resolution while keeping the union free of dangling
    nodes.  With include_origin, index 0 is present at every level.
    """
    ts = list(trees)
    d = max([t.depth for t in ts], default=0)
    if depth is not None:
        d = max(d, depth)
    levels = []
    for m in range(d + 1):
        acc: set[int] = {0} if include_origin else set()
        for t in ts:
            if m <= t.depth:
                acc.update(t.levels[m])
            else:
                pad = m - t.depth
                acc.update(k << pad for k in t.levels[t.depth])
        levels.append(sorted(acc))
    return DyadicTree(levels)
