"""Dimension estimators and identity verifiers.

Every estimate is a maximum of window exponents over a finite fan of
scale pairs, reported together with the level range and the witness
window that achieved it.  The true dimensions are limits over R -> 0; the
range is exposed in every result so convergence can be studied by
widening it.  For each theta the coarse range is clamped to
[m_lo, min(m_hi, max m with ceil(m/theta) <= depth)] and an empty clamp
is a domain error.

Exactness contract: within one set representation all estimators read the
same exponent values (integer prefix differences or cached log tables),
so the structural identities - spectrum <= upper, upper non-decreasing in
theta, and the upper/ratio-fan identity - hold with zero tolerance, while
closed-form comparisons carry an explicit tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import log2
from typing import Sequence

import numpy as np

from .dyadic import DyadicTree
from .schedule import (
    BranchingSchedule,
    CompositeSet,
    composite_level_logs,
    composite_spectrum,
    composite_upper,
    origin_log_counts,
)
from .windows import RationalScale, RootScale, runlen_table, suffix_slope_max

__all__ = [
    "SpectrumEstimate",
    "BoxEstimate",
    "QuasiAssouadEstimate",
    "VerificationReport",
    "estimate_spectrum",
    "estimate_upper",
    "estimate_box",
    "estimate_quasi_assouad",
    "verify_main_theorem",
    "verify_bound",
    "verify_chain",
    "verify_nthroot",
    "estimate_to_csv",
    "report_to_text",
]

SPECTRUM = "assouad-spectrum"
UPPER = "upper-spectrum"


@dataclass
class SpectrumEstimate:
    mode: str
    thetas: list[Fraction]
    values: list[float]
    m_range: tuple[int, int]
    witnesses: list[tuple[int, int, int]]  # (m, m_prime, node_index)


@dataclass
class BoxEstimate:
    value: float
    m_witness: int
    m_range: tuple[int, int]


@dataclass
class QuasiAssouadEstimate:
    epsilons: list[Fraction]
    values: list[float]
    witnesses: list[tuple[int, int, int]]
    headline: float
    m_range: tuple[int, int]
    trend: str


@dataclass
class VerificationReport:
    name: str
    passed: bool
    worst: float
    tol: float
    witnesses: list[str] = field(default_factory=list)


def _depth(rep) -> int:
    if isinstance(rep, (DyadicTree, BranchingSchedule, CompositeSet)):
        return rep.depth
    raise TypeError(f"unsupported set representation {type(rep).__name__}")


def _norm_range(depth: int, m_range: tuple[int, int] | None) -> tuple[int, int]:
    if m_range is None:
        return max(1, depth // 4), depth
    lo, hi = int(m_range[0]), int(m_range[1])
    if not 1 <= lo <= hi <= depth:
        raise ValueError(f"coarse range [{lo}, {hi}] invalid for depth {depth}")
    return lo, hi


def _clamp(depth: int, scale, lo: int, hi: int) -> tuple[int, int]:
    top = scale.max_coarse(depth)
    hi_eff = min(hi, top)
    if hi_eff < lo:
        raise ValueError(
            f"no admissible window: coarse level {lo} needs fine level "
            f"{scale.fine(lo)} beyond depth {depth}"
        )
    return lo, hi_eff


def _grid(thetas: Sequence) -> list[Fraction]:
    out = sorted({Fraction(t) for t in thetas})
    if not out:
        raise ValueError("empty theta grid")
    if out[0] <= 0 or out[-1] >= 1:
        raise ValueError("theta grid must lie strictly inside (0, 1)")
    return out


# ----------------------------------------------------------------------
# tree cores (neighbor mode off uses per-level run tables)


def _tree_table(tree: DyadicTree, mp: int):
    tbl = tree._runtables.get(mp)
    if tbl is None:
        counts = runlen_table(tree.levels[mp])
        tbl = (counts, np.log2(counts.astype(np.float64)))
        tree._runtables[mp] = tbl
    return tbl


def _tree_witness_node(tree: DyadicTree, m: int, mp: int) -> int:
    """Leftmost level-m ancestor holding the most level-mp indices."""
    shift = mp - m
    best = 0
    best_k = 0
    cur = 0
    cur_k = -1
    for x in tree.levels[mp]:
        k = x >> shift
        if k != cur_k:
            cur_k = k
            cur = 0
        cur += 1
        if cur > best:
            best = cur
            best_k = k
    return best_k


def _tree_pair_on(tree: DyadicTree, m: int, mp: int) -> tuple[int, int]:
    """(max neighbor-mode count, witness node) for one window."""
    from bisect import bisect_left

    fine = tree.levels[mp]
    shift = mp - m
    size = 1 << m
    best = 0
    best_k = 0
    for k in tree.levels[m]:
        lo = max(0, k - 1) << shift
        hi = min(size, k + 2) << shift
        c = bisect_left(fine, hi) - bisect_left(fine, lo)
        if c > best:
            best = c
            best_k = k
    return best, best_k


def _tree_spectrum(tree, scale, lo, hi, neighbors) -> tuple[float, int, int, int]:
    best = None
    if neighbors:
        for m in range(lo, hi + 1):
            mp = scale.fine(m)
            c, node = _tree_pair_on(tree, m, mp)
            cand = (log2(c) / (mp - m), -m, -mp)
            if best is None or cand > best:
                best = cand
                best_node = node
        return best[0], -best[1], -best[2], best_node
    for m in range(lo, hi + 1):
        mp = scale.fine(m)
        counts, logs = _tree_table(tree, mp)
        d = min(mp - m, len(counts) - 1)
        cand = (float(logs[d]) / (mp - m), -m, -mp)
        if best is None or cand > best:
            best = cand
    m, mp = -best[1], -best[2]
    return best[0], m, mp, _tree_witness_node(tree, m, mp)


def _tree_upper(tree, scale, lo, hi, neighbors) -> tuple[float, int, int, int]:
    depth = tree.depth
    best = None
    if neighbors:
        # quadratic fan scan; neighbor counts have no all-width table
        for m in range(lo, hi + 1):
            for mp in range(scale.fine(m), depth + 1):
                c, node = _tree_pair_on(tree, m, mp)
                cand = (log2(c) / (mp - m), -m, -mp)
                if best is None or cand > best:
                    best = cand
                    best_node = node
        return best[0], -best[1], -best[2], best_node
    for mp in range(scale.fine(lo), depth + 1):
        mmax = min(hi, scale.max_coarse(mp))
        if mmax < lo:
            continue
        counts, logs = _tree_table(tree, mp)
        deltas = np.arange(mp - lo, mp - mmax - 1, -1)  # m ascending
        idx = np.minimum(deltas, len(counts) - 1)
        vals = logs[idx] / deltas
        k = int(np.argmax(vals))
        cand = (float(vals[k]), -(mp - int(deltas[k])), -mp)
        if best is None or cand > best:
            best = cand
    m, mp = -best[1], -best[2]
    return best[0], m, mp, _tree_witness_node(tree, m, mp)


# ----------------------------------------------------------------------
# schedule cores


def _sched_spectrum(s, scale, lo, hi) -> tuple[float, int, int, int]:
    S = s.prefix_array()
    marr = np.arange(lo, hi + 1, dtype=np.int64)
    mp = scale.fine_array(marr)
    alpha = (S[mp] - S[marr]) / (mp - marr)
    k = int(np.argmax(alpha))
    # homogeneous: every node realizes the count; leftmost node is index 0
    return float(alpha[k]), int(marr[k]), int(mp[k]), 0


def _sched_upper_multi(s, scales, lo, hi_effs) -> list[tuple[float, int, int, int]]:
    S = [int(v) for v in s.prefix_array()]
    queries: list[tuple[int, int]] = []
    owner: list[int] = []
    for si, (scale, hi_eff) in enumerate(zip(scales, hi_effs)):
        for m in range(lo, hi_eff + 1):
            queries.append((m, scale.fine(m)))
            owner.append(si)
    results = suffix_slope_max(S, queries)
    best: list = [None] * len(scales)
    for si, (m, _), (n, d, j) in zip(owner, queries, results):
        cand = (n / d, -m, -j)
        if best[si] is None or cand > best[si]:
            best[si] = cand
    return [(b[0], -b[1], -b[2], 0) for b in best]


# ----------------------------------------------------------------------
# dispatch


def _spectrum_at(rep, scale, lo, hi_eff, neighbors) -> tuple[float, int, int, int]:
    if isinstance(rep, DyadicTree):
        return _tree_spectrum(rep, scale, lo, hi_eff, neighbors)
    if isinstance(rep, BranchingSchedule):
        return _sched_spectrum(rep, scale, lo, hi_eff)
    pt = composite_spectrum(rep, scale, (lo, hi_eff))
    return float(pt.value), pt.m, pt.m_prime, _composite_node(rep, pt)


def _composite_node(cs: CompositeSet, pt) -> int:
    if pt.part < 0:
        return 0
    e, _ = cs.components[pt.part]
    return 1 << (pt.m - e)


def estimate_spectrum(
    rep,
    theta_grid: Sequence,
    m_range: tuple[int, int] | None = None,
    neighbors: bool = False,
) -> SpectrumEstimate:
    """Window exponent at the exact ratio rule m' = ceil(m / theta), per theta."""
    depth = _depth(rep)
    lo, hi = _norm_range(depth, m_range)
    grid = _grid(theta_grid)
    values: list[float] = []
    wits: list[tuple[int, int, int]] = []
    for th in grid:
        scale = RationalScale(th)
        a, b = _clamp(depth, scale, lo, hi)
        v, m, mp, node = _spectrum_at(rep, scale, a, b, neighbors)
        values.append(v)
        wits.append((m, mp, node))
    return SpectrumEstimate(SPECTRUM, grid, values, (lo, hi), wits)


def estimate_upper(
    rep,
    theta_grid: Sequence,
    m_range: tuple[int, int] | None = None,
    neighbors: bool = False,
) -> SpectrumEstimate:
    """Window exponent maximized over every fine level m' >= ceil(m / theta)."""
    depth = _depth(rep)
    lo, hi = _norm_range(depth, m_range)
    grid = _grid(theta_grid)
    scales = [RationalScale(th) for th in grid]
    hi_effs = [_clamp(depth, sc, lo, hi)[1] for sc in scales]
    values: list[float] = []
    wits: list[tuple[int, int, int]] = []
    if isinstance(rep, BranchingSchedule):
        for v, m, mp, node in _sched_upper_multi(rep, scales, lo, hi_effs):
            values.append(v)
            wits.append((m, mp, node))
    else:
        for sc, hi_eff in zip(scales, hi_effs):
            if isinstance(rep, DyadicTree):
                v, m, mp, node = _tree_upper(rep, sc, lo, hi_eff, neighbors)
            else:
                pt = composite_upper(rep, sc, (lo, hi_eff))
                v, m, mp, node = float(pt.value), pt.m, pt.m_prime, _composite_node(rep, pt)
            values.append(v)
            wits.append((m, mp, node))
    return SpectrumEstimate(UPPER, grid, values, (lo, hi), wits)


def estimate_box(rep, m_range: tuple[int, int] | None = None) -> BoxEstimate:
    """max over m in range of log2(level count at m) / m."""
    depth = _depth(rep)
    lo, hi = _norm_range(depth, m_range)
    if isinstance(rep, DyadicTree):
        if rep.is_empty():
            raise ValueError("cannot estimate the box dimension of an empty tree")
        logs = np.log2(
            np.array([len(rep.levels[m]) for m in range(lo, hi + 1)], dtype=np.float64)
        )
    elif isinstance(rep, BranchingSchedule):
        logs = rep.prefix_array()[lo : hi + 1].astype(np.float64)
    else:
        logs = composite_level_logs(rep, lo, hi)
    ms = np.arange(lo, hi + 1, dtype=np.float64)
    vals = logs / ms
    k = int(np.argmax(vals))
    return BoxEstimate(float(vals[k]), lo + k, (lo, hi))


def estimate_quasi_assouad(
    rep,
    epsilons: Sequence,
    m_range: tuple[int, int] | None = None,
    neighbors: bool = False,
) -> QuasiAssouadEstimate:
    """Upper-spectrum values at theta = 1 - eps for a shrinking eps ladder.

    The headline is the value at the smallest eps; the trend line reports
    the observed sequence without asserting monotonicity in eps.
    """
    eps = [Fraction(e) for e in epsilons]
    if not eps:
        raise ValueError("need at least one epsilon")
    if any(not 0 < e < 1 for e in eps):
        raise ValueError("epsilons must lie strictly in (0, 1)")
    thetas = [1 - e for e in eps]
    est = estimate_upper(rep, thetas, m_range, neighbors)
    order = {th: i for i, th in enumerate(est.thetas)}
    values = [est.values[order[1 - e]] for e in eps]
    wits = [est.witnesses[order[1 - e]] for e in eps]
    headline = values[min(range(len(eps)), key=lambda i: eps[i])]
    pairs = sorted(zip(eps, values), reverse=True)  # eps shrinking
    seq = [v for _, v in pairs]
    if all(a <= b for a, b in zip(seq, seq[1:])):
        kind = "non-decreasing"
    elif all(a >= b for a, b in zip(seq, seq[1:])):
        kind = "non-increasing"
    else:
        kind = "mixed"
    trend = f"{kind} as eps shrinks: " + ", ".join(
        f"eps={float(e):g}->{v!r}" for e, v in pairs
    )
    return QuasiAssouadEstimate(eps, values, wits, headline, est.m_range, trend)


# ----------------------------------------------------------------------
# ratio-fan enumeration (the brute side of the upper identity)


def _ratio_fan_max(rep, scale, lo, hi_eff, neighbors) -> float:
    """Max exponent over all windows with ratio m/m' <= theta, enumerated
    coarse-level first.  Same window set as estimate_upper's fan."""
    depth = _depth(rep)
    best = -np.inf
    if isinstance(rep, BranchingSchedule):
        S = rep.prefix_array()
        idx = np.arange(depth + 1, dtype=np.int64)
        for m in range(lo, hi_eff + 1):
            j0 = scale.fine(m)
            alpha = (S[j0:] - S[m]) / (idx[j0:] - m)
            v = float(alpha.max())
            if v > best:
                best = v
        return best
    if isinstance(rep, DyadicTree):
        for m in range(lo, hi_eff + 1):
            if neighbors:
                for mp in range(scale.fine(m), depth + 1):
                    c, _ = _tree_pair_on(rep, m, mp)
                    v = log2(c) / (mp - m)
                    if v > best:
                        best = v
            else:
                for mp in range(scale.fine(m), depth + 1):
                    counts, logs = _tree_table(rep, mp)
                    d = min(mp - m, len(counts) - 1)
                    v = float(logs[d]) / (mp - m)
                    if v > best:
                        best = v
        return best
    cs: CompositeSet = rep
    depth = cs.depth
    idx = np.arange(depth + 1, dtype=np.int64)
    for i, (e, s) in enumerate(cs.components):
        Sx = cs.extended_prefix(i)
        for m in range(max(lo, e), hi_eff + 1):
            j0 = scale.fine(m)
            alpha = (Sx[j0 - e :] - Sx[m - e]) / (idx[j0:] - m)
            v = float(alpha.max())
            if v > best:
                best = v
    from bisect import bisect_left

    top = min(hi_eff, cs.shifts[-1] - 1 if cs.components else -1)
    for m in range(lo, top + 1):
        b = bisect_left(cs.shifts, m + 1)
        logs = origin_log_counts(cs, b)
        j0 = scale.fine(m)
        alpha = logs[j0:] / (idx[j0:] - m)
        v = float(alpha.max())
        if v > best:
            best = v
    return best


def verify_main_theorem(
    rep,
    theta_grid: Sequence,
    m_range: tuple[int, int] | None = None,
    neighbors: bool = False,
) -> VerificationReport:
    """Upper estimate vs the max over all achievable window ratios <= theta.

    Both sides maximize over the identical finite window fan, one through
    the optimized upper path and one by direct enumeration, so the
    deviation must be exactly zero.
    """
    depth = _depth(rep)
    lo, hi = _norm_range(depth, m_range)
    grid = _grid(theta_grid)
    upper = estimate_upper(rep, grid, (lo, hi), neighbors)
    worst = 0.0
    wits: list[str] = []
    for th, lhs in zip(upper.thetas, upper.values):
        scale = RationalScale(th)
        _, hi_eff = _clamp(depth, scale, lo, hi)
        rhs = _ratio_fan_max(rep, scale, lo, hi_eff, neighbors)
        dev = abs(lhs - rhs)
        if dev > worst:
            worst = dev
        if dev != 0.0:
            wits.append(
                f"theta={float(th):g} upper={lhs!r} ratio-fan={rhs!r} dev={dev!r}"
            )
    return VerificationReport("main-theorem", worst == 0.0, worst, 0.0, wits)


def verify_bound(
    rep,
    theta_grid: Sequence,
    m_range: tuple[int, int] | None = None,
    tol: float = 0.05,
    neighbors: bool = False,
) -> VerificationReport:
    """spectrum(theta) <= box / (1 - theta) + tol on every grid point."""
    spec = estimate_spectrum(rep, theta_grid, m_range, neighbors)
    box = estimate_box(rep, m_range if m_range is not None else spec.m_range)
    worst = -np.inf
    wits: list[str] = []
    for th, v in zip(spec.thetas, spec.values):
        cap = box.value / (1.0 - float(th))
        dev = v - cap
        if dev > worst:
            worst = dev
        if dev > tol:
            wits.append(f"theta={float(th):g} spectrum={v!r} bound={cap!r}")
    return VerificationReport("bound", worst <= tol, float(worst), tol, wits)


def verify_chain(
    rep,
    theta_grid: Sequence,
    m_range: tuple[int, int] | None = None,
    tol: float = 0.05,
    epsilons: Sequence | None = None,
    neighbors: bool = False,
) -> VerificationReport:
    """The dimension chain at desk scale, per grid theta:

    box <= spectrum + tol, spectrum <= upper (exact), upper <= quasi-Assouad
    headline + tol, and upper non-decreasing along the grid (exact).
    """
    depth = _depth(rep)
    lo, hi = _norm_range(depth, m_range)
    grid = _grid(theta_grid)
    spec = estimate_spectrum(rep, grid, (lo, hi), neighbors)
    upper = estimate_upper(rep, grid, (lo, hi), neighbors)
    box = estimate_box(rep, (lo, hi))
    if epsilons is None:
        # shrink toward 1 - max(grid) so the headline sits at the grid top
        e0 = 1 - grid[-1]
        epsilons = [e0 + (1 - e0) / 2, e0 + (1 - e0) / 4, e0]
    qa = estimate_quasi_assouad(rep, epsilons, (lo, hi), neighbors)
    worst = -np.inf
    wits: list[str] = []
    for th, sv, uv in zip(grid, spec.values, upper.values):
        checks = (
            (box.value - sv - tol, f"box {box.value!r} > spectrum {sv!r} + tol"),
            (sv - uv, f"spectrum {sv!r} > upper {uv!r}"),
            (uv - qa.headline - tol, f"upper {uv!r} > quasi-Assouad {qa.headline!r} + tol"),
        )
        for dev, msg in checks:
            if dev > worst:
                worst = dev
            if dev > 0:
                wits.append(f"theta={float(th):g}: {msg}")
    for (t1, u1), (t2, u2) in zip(
        zip(grid, upper.values), zip(grid[1:], upper.values[1:])
    ):
        dev = u1 - u2
        if dev > worst:
            worst = dev
        if dev > 0:
            wits.append(
                f"upper not monotone: theta={float(t1):g}->{u1!r}, "
                f"theta={float(t2):g}->{u2!r}"
            )
    return VerificationReport("chain", not wits, float(worst), tol, wits)


def verify_nthroot(
    rep,
    theta_grid: Sequence,
    n_values: Sequence[int] = (2, 3),
    m_range: tuple[int, int] | None = None,
    tol: float = 0.05,
    neighbors: bool = False,
) -> VerificationReport:
    """spectrum(theta) <= spectrum(theta ** (1/n)) + tol for each n."""
    depth = _depth(rep)
    lo, hi = _norm_range(depth, m_range)
    grid = _grid(theta_grid)
    spec = estimate_spectrum(rep, grid, (lo, hi), neighbors)
    worst = -np.inf
    wits: list[str] = []
    for th, base in zip(grid, spec.values):
        for n in n_values:
            scale = RootScale(th, int(n))
            a, b = _clamp(depth, scale, lo, hi)
            other, _, _, _ = _spectrum_at(rep, scale, a, b, neighbors)
            dev = base - other - tol
            if dev > worst:
                worst = dev
            if dev > 0:
                wits.append(
                    f"theta={float(th):g} n={n}: spectrum {base!r} > "
                    f"root-spectrum {other!r} + tol"
                )
    return VerificationReport("nthroot", not wits, float(worst), tol, wits)


# ----------------------------------------------------------------------
# serialization


def estimate_to_csv(est) -> str:
    """CSV per the output contract: theta,value,m_witness,mprime_witness."""
    lines = ["theta,value,m_witness,mprime_witness"]
    if isinstance(est, SpectrumEstimate):
        for th, v, (m, mp, _) in zip(est.thetas, est.values, est.witnesses):
            lines.append(f"{float(th)!r},{v!r},{m},{mp}")
    elif isinstance(est, BoxEstimate):
        lines.append(f",{est.value!r},{est.m_witness},")
    elif isinstance(est, QuasiAssouadEstimate):
        for e, v, (m, mp, _) in zip(est.epsilons, est.values, est.witnesses):
            lines.append(f"{float(1 - e)!r},{v!r},{m},{mp}")
    else:
        raise TypeError(f"cannot serialize {type(est).__name__}")
    return "\n".join(lines) + "\n"


def report_to_text(report: VerificationReport) -> str:
    status = "PASS" if report.passed else "FAIL"
    lines = [f"CHECK {report.name} {status} worst={report.worst!r} tol={report.tol!r}"]
    if not report.passed:
        lines.extend(f"  witness {w}" for w in report.witnesses)
    return "\n".join(lines) + "\n"
