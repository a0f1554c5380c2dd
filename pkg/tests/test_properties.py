"""Property tests for the structural invariants."""

import random
from fractions import Fraction
from math import log2

from hypothesis import given, settings, strategies as st

from fds.dyadic import (
    DyadicInterval,
    WindowQuery,
    embed,
    level_count,
    local_count,
    max_alpha,
    merge,
    validate,
)
from fds.schedule import (
    BranchingSchedule,
    analytic_alpha,
    analytic_spectrum,
    analytic_upper,
    materialize,
)
from fds.constructions import rational_enumeration
from fds.spectra import estimate_spectrum, estimate_upper


@st.composite
def schedules(draw, max_depth=14):
    depth = draw(st.integers(min_value=2, max_value=max_depth))
    cs = draw(
        st.lists(st.sampled_from((1, 2)), min_size=depth, max_size=depth)
    )
    return BranchingSchedule([(1, c) for c in cs])


@st.composite
def trees(draw, max_depth=9):
    """Random valid tree: materialize a schedule, then randomly prune
    right children while keeping one child per node."""
    s = draw(schedules(max_depth))
    seed = draw(st.integers(min_value=0, max_value=2**16))
    rng = random.Random(seed)
    t = materialize(s)
    levels = [list(t.levels[0])]
    prev = [0]
    for m in range(1, t.depth + 1):
        cur = []
        for k in prev:
            kids = [x for x in (2 * k, 2 * k + 1) if t.has(m, x)]
            if len(kids) == 2 and rng.random() < 0.3:
                kids = [kids[rng.randrange(2)]]
            cur.extend(kids)
        cur = sorted(set(cur))
        levels.append(cur)
        prev = cur
    from fds.dyadic import DyadicTree

    return DyadicTree(levels)


@settings(max_examples=60, deadline=None)
@given(trees(), st.integers(min_value=1, max_value=6))
def test_embed_preserves_validity_and_counts(t, e):
    out = embed(t, e)
    assert validate(out) == []
    for m in range(t.depth + 1):
        assert level_count(out, m + e) == level_count(t, m)


@settings(max_examples=40, deadline=None)
@given(st.lists(trees(max_depth=7), min_size=0, max_size=3), st.booleans())
def test_merge_preserves_validity(ts, origin):
    shifted = [embed(t, i + 1) for i, t in enumerate(ts)]
    out = merge(shifted, include_origin=origin)
    assert validate(out) == []


@settings(max_examples=60, deadline=None)
@given(trees(), st.data())
def test_local_count_neighbor_dominates(t, data):
    m = data.draw(st.integers(min_value=0, max_value=t.depth - 1))
    mp = data.draw(st.integers(min_value=m + 1, max_value=t.depth))
    k = data.draw(st.sampled_from(t.levels[m]))
    v = DyadicInterval(m, k)
    off = local_count(t, v, mp, neighbor_mode=False)
    on = local_count(t, v, mp, neighbor_mode=True)
    assert on >= off >= 1


@settings(max_examples=60, deadline=None)
@given(trees())
def test_level_counts_monotone_and_doubling(t):
    for m in range(1, t.depth + 1):
        assert level_count(t, m) <= 2 * level_count(t, m - 1)
        assert level_count(t, m) >= level_count(t, m - 1)


@settings(max_examples=60, deadline=None)
@given(trees(), st.data())
def test_max_alpha_in_unit_interval(t, data):
    m = data.draw(st.integers(min_value=0, max_value=t.depth - 1))
    mp = data.draw(st.integers(min_value=m + 1, max_value=t.depth))
    a, _ = max_alpha(t, WindowQuery(m, mp))
    assert 0.0 <= a <= 1.0
    a_on, _ = max_alpha(t, WindowQuery(m, mp, neighbor_mode=True))
    assert a <= a_on <= 1.0 + log2(3) / (mp - m)


@settings(max_examples=60, deadline=None)
@given(schedules(), st.data())
def test_analytic_alpha_bounds(s, data):
    m = data.draw(st.integers(min_value=0, max_value=s.depth - 1))
    mp = data.draw(st.integers(min_value=m + 1, max_value=s.depth))
    a = analytic_alpha(s, m, mp)
    assert 0 <= a <= 1


@settings(max_examples=40, deadline=None)
@given(schedules(max_depth=24), st.data())
def test_upper_dominates_and_is_monotone(s, data):
    theta_idx = data.draw(st.integers(min_value=2, max_value=8))
    theta = Fraction(theta_idx, 10)
    hi = int(theta * s.depth)
    if hi < 1:
        return
    lo = data.draw(st.integers(min_value=1, max_value=hi))
    spec = analytic_spectrum(s, theta, (lo, hi))
    up = analytic_upper(s, theta, (lo, hi))
    assert spec.value <= up.value
    # a larger theta over the same base range never shrinks the upper max
    theta2 = Fraction(theta_idx + 1, 10)
    up2 = analytic_upper(s, theta2, (lo, hi))
    assert up2.value >= up.value


@settings(max_examples=25, deadline=None)
@given(schedules(max_depth=12))
def test_estimator_matches_analytic_ops_on_schedules(s):
    grid = [Fraction(1, 2), Fraction(3, 4)]
    lo, hi = 1, s.depth // 2
    if hi < lo:
        return
    est = estimate_spectrum(s, grid, (lo, hi))
    up = estimate_upper(s, grid, (lo, hi))
    for th, sv, uv in zip(est.thetas, est.values, up.values):
        hi_eff = min(hi, int(th * s.depth))
        assert sv == float(analytic_spectrum(s, th, (lo, hi_eff)).value)
        assert uv == float(analytic_upper(s, th, (lo, hi_eff)).value)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=1, max_value=60))
def test_rational_enumeration_properties(n):
    got = rational_enumeration(n)
    assert len(got) == n
    assert len(set(got)) == n
    assert all(0 < q < 1 for q in got)


@settings(max_examples=30, deadline=None)
@given(trees(max_depth=8), st.data())
def test_window_alpha_shift_invariant(t, data):
    e = data.draw(st.integers(min_value=1, max_value=4))
    m = data.draw(st.integers(min_value=0, max_value=t.depth - 1))
    mp = data.draw(st.integers(min_value=m + 1, max_value=t.depth))
    a, wit = max_alpha(t, WindowQuery(m, mp))
    b, wit2 = max_alpha(embed(t, e), WindowQuery(m + e, mp + e))
    assert a == b
    assert wit2.index == wit.index + (1 << m)
