import math

import pytest
from hypothesis import given, strategies as st

from dsmlab.maps import CRITICAL_POINT as C
from dsmlab.partition import (IndexOutOfWindowError, PartitionIndex,
                              ReturnWindow, annulus_length, cell_length,
                              cell_offsets, extended, interval_of, locate,
                              locate_offset)

W3 = ReturnWindow(3)


def test_window_invariants():
    w = ReturnWindow(5, 2)
    assert w.delta == math.exp(-5)
    assert w.delta1 == math.exp(-2)
    with pytest.raises(ValueError):
        ReturnWindow(3, 3)
    with pytest.raises(ValueError):
        ReturnWindow(0)


def test_index_validation():
    with pytest.raises(ValueError):
        PartitionIndex(5, 25)
    with pytest.raises(ValueError):
        PartitionIndex(0, 0)
    PartitionIndex(-5, 24)


def test_interval_of_inner_edge():
    lo, hi = interval_of(W3, PartitionIndex(5, 0))
    assert lo - C == pytest.approx(math.exp(-6), rel=1e-14)
    assert hi - lo == pytest.approx(math.exp(-5) * (1 - math.exp(-1)) / 25, rel=1e-12)


def test_interval_of_outermost_touches_window_edge():
    r = W3.r_delta
    lo, hi = interval_of(W3, PartitionIndex(r, r * r - 1))
    assert hi - C == pytest.approx(math.exp(-r), rel=1e-13)


def test_interval_of_mirror():
    lo_p, hi_p = interval_of(W3, PartitionIndex(5, 0))
    lo_m, hi_m = interval_of(W3, PartitionIndex(-5, 0))
    assert hi_m - C == pytest.approx(-(lo_p - C), rel=1e-13)
    assert lo_m - C == pytest.approx(-(hi_p - C), rel=1e-13)


def test_interval_of_rejects_inside_window_edge():
    with pytest.raises(IndexOutOfWindowError):
        interval_of(W3, PartitionIndex(2, 1))


def test_annulus_tiling_sums():
    # cells of each annulus tile it exactly, in offset arithmetic (deep
    # cells are narrower than one ulp of the anchored endpoints)
    for r in range(3, 41):
        total = math.fsum(
            cell_offsets(W3, PartitionIndex(r, l))[1] - cell_offsets(W3, PartitionIndex(r, l))[0]
            for l in range(r * r))
        assert total == pytest.approx(annulus_length(r), rel=1e-12)


def test_cell_offsets_match_intervals():
    for r, l in ((3, 0), (5, 12), (8, 63)):
        off = cell_offsets(W3, PartitionIndex(r, l))
        lo, hi = interval_of(W3, PartitionIndex(r, l))
        assert lo == pytest.approx(C + off[0], abs=1e-15)
        assert hi == pytest.approx(C + off[1], abs=1e-15)


def test_window_tiling_with_analytic_tail():
    # sum over |r| >= r_delta of |I_r| telescopes to 2 delta
    r_hi = 60
    partial = 2.0 * math.fsum(annulus_length(r) for r in range(3, r_hi + 1))
    tail = 2.0 * math.exp(-(r_hi + 1))   # geometric tail: sum e^{-r}(1-1/e)
    assert partial + tail == pytest.approx(2.0 * W3.delta, rel=1e-12)


def test_locate_worked_example():
    x = C + 0.9 * math.exp(-5)
    assert locate(W3, x) == PartitionIndex(5, 21)


def test_locate_outside_and_center():
    assert locate(W3, C) is None
    assert locate(W3, C + 2 * W3.delta) is None
    assert locate(W3, C + W3.delta) is None          # window is open
    assert locate(W3, 0.0) is None


def test_locate_boundary_ownership():
    # ownership is exact in offset coordinates: right side half-open
    # [lo, hi), so a boundary belongs to the outward cell
    off_lo, off_hi = cell_offsets(W3, PartitionIndex(5, 3))
    assert locate_offset(W3, off_lo) == PartitionIndex(5, 3)
    assert locate_offset(W3, off_hi) == PartitionIndex(5, 4)
    # left side mirrored, (lo, hi] on the circle: x = c - off_lo is the
    # right endpoint of cell (-5, 3) and belongs to it; x = c - off_hi
    # belongs to the inward neighbor
    assert locate_offset(W3, -off_lo) == PartitionIndex(-5, 3)
    assert locate_offset(W3, -off_hi) == PartitionIndex(-5, 4)


@given(st.floats(min_value=1e-8, max_value=1.0 - 1e-12),
       st.sampled_from([1, -1]))
def test_locate_interval_round_trip(frac, side):
    off = math.exp(-3) * frac * 0.999999
    if off == 0.0:
        return
    x = C + side * off
    idx = locate(W3, x)
    if idx is None:
        return
    lo, hi = interval_of(W3, idx)
    if side > 0:
        assert lo <= x < hi
    else:
        assert lo < x <= hi


@given(st.floats(min_value=1e-300, max_value=1.0, exclude_max=True),
       st.sampled_from([1, -1]))
def test_locate_offset_round_trip_deep(frac, side):
    # offset-space round trip holds at any depth
    u = math.exp(-3) * frac * 0.999999
    if u == 0.0:
        return
    idx = locate_offset(W3, side * u)
    if idx is None:
        return
    off_lo, off_hi = cell_offsets(W3, idx)
    assert off_lo <= u < off_hi     # uniform in distance coordinates
    assert (idx.r > 0) == (side > 0)


def test_round_trip_bulk():
    import numpy as np
    rng = np.random.default_rng(42)
    xs = C + (rng.random(10 ** 4) * 2.0 - 1.0) * W3.delta
    failures = 0
    for x in xs:
        if x == C:
            continue
        idx = locate(W3, float(x))
        if idx is None:
            if abs(x - C) < W3.delta:
                failures += 1
            continue
        lo, hi = interval_of(W3, idx)
        if not (lo <= x <= hi):
            failures += 1
    assert failures == 0


def test_extended_three_cells():
    ext = extended(W3, PartitionIndex(5, 3))
    assert ext.hi - ext.lo == pytest.approx(3 * cell_length(5), rel=1e-12)
    assert not ext.truncated


def test_extended_crosses_annulus():
    # outward neighbor of the outermost cell of annulus 5 is (4, 0)
    ext = extended(W3, PartitionIndex(5, 24))
    lo4, hi4 = interval_of(W3, PartitionIndex(4, 0))
    assert ext.hi == pytest.approx(hi4, rel=1e-14)
    assert not ext.truncated


def test_extended_truncated_at_window_edge():
    r = W3.r_delta
    ext = extended(W3, PartitionIndex(r, r * r - 1))
    assert ext.truncated
    assert ext.hi - C == pytest.approx(W3.delta, rel=1e-13)


def test_extended_inward_crossing():
    # inward neighbor of (5, 0) is (6, 35); union stays contiguous
    ext = extended(W3, PartitionIndex(5, 0))
    lo6, _ = interval_of(W3, PartitionIndex(6, 35))
    assert ext.lo == pytest.approx(lo6, rel=1e-14)
