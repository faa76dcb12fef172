import math

import mpmath
import numpy as np
import pytest

from dsmlab.maps import MapParams
from dsmlab.certify import (ExpansionCertificate, Inconclusive, Refutation,
                            TongueNotFoundError, certify_uniform,
                            check_certificate, classify_point,
                            deriv_range_on_interval, scan_plane, tongue_tip)


def test_certificate_below_half_single_step():
    out = certify_uniform(MapParams(0.3, 0.4), 1, 1.19)
    assert isinstance(out, ExpansionCertificate)
    assert out.lam >= 1.2 - 1e-9
    assert out.method == "interval-propagation"


def test_certificate_doubling_exact():
    out = certify_uniform(MapParams(0.1, 0.0), 1, 1.9)
    assert isinstance(out, ExpansionCertificate)
    assert out.lam == 2.0


def test_refutation_attracting_fixed_point():
    for n in (1, 4, 12, 20):
        out = certify_uniform(MapParams(0.5, 0.75), n, 1.05, max_depth=22)
        assert isinstance(out, Refutation)
        assert out.upper_bound < 1.0
        # witness re-verified at twice the working precision
        with mpmath.workprec(106):
            x = mpmath.mpf(out.witness)
            prod = mpmath.mpf(1)
            for _ in range(n):
                prod *= 2 + 2 * mpmath.mpf(0.75) * mpmath.cos(2 * mpmath.pi * x)
                x = mpmath.frac(2 * x + mpmath.mpf(0.5) +
                                mpmath.mpf(0.75) / mpmath.pi * mpmath.sin(2 * mpmath.pi * x))
            assert prod < 1


def test_inconclusive_at_depth_exhaustion():
    # b = 1 has a genuine critical point: no certificate, and refutation
    # requires resolving the cubic tangency; tiny depth gives up
    out = certify_uniform(MapParams(0.37, 1.0), 2, 1.01, max_depth=4)
    assert isinstance(out, (Inconclusive, Refutation))
    if isinstance(out, Inconclusive):
        assert out.cells_stuck > 0


def test_monotone_region_property():
    rng = np.random.default_rng(3)
    for b in np.arange(0.05, 0.5, 0.05):
        a = float(rng.random())
        out = certify_uniform(MapParams(a, float(b)), 1, 2.0 - 2.0 * b - 1e-9)
        assert isinstance(out, ExpansionCertificate)


def test_certificate_soundness_sampling():
    cert = certify_uniform(MapParams(0.7, 0.45), 1, 1.09)
    assert isinstance(cert, ExpansionCertificate)
    assert check_certificate(cert, n_samples=100_000)
    cert4 = certify_uniform(MapParams(0.12, 0.3), 4, 1.9, max_depth=18)
    assert isinstance(cert4, ExpansionCertificate)
    assert check_certificate(cert4, n_samples=100_000)


def test_deriv_range_is_an_enclosure():
    p = MapParams(0.3, 0.8)
    rng = np.random.default_rng(11)
    for _ in range(200):
        lo = float(rng.random() * 2 - 0.5)
        hi = lo + float(rng.random()) * 0.5
        dmin, dmax = deriv_range_on_interval(p, lo, hi)
        xs = lo + (hi - lo) * rng.random(64)
        vals = 2.0 + 2.0 * p.b * np.cos(2 * np.pi * xs)
        assert vals.min() >= dmin - 1e-12
        assert vals.max() <= dmax + 1e-12


def test_classify_tongue_example():
    cell = classify_point(0.5, 0.75)
    assert cell.cls == "tongue"
    assert cell.period == 1
    assert cell.multiplier == pytest.approx(0.5, abs=1e-9)


def test_classify_neutral_tip():
    cell = classify_point(0.5, 0.5)
    assert cell.cls == "neutral"
    assert cell.multiplier == pytest.approx(1.0, abs=1e-9)


def test_classify_expanding_below_half():
    for a in (0.0, 0.31, 0.77):
        cell = classify_point(a, 0.3)
        assert cell.cls == "certified_expanding"
        assert cell.cert_n == 1
        assert cell.cert_lambda >= 1.4 - 1e-9


def test_classify_undecided_has_diagnostics():
    cell = classify_point(0.37, 0.95, max_iter=800)
    if cell.cls in ("expanding_candidate", "undecided"):
        assert "max_iter" in cell.diagnostics or cell.lyapunov is not None


def test_scan_plane_row_below_half():
    cells = scan_plane((0.0, 1.0), (0.3, 0.31), (8, 2), max_iter=500)
    row = [c for c in cells if c.b == 0.3]
    assert len(row) == 8
    assert all(c.cls == "certified_expanding" for c in row)


def test_scan_plane_column_period_one_tongue():
    cells = scan_plane((0.5, 0.5000001), (0.55, 0.95), (2, 9), max_iter=500)
    col = [c for c in cells if c.a == 0.5]
    assert len(col) == 9
    assert all(c.cls == "tongue" and c.period == 1 for c in col)
    for c in col:
        assert c.multiplier == pytest.approx(2 - 2 * c.b, abs=1e-9)


def test_scan_plane_classification_coherent():
    cells = scan_plane((0.0, 1.0), (0.2, 0.9), (7, 7), max_iter=600)
    assert len(cells) == 49
    for c in cells:
        assert c.cls in ("tongue", "neutral", "expanding_candidate",
                         "certified_expanding", "undecided")
        if c.cls == "tongue":
            assert c.cert_lambda is None
        if c.cls == "certified_expanding":
            assert c.period is None


def test_scan_plane_deterministic_and_parallel_equal():
    from multiprocessing import get_context
    args = ((0.1, 0.9), (0.25, 0.45), (5, 3))
    serial = scan_plane(*args, max_iter=400)
    with get_context("fork").Pool(2) as pool:
        parallel = scan_plane(*args, max_iter=400, pmap=pool.map)
    assert serial == parallel


def test_scan_plane_resolution_validation():
    with pytest.raises(ValueError):
        scan_plane((0, 1), (0, 1), (1, 5))


def test_tongue_tip_period_one(tmp_path):
    a_star, b_star = tongue_tip(1, (0.0, 1.0), b_tol=1e-7)
    assert a_star == pytest.approx(0.5, abs=1e-6)
    assert b_star == pytest.approx(0.5, abs=1e-6)


def test_tongue_tip_clipped_window_misses_tip():
    a_star, b_star = tongue_tip(1, (0.52, 0.7), b_tol=1e-4)
    assert b_star > 0.5
    assert 0.52 <= a_star <= 0.7


def test_tongue_tip_coarse_tolerance_returns_fast():
    a_star, b_star = tongue_tip(1, (0.0, 1.0), b_tol=0.5)
    assert 0.0 < b_star < 1.0


def test_tongue_tip_not_found():
    with pytest.raises(TongueNotFoundError):
        tongue_tip(1, (0.05, 0.15), b_tol=1e-3)
