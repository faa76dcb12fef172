import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from dsmlab.maps import (CRITICAL_POINT, DegenerateDerivativeError, MapParams,
                         circle_dist, comparability_ratio, deriv, deriv2,
                         derivative_product, eval_map, iterate_critical, lift,
                         lyapunov_critical, mp_eval, param_deriv_closed_form,
                         signed_circle_diff, wrap)

finite_a = st.floats(min_value=0.0, max_value=1.0, exclude_max=True)
finite_b = st.floats(min_value=0.0, max_value=1.0)
circle = st.floats(min_value=0.0, max_value=1.0, exclude_max=True)


def test_eval_critical_symmetry():
    # 2c = 1 and sin(pi) = 0, so f(c) = a for any b
    for b in (0.0, 0.3, 1.0):
        assert eval_map(MapParams(0.3, b), 0.5) == pytest.approx(0.3, abs=1e-15)


def test_eval_doubling_case():
    assert eval_map(MapParams(0.0, 0.0), 0.25) == 0.5


def test_eval_against_mp_oracle():
    got = eval_map(MapParams(0.1, 0.7), 0.2)
    want = float(mp_eval(0.1, 0.7, 0.2, prec_bits=200))
    assert got == pytest.approx(want, abs=1e-15)


def test_param_validation():
    with pytest.raises(ValueError):
        MapParams(1.0, 0.5)
    with pytest.raises(ValueError):
        MapParams(0.5, 1.5)


def test_deriv_values():
    assert deriv(MapParams(0.1, 1.0), 0.5) == 0.0
    assert deriv(MapParams(0.1, 0.6), 0.5) == pytest.approx(0.8, abs=1e-15)
    assert deriv(MapParams(0.1, 1.0), 0.0) == 4.0


def test_deriv_bounds_on_grid():
    xs = np.linspace(0.0, 1.0, 10 ** 6, endpoint=False)
    d1 = 2.0 + 2.0 * np.cos(2 * np.pi * xs)
    d2 = -4.0 * np.pi * np.sin(2 * np.pi * xs)
    assert d1.max() <= 4.0 + 1e-12
    assert np.abs(d2).max() <= 4.0 * np.pi + 1e-9


@given(finite_a, finite_b, st.floats(min_value=-3, max_value=3))
def test_degree_two_lift(a, b, x):
    p = MapParams(a, b)
    assert lift(p, x + 1.0) == pytest.approx(lift(p, x) + 2.0, abs=1e-12)


@given(finite_a, finite_b, circle)
def test_deriv_range(a, b, x):
    d = deriv(MapParams(a, b), x)
    assert 2.0 - 2.0 * b - 1e-12 <= d <= 2.0 + 2.0 * b + 1e-12


def test_iterate_critical_conventions():
    tr = iterate_critical(MapParams(0.3, 0.8), 6)
    assert tr.space_derivs[0] == 1.0
    assert tr.param_derivs[0] == 0.0
    assert tr.param_derivs[1] == 1.0
    # product convention: space_derivs[k+1] = space_derivs[k] * f'(xi_{k+1})
    p = MapParams(0.3, 0.8)
    for k in range(6):
        assert tr.space_derivs[k + 1] == pytest.approx(
            tr.space_derivs[k] * deriv(p, tr.points[k + 1]), rel=1e-14)


def test_param_deriv_two_step_example():
    # u_2 = 1 + f'(xi_1) with xi_1 = a; at a=1/4, b=1: f'(1/4) = 2
    tr = iterate_critical(MapParams(0.25, 1.0), 2)
    assert tr.param_derivs[2] == pytest.approx(3.0, abs=1e-12)


def test_param_deriv_closed_form_matches_recurrence():
    p = MapParams(0.37, 0.95)
    tr = iterate_critical(p, 25)
    cf = param_deriv_closed_form(p, 25)
    assert tr.param_derivs[25] == pytest.approx(cf, rel=1e-10)


@given(finite_a, finite_b, st.integers(min_value=1, max_value=25))
def test_monotone_transversality(a, b, n):
    tr = iterate_critical(MapParams(a, b), n)
    assert all(v >= 1.0 - 1e-12 for v in tr.param_derivs[1:])


@given(finite_a, finite_b, circle, st.integers(min_value=0, max_value=20))
def test_closed_form_any_start(a, b, x, n):
    p = MapParams(a, b)
    tr = iterate_critical(p, n, x0=x)
    cf = param_deriv_closed_form(p, n, x0=x)
    assert tr.param_derivs[n] == pytest.approx(cf, rel=1e-9, abs=1e-9)


def test_comparability_ratio_n1():
    assert comparability_ratio(MapParams(0.3, 0.9), 1) == pytest.approx(1.0, abs=1e-15)


def test_comparability_ratio_doubling():
    # constant derivative 2: sum of 2^{-k} over k < 10
    assert comparability_ratio(MapParams(0.3, 0.0), 10) == pytest.approx(1023 / 512, abs=1e-14)


def test_comparability_matches_direct_sum():
    p = MapParams(0.37, 0.9)
    n = 40
    tr = iterate_critical(p, n)
    direct = sum(1.0 / tr.space_derivs[k] for k in range(n))
    assert comparability_ratio(p, n) == pytest.approx(direct, rel=1e-9)


def test_comparability_bounds_when_expanding():
    # whenever all partial products are >= 1 the ratio lies in [1, direct sum]
    p = MapParams(0.12, 0.3)
    n = 30
    tr = iterate_critical(p, n)
    assert all(v >= 1.0 for v in tr.space_derivs[:n])
    ratio = comparability_ratio(p, n)
    assert 1.0 <= ratio <= sum(1.0 / v for v in tr.space_derivs[:n]) + 1e-12


def test_comparability_degenerate_hit():
    # a = 1/2, b = 1: xi_1 = c exactly, derivative product vanishes
    with pytest.raises(DegenerateDerivativeError):
        comparability_ratio(MapParams(0.5, 1.0), 3)


def test_lyapunov_doubling_exact():
    assert lyapunov_critical(MapParams(0.7, 0.0), 50) == pytest.approx(math.log(2), abs=1e-13)


def test_lyapunov_attracting_fixed_point():
    # a=1/2, b=3/4: f(1/2) = 1/2 with multiplier 1/2
    val = lyapunov_critical(MapParams(0.5, 0.75), 200, burn_in=10)
    assert val == pytest.approx(math.log(0.5), abs=1e-9)
    assert val < 0.0


def test_lyapunov_lower_bound_below_half():
    val = lyapunov_critical(MapParams(0.37, 0.45), 10 ** 5)
    assert val >= math.log(1.1) - 1e-12


def test_lyapunov_degenerate():
    with pytest.raises(DegenerateDerivativeError):
        lyapunov_critical(MapParams(0.5, 1.0), 10)


def test_circle_dist_cases():
    assert circle_dist(0.1, 0.9) == pytest.approx(0.2, abs=1e-15)
    assert circle_dist(0.33, 0.33) == 0.0
    assert circle_dist(0.25, 0.75) == 0.5


@given(circle, circle)
def test_circle_dist_range_and_symmetry(x, y):
    d = circle_dist(x, y)
    assert 0.0 <= d <= 0.5
    assert d == circle_dist(y, x)
    assert abs(signed_circle_diff(x, y)) == pytest.approx(min(d, 0.5), abs=1e-12)


def test_wrap_normalizes():
    assert wrap(1.25) == 0.25
    assert wrap(-0.25) == 0.75
    assert 0.0 <= wrap(0.9999999999999999) < 1.0


def test_derivative_product_log_path_agreement():
    # products spanning the tiny-factor threshold agree between plain and
    # log-space accumulation
    factors = [2.0, 3.5, 0.5, 1.2]
    tiny = [2.0, 1e-9, 3.0, 0.25]
    assert derivative_product(factors) == pytest.approx(
        math.exp(math.fsum(math.log(f) for f in factors)), rel=1e-12)
    assert derivative_product(tiny) == pytest.approx(1.5e-9, rel=1e-12)
    assert derivative_product([1.0, 0.0, 4.0]) == 0.0


def test_iterate_critical_log_mode_matches_plain():
    # near-critical passage at b=1 pushes factors under the threshold; the
    # log path must still match a plain high-precision product
    p = MapParams(0.5000001, 1.0)
    tr = iterate_critical(p, 3)
    want = 1.0
    for x in tr.points[1:]:
        want *= deriv(p, x)
    assert tr.space_derivs[3] == pytest.approx(want, rel=1e-9)


def test_critical_hit_reported():
    tr = iterate_critical(MapParams(0.5, 1.0), 3)
    assert tr.critical_hit == 1
    assert tr.space_derivs[1] == 0.0


def test_orbit_lift_degree():
    from dsmlab.maps import orbit_lift
    p = MapParams(0.3, 0.8)
    for n in (1, 3, 7):
        assert orbit_lift(p, 0.2 + 1.0, n) == pytest.approx(
            orbit_lift(p, 0.2, n) + 2.0 ** n, rel=1e-12)


def test_orbit_lift_doubling_winding():
    # b = 0: pure 2x + a, lift after n steps is 2^n x + (2^n - 1) a
    from dsmlab.maps import orbit_lift
    p = MapParams(0.25, 0.0)
    assert orbit_lift(p, 0.3, 5) == pytest.approx(32 * 0.3 + 31 * 0.25, rel=1e-13)


@given(finite_b, st.floats(min_value=-0.05, max_value=0.05))
def test_displacement_taylor_envelope(b, u):
    # |f(c+u) - f(c)| = |u| ((2-2b) + (4 pi^2 b/3) u^2 (1 + O(u^2))); the
    # linear coefficient is 2-2b (twice the inflexion defect), and the cubic
    # correction is positive
    if abs(u) < 1e-8:
        return
    p = MapParams(0.3, b)
    gap = abs(lift(p, CRITICAL_POINT + u) - lift(p, CRITICAL_POINT))
    cubic = 4.0 * math.pi ** 2 * b / 3.0
    lo = abs(u) * ((2 - 2 * b) + 0.9 * cubic * u * u)
    hi = abs(u) * ((2 - 2 * b) + 1.1 * cubic * u * u)
    tol = 4e-15
    assert lo - tol <= gap <= hi + tol


@given(finite_b, st.floats(min_value=-0.05, max_value=0.05))
def test_derivative_taylor_envelope(b, u):
    # f'(c+u) = 2-2b + 4 b sin^2(pi u), exactly
    p = MapParams(0.3, b)
    want = 2 - 2 * b + 4.0 * b * math.sin(math.pi * u) ** 2
    assert deriv(p, CRITICAL_POINT + u) == pytest.approx(want, abs=1e-12)
