"""Bound periods, free-period expansion statistics, and distortion audits.

A point re-entering the window near the critical point shadows the critical
orbit for a while (the bound period) before the accumulated expansion tears
the pair apart; orbits that stay outside the window expand at a definite
rate.  This module measures both effects and the distortion of derivative
products along bound pairs and between nearby parameters.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .maps import (CRITICAL_POINT, MapParams, circle_dist, deriv, eval_map,
                   pair_separation_step, signed_circle_diff,
                   two_param_separation_step)

log = logging.getLogger(__name__)

DEFAULT_BOUND_CAP = 100_000


class InfiniteBoundError(Exception):
    """x coincides with the critical point; the shadowing never ends."""


class NonReturnError(Exception):
    """The interval image does not sit inside the wide window."""


class NotSameElementError(Exception):
    """Two parameters with different return histories were compared."""


@dataclass(frozen=True)
class BoundPeriodResult:
    p: int
    exit_gap: float
    recovery_deriv: float
    capped: bool = False


def default_beta(kappa_tilde: float, kappa5_hat: float | None = None) -> float:
    """Envelope rate for pointwise shadowing, a small fraction of the
    slower of the cycle exponent and the outside-expansion rate."""
    rates = [kappa_tilde] + ([kappa5_hat] if kappa5_hat is not None else [])
    return min(rates) / 100.0


def beta_bound_period(p: MapParams, x: float, beta: float,
                      j_max: int = DEFAULT_BOUND_CAP) -> BoundPeriodResult:
    """Maximal p with |f^j(x) - f^j(c)| <= e^{-beta j} for all j <= p.

    The pair separation is tracked as a lifted difference, so once the
    orbits truly diverge the condition fails and stays failed; circle
    distance alone would spuriously re-enter the envelope after wrapping.
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    xx = x % 1.0
    if xx == CRITICAL_POINT:
        raise InfiniteBoundError("x is exactly the critical point")
    cc = CRITICAL_POINT
    d = signed_circle_diff(xx, cc)
    dprod = 1.0
    for j in range(1, j_max + 1):
        dprod *= deriv(p, xx)
        d = pair_separation_step(p, xx, cc, d)
        xx = eval_map(p, xx)
        cc = eval_map(p, cc)
        if abs(d) > math.exp(-beta * j):
            return BoundPeriodResult(p=j - 1, exit_gap=abs(d), recovery_deriv=dprod)
    log.warning("bound period capped at j_max=%d for x=%r", j_max, x)
    return BoundPeriodResult(p=j_max, exit_gap=abs(d), recovery_deriv=dprod, capped=True)


def param_bound_period(omega: tuple[float, float], b: float, n: int,
                       a_mid: float | None = None,
                       window_delta1: float | None = None,
                       sample_density: int = 9,
                       j_max: int = DEFAULT_BOUND_CAP) -> BoundPeriodResult:
    """Bound period of an interval return: maximal p such that every sampled
    parameter's image point stays within e^{-4 sqrt(j)} of the critical
    orbit of the interval midpoint, for all j <= p.

    Endpoints are always sampled; the image points are the time-n images of
    the sampled parameters.
    """
    a_lo, a_hi = omega
    if a_hi < a_lo:
        raise ValueError("empty interval")
    if a_mid is None:
        a_mid = 0.5 * (a_lo + a_hi)
    density = max(3, sample_density)
    if a_hi == a_lo:
        a_samples = [a_lo]
    else:
        a_samples = [a_lo + (a_hi - a_lo) * i / (density - 1) for i in range(density)]
        if a_mid not in a_samples:
            a_samples.append(a_mid)
        a_samples = sorted(set(a_samples))
    # time-n images of the sampled parameters
    images = []
    for a in a_samples:
        pp = MapParams(a, b)
        x = CRITICAL_POINT
        for _ in range(n):
            x = eval_map(pp, x)
        images.append(x)
    if window_delta1 is not None:
        if any(circle_dist(x, CRITICAL_POINT) >= window_delta1 for x in images):
            raise NonReturnError("time-n image is not inside the wide window")

    ref = MapParams(a_mid, b)
    c_orb = CRITICAL_POINT
    # pair states: (a, x, lifted separation from the reference critical orbit)
    pairs = []
    for a in a_samples:
        for x in images:
            pairs.append([a, x, signed_circle_diff(x, CRITICAL_POINT)])
    worst_gap = 0.0
    for j in range(1, j_max + 1):
        c_next = eval_map(ref, c_orb)
        worst = 0.0
        for st in pairs:
            a, x, d = st
            d = two_param_separation_step(a, ref.a, b, x, c_orb, d)
            x = eval_map(MapParams(a, b), x)
            st[1], st[2] = x, d
            worst = max(worst, abs(d))
        c_orb = c_next
        if worst > math.exp(-4.0 * math.sqrt(j)):
            return BoundPeriodResult(p=j - 1, exit_gap=worst, recovery_deriv=math.nan)
        worst_gap = worst
    log.warning("interval bound period capped at j_max=%d for omega=%r", j_max, omega)
    return BoundPeriodResult(p=j_max, exit_gap=worst_gap, recovery_deriv=math.nan, capped=True)


def window_bound_period(p: MapParams, x: float, delta1: float,
                        j_max: int = DEFAULT_BOUND_CAP) -> int:
    """Shadowing horizon at the window scale: last j with the pair
    separation |f^k(x) - f^k(c)| <= delta1 for all k <= j.

    Distortion audits use this horizon; the slow envelope of
    beta_bound_period keeps pairs "bound" well past the point where their
    separation is window-sized and derivative quotients have decorrelated.
    """
    xx = x % 1.0
    if xx == CRITICAL_POINT:
        raise InfiniteBoundError("x is exactly the critical point")
    cc = CRITICAL_POINT
    d = signed_circle_diff(xx, cc)
    for j in range(1, j_max + 1):
        d = pair_separation_step(p, xx, cc, d)
        xx = eval_map(p, xx)
        cc = eval_map(p, cc)
        if abs(d) > delta1:
            return j - 1
    return j_max


@dataclass(frozen=True)
class OutsideExpansionEstimate:
    window: tuple[float, float] | None
    c2_hat: float
    kappa1_hat: float
    m1_hat: int
    censored_fraction: float = 0.0


def outside_expansion_stats(p: MapParams, window: tuple[float, float] | None,
                            x_grid: list[float], n_max: int,
                            margin: float = 0.0) -> OutsideExpansionEstimate:
    """Empirical expansion constants for orbit segments outside `window`.

    For each start x the orbit runs to its first entry into the window (or
    censors at n_max).  kappa1_hat is the worst endpoint Lyapunov average
    minus `margin`; c2_hat the worst prefix of product / e^{kappa n};
    m1_hat the first horizon beyond which every observed product clears
    e^{kappa n} outright.
    """

    def inside(x: float) -> bool:
        return window is not None and window[0] < x < window[1]

    endpoint_rates: list[float] = []
    paths: list[list[float]] = []
    censored = 0
    for x0 in x_grid:
        if inside(x0):
            continue
        x = x0
        prods = []
        prod = 1.0
        hit = False
        for n in range(1, n_max + 1):
            nxt = eval_map(p, x)
            prod *= deriv(p, x)
            prods.append(prod)
            x = nxt
            if inside(x):
                hit = True
                break
        if not hit:
            censored += 1
        if prods:
            n_end = len(prods)
            endpoint_rates.append(math.log(prods[-1]) / n_end)
            paths.append(prods)
    if not paths:
        raise ValueError("no usable starting points outside the window")
    kappa1_hat = min(endpoint_rates) - margin
    c2_hat = math.inf
    m1_hat = 1
    for prods in paths:
        for n, pr in enumerate(prods, start=1):
            c2_hat = min(c2_hat, pr * math.exp(-kappa1_hat * n))
            # relative slack absorbs the log/exp round trip of the rate
            if pr < math.exp(kappa1_hat * n) * (1.0 - 1e-12):
                m1_hat = max(m1_hat, n + 1)
    return OutsideExpansionEstimate(
        window=window, c2_hat=c2_hat, kappa1_hat=kappa1_hat, m1_hat=m1_hat,
        censored_fraction=censored / max(1, len(paths)))


def first_hit_products(p: MapParams, window: tuple[float, float],
                       x_grid: list[float], n_max: int) -> list[float]:
    """(f^n)'(x) at the first entry time into `window`, for starts whose
    whole prefix stays outside; censored starts are skipped."""
    lo, hi = window
    out = []
    for x0 in x_grid:
        if lo < x0 < hi:
            continue
        x, prod = x0, 1.0
        for _ in range(n_max):
            prod *= deriv(p, x)
            x = eval_map(p, x)
            if lo < x < hi:
                out.append(prod)
                break
    return out


def bound_distortion_ratio(a0: float, x: float, p: int) -> float:
    """Worst two-sided ratio of (f^k)'(f(x)) against (f^k)'(f(c)) over
    k <= p, at b = 1."""
    mp = MapParams(a0, 1.0)
    u = eval_map(mp, x)
    v = eval_map(mp, CRITICAL_POINT)
    prod_u = 1.0
    prod_v = 1.0
    worst = 1.0
    for _ in range(p):
        du, dv = deriv(mp, u), deriv(mp, v)
        if du == 0.0 or dv == 0.0:
            raise InfiniteBoundError("derivative vanished along the bound pair")
        prod_u *= du
        prod_v *= dv
        ratio = prod_u / prod_v
        worst = max(worst, ratio, 1.0 / ratio)
        u, v = eval_map(mp, u), eval_map(mp, v)
    return worst


def global_distortion_ratio(a: float, a_prime: float, b: float, k: int,
                            histories: tuple[list, list] | None = None) -> float:
    """Worst two-sided ratio of the critical-value derivative products
    (f^k)'(f(c)) at two parameters; meaningful when both parameters share
    one surviving element's return history."""
    if histories is not None:
        ha, hb = histories
        if [(r.n, r.idx, r.kind) for r in ha] != [(r.n, r.idx, r.kind) for r in hb]:
            raise NotSameElementError("parameters diverge combinatorially")
    pa, pb = MapParams(a, b), MapParams(a_prime, b)
    u = eval_map(pa, CRITICAL_POINT)
    v = eval_map(pb, CRITICAL_POINT)
    prod_u = prod_v = 1.0
    for _ in range(k):
        prod_u *= deriv(pa, u)
        prod_v *= deriv(pb, v)
        u, v = eval_map(pa, u), eval_map(pb, v)
    if prod_v == 0.0 or prod_u == 0.0:
        raise InfiniteBoundError("derivative product vanished")
    ratio = prod_u / prod_v
    return max(ratio, 1.0 / ratio)


@dataclass(frozen=True)
class RecoveryReport:
    """Witness that a bound period repays the derivative loss at the return."""

    deriv_total: float                 # (f^{p+1})'(x)
    vs_escape_envelope: float          # deriv / (e^r e^{-4 sqrt p}), r = -log dist(x,c)
    vs_cycle_envelope: float | None    # deriv / e^{(kappa_tilde/4) p}
    exit_gap: float
    p: int


def recovery_check(p: MapParams, x: float, bound: BoundPeriodResult,
                   kappa_tilde: float | None = None) -> RecoveryReport:
    dist = circle_dist(x, CRITICAL_POINT)
    if dist == 0.0:
        raise InfiniteBoundError("x is the critical point")
    r_eff = -math.log(dist)
    esc = bound.recovery_deriv / (math.exp(r_eff) * math.exp(-4.0 * math.sqrt(max(bound.p, 1))))
    cyc = None
    if kappa_tilde is not None:
        cyc = bound.recovery_deriv / math.exp(0.25 * kappa_tilde * bound.p)
    return RecoveryReport(deriv_total=bound.recovery_deriv, vs_escape_envelope=esc,
                          vs_cycle_envelope=cyc, exit_gap=bound.exit_gap, p=bound.p)
