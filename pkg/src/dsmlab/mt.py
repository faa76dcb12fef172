"""Preperiodic-critical parameters at b = 1 and their basic constants.

At b = 1 the critical orbit of some parameters a0 lands after m steps on a
repelling cycle of period ell (multiplier > 1) without ever hitting the
critical point itself.  Such parameters anchor the perturbative machinery:
their cycle exponent kappa_tilde = log(multiplier)/ell and the critical
gap d_bar = min_j dist(c, xi_j) feed the bound-period estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import mpmath

from .maps import (CRITICAL_POINT, MapParams, circle_dist, deriv, eval_map,
                   lift, mp_orbit, signed_circle_diff)


class SolverFailure(Exception):
    """A root bracket failed to refine; never dropped silently."""


@dataclass(frozen=True)
class PeriodicPoint:
    x: float
    multiplier: float
    residual: float


def _lift_iter(a: float, x: float, q: int) -> float:
    """q-fold lift F^q(x) at b = 1.

    The circle representative drives the sine terms; the integer part of the
    running value re-enters doubled each step, since F(y + k) = F(y) + 2k.
    """
    p = MapParams(a, 1.0)
    total = x
    cur = x % 1.0
    total_minus_cur = total - cur
    for _ in range(q):
        total = lift(p, cur) + 2.0 * total_minus_cur
        cur = total % 1.0
        total_minus_cur = total - cur
    return total


def periodic_points(a: float, q: int, refine_tol: float = 1e-13,
                    grid: int = 4096) -> list[PeriodicPoint]:
    """All solutions of f_a^q(x) = x (mod 1) at b = 1.

    Brackets the lift equation F^q(x) - x = k for each k in 0..2^q-1 on a
    uniform grid, then refines by bisection followed by a Newton polish.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    p = MapParams(a, 1.0)
    n_grid = grid * max(1, q)

    def g(x: float) -> float:
        return _lift_iter(a, x, q) - x

    xs = [i / n_grid for i in range(n_grid + 1)]
    gs = [g(x) for x in xs]
    found: list[PeriodicPoint] = []
    for k in range(2 ** q):
        for i in range(n_grid):
            v0, v1 = gs[i] - k, gs[i + 1] - k
            if v0 == 0.0:
                root = xs[i]
            elif v0 * v1 < 0.0:
                lo, hi, flo = xs[i], xs[i + 1], v0
                for _ in range(200):
                    mid = 0.5 * (lo + hi)
                    fm = g(mid) - k
                    if fm == 0.0 or hi - lo < refine_tol:
                        lo = hi = mid
                        break
                    if flo * fm < 0.0:
                        hi = mid
                    else:
                        lo, flo = mid, fm
                root = 0.5 * (lo + hi)
                # Newton polish on the lift equation
                for _ in range(4):
                    y, dp = root, 1.0
                    for _ in range(q):
                        dp *= deriv(p, y)
                        y = eval_map(p, y)
                    gg = _lift_iter(a, root, q) - root - k
                    if dp != 1.0 and abs(dp - 1.0) > 1e-12:
                        step = gg / (dp - 1.0)
                        if abs(step) < 1e-4:
                            root -= step
                root %= 1.0
            else:
                continue
            y, dp = root, 1.0
            for _ in range(q):
                dp *= deriv(p, y)
                y = eval_map(p, y)
            resid = circle_dist(y, root)
            if resid > max(1e-9, 4.0 ** q * 1e-14):
                raise SolverFailure(
                    f"bracket near x={xs[i]:.6f} (k={k}) refined to residual {resid:.3e}")
            found.append(PeriodicPoint(root, dp, resid))
    found.sort(key=lambda r: r.x)
    deduped: list[PeriodicPoint] = []
    for r in found:
        if not deduped or circle_dist(r.x, deduped[-1].x) > 1e-9:
            deduped.append(r)
    if len(deduped) > 1 and circle_dist(deduped[0].x, deduped[-1].x) <= 1e-9:
        deduped.pop()
    return deduped


@dataclass(frozen=True)
class MtParameter:
    """A preperiodic-critical parameter at b = 1 with its cycle data.

    a0_hp carries the root refined far beyond double precision; the cycle is
    repelling, so any double-precision representative decorrelates from the
    true eventually-periodic orbit within a few dozen steps.
    """

    a0: float
    m: int
    ell: int
    periodic_point: float
    multiplier: float
    kappa_tilde: float
    d_bar: float
    a0_hp: str = ""

    def __post_init__(self):
        if self.multiplier <= 1.0:
            raise ValueError("cycle multiplier must exceed 1")
        if self.d_bar <= 0.0:
            raise ValueError("critical gap must be positive")


class CriticalGap(NamedTuple):
    value: float
    provisional: bool


def critical_gap(a0: float | str, j_max: int, settled_after: int | None = None,
                 prec_bits: int | None = None) -> CriticalGap:
    """min_{1 <= j <= j_max} dist(c, f^j(c)) at b = 1.

    Exact for a preperiodic-critical parameter once j_max reaches preperiod
    plus period; flagged provisional when settled_after (= m + ell) is known
    and j_max falls short of it.  Pass prec_bits (and a high-precision a0)
    for deep horizons: the orbit error grows with the cycle multiplier, so
    doubles decorrelate after a few dozen steps.
    """
    provisional = settled_after is not None and j_max < settled_after
    if prec_bits is not None:
        with mpmath.workprec(prec_bits):
            am = mpmath.mpf(a0)
            x = mpmath.mpf("0.5")
            best = mpmath.inf
            for _ in range(j_max):
                x = mpmath.frac(2 * x + am + mpmath.sin(2 * mpmath.pi * x) / mpmath.pi)
                d = abs(mpmath.frac(x - mpmath.mpf("0.5")))
                best = min(best, min(d, 1 - d))
        return CriticalGap(float(best), provisional)
    p = MapParams(float(a0), 1.0)
    x = CRITICAL_POINT
    best = math.inf
    for _ in range(j_max):
        x = eval_map(p, x)
        best = min(best, circle_dist(x, CRITICAL_POINT))
    return CriticalGap(best, provisional)


def mp_refine_mt(a0: float, m: int, ell: int, prec_bits: int = 220) -> str:
    """Polish a preperiodic-critical root far beyond double precision.

    Newton on the lifted gap xi_{m+ell}(a) - xi_m(a), whose a-derivative
    comes from the standard recurrence; returns the root as a decimal string.
    """
    with mpmath.workprec(prec_bits):
        a = mpmath.mpf(a0)
        two_pi = 2 * mpmath.pi

        def gap_and_deriv(av):
            x = mpmath.mpf("0.5")
            da = mpmath.mpf(0)
            xm = dam = None
            lifted = mpmath.mpf(0)
            for j in range(1, m + ell + 1):
                fprime = 2 + 2 * mpmath.cos(two_pi * x)
                da = 1 + fprime * da
                x = mpmath.frac(2 * x + av + mpmath.sin(two_pi * x) / mpmath.pi)
                if j == m:
                    xm, dam = x, da
            g = mpmath.frac(x - xm + mpmath.mpf("0.5")) - mpmath.mpf("0.5")
            return g, da - dam

        for _ in range(80):
            g, dg = gap_and_deriv(a)
            if abs(g) < mpmath.mpf(2) ** (-prec_bits + 16) or dg == 0:
                break
            a -= g / dg
        return mpmath.nstr(a, int(prec_bits * 0.3010) + 2)


def verify_mt(a0: float, m: int, ell: int, prec_bits: int = 106,
              resid_tol: float = 1e-10, crit_tol: float = 1e-6) -> bool:
    """Recheck the defining properties at elevated precision: the orbit
    closes up after the preperiod, the cycle repels, and the first m + ell
    iterates keep clear of the critical point."""
    pts, _ = mp_orbit(a0, 1.0, m + ell, prec_bits=prec_bits)
    with mpmath.workprec(prec_bits):
        half = mpmath.mpf("0.5")

        def cd(u, v):
            d = abs(mpmath.frac(u - v))
            return min(d, 1 - d)

        if cd(pts[m + ell], pts[m]) >= resid_tol:
            return False
        if any(cd(pts[j], half) <= crit_tol for j in range(1, m + ell + 1)):
            return False
        mult = mpmath.mpf(1)
        x = pts[m]
        for _ in range(ell):
            mult *= 2 + 2 * mpmath.cos(2 * mpmath.pi * x)
            x = mpmath.frac(2 * x + mpmath.mpf(a0) + mpmath.sin(2 * mpmath.pi * x) / mpmath.pi)
        return mult > 1


def find_mt(m: int, ell: int, a_range: tuple[float, float],
            tol: float = 1e-13, grid_per_unit: int = 10000,
            tol_rep: float = 1e-3, tol_crit: float = 1e-6,
            orbit_tail: int = 0) -> list[MtParameter]:
    """Locate preperiodic-critical parameters with preperiod m and period ell.

    Sign-brackets the wrapped gap xi_{m+ell}(a) - xi_m(a) on a grid over the
    open range and bisects each bracket; candidates must close up to 1e-10,
    carry a repelling cycle, and keep the first m + ell iterates at least
    tol_crit away from the critical point.  Bisection is used throughout
    because the gap's a-derivative is wild near tongue boundaries.
    """
    if m < 1 or ell < 1:
        raise ValueError("need m >= 1 and ell >= 1")
    lo, hi = a_range
    if not (0.0 <= lo < hi <= 1.0):
        raise ValueError("a_range must be an ordered subinterval of [0,1]")

    def orbit_point(a: float, n: int) -> float:
        p = MapParams(a % 1.0, 1.0)   # a is circle-valued; grid may touch 1.0
        x = CRITICAL_POINT
        for _ in range(n):
            x = eval_map(p, x)
        return x

    def gap(a: float) -> float:
        xm = orbit_point(a, m)
        p = MapParams(a % 1.0, 1.0)
        xe = xm
        for _ in range(ell):
            xe = eval_map(p, xe)
        return signed_circle_diff(xe, xm)

    n_grid = max(8, int(grid_per_unit * (hi - lo)))
    xs = [lo + (hi - lo) * i / n_grid for i in range(n_grid + 1)]
    gs = [gap(a) for a in xs]
    roots: list[float] = []
    for i in range(n_grid):
        v0, v1 = gs[i], gs[i + 1]
        if v0 == 0.0 and i > 0:
            roots.append(xs[i])
            continue
        if v0 * v1 < 0.0:
            a_lo, a_hi, f_lo = xs[i], xs[i + 1], v0
            while a_hi - a_lo > tol:
                mid = 0.5 * (a_lo + a_hi)
                fm = gap(mid)
                if fm == 0.0:
                    a_lo = a_hi = mid
                    break
                if f_lo * fm < 0.0:
                    a_hi = mid
                else:
                    a_lo, f_lo = mid, fm
            roots.append(0.5 * (a_lo + a_hi))

    accepted: list[MtParameter] = []
    horizon = max(10 * (m + ell), m + ell + orbit_tail)
    for a0 in roots:
        a0 %= 1.0
        p = MapParams(a0, 1.0)
        xm = orbit_point(a0, m)
        xe = xm
        mult = 1.0
        for _ in range(ell):
            mult *= deriv(p, xe)
            xe = eval_map(p, xe)
        resid = circle_dist(xe, xm)
        if resid >= 1e-10:
            continue   # wrap artifact of the signed gap, not a root
        gap_min = min(circle_dist(orbit_point(a0, j), CRITICAL_POINT)
                      for j in range(1, m + ell + 1))
        if mult <= 1.0 + tol_rep or gap_min <= tol_crit:
            continue   # degenerate root (critical point on or near the cycle)
        if not verify_mt(a0, m, ell):
            continue
        a0_hp = mp_refine_mt(a0, m, ell)
        d_bar = critical_gap(a0_hp, horizon, prec_bits=240).value
        accepted.append(MtParameter(
            a0=float(mpmath.mpf(a0_hp)), m=m, ell=ell, periodic_point=xm,
            multiplier=mult, kappa_tilde=math.log(mult) / ell, d_bar=d_bar,
            a0_hp=a0_hp))
    accepted.sort(key=lambda r: r.a0)
    deduped: list[MtParameter] = []
    for r in accepted:
        if not deduped or abs(r.a0 - deduped[-1].a0) > 1e-9:
            deduped.append(r)
    return deduped


def smallest_mt_fixture(a_range: tuple[float, float] = (0.0, 1.0),
                        max_total: int = 5) -> MtParameter:
    """First workable preperiodic-critical parameter, scanning (m, ell) by
    total length then period.  Used as the shared test fixture."""
    combos = sorted(((mm + ll, ll, mm) for mm in range(1, max_total)
                     for ll in range(1, max_total) if mm + ll <= max_total))
    for _, ll, mm in combos:
        hits = find_mt(mm, ll, a_range)
        if hits:
            return hits[0]
    raise SolverFailure("no preperiodic-critical parameter found in range")
