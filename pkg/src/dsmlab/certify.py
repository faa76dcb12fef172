"""Uniform-expansion certificates and parameter-plane classification.

A certificate states (f^N)'(x) >= lambda > 1 for every x on the circle.  It
is produced by covering [0,1) with closed cells, propagating each cell
through N steps as an interval with outward rounding, and lower-bounding f'
on every intermediate interval.  The derivative has its only interior
extrema at x = 0 (maximum 2+2b) and x = 1/2 (minimum 2-2b), so a rigorous
per-interval bound needs only the endpoints plus those two landmarks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .maps import (CRITICAL_POINT, DegenerateDerivativeError, MapParams,
                   circle_dist, deriv, eval_map, lift, lyapunov_critical,
                   signed_circle_diff)
from .mt import periodic_points

# Absolute slack covering float evaluation error of f, f' at the interval
# endpoints plus the landmark values.  Scales with b because at b = 0 the
# map data (f' = 2, image endpoints) are exact in floats.
_EVAL_SLOP_COEFF = 1e-13
_EVAL_SLOP_FLOOR = 4e-16


def _slop(b: float) -> float:
    if b == 0.0:
        return 0.0
    return _EVAL_SLOP_FLOOR + _EVAL_SLOP_COEFF * b


def _contains_shifted(lo: float, hi: float, frac_point: float) -> bool:
    """Does [lo, hi] (lift coordinates) contain frac_point mod 1?"""
    return math.floor(hi - frac_point) >= math.ceil(lo - frac_point)


def deriv_range_on_interval(p: MapParams, lo: float, hi: float) -> tuple[float, float]:
    """Rigorous enclosure of f' over [lo, hi] (lift coordinates, hi - lo <= 1).

    Endpoint values bracket f' except across the landmarks x = 0 (max) and
    x = 1/2 (min), which are checked for membership explicitly.
    """
    s = _slop(p.b)
    d_lo, d_hi = deriv(p, lo), deriv(p, hi)
    dmin = min(d_lo, d_hi)
    dmax = max(d_lo, d_hi)
    if _contains_shifted(lo, hi, 0.5):
        dmin = min(dmin, 2.0 - 2.0 * p.b)
    if _contains_shifted(lo, hi, 0.0):
        dmax = max(dmax, 2.0 + 2.0 * p.b)
    return dmin - s, dmax + s


@dataclass(frozen=True)
class ExpansionCertificate:
    params: MapParams
    n_steps: int
    lam: float
    cells: int
    max_cell_width: float
    method: Literal["interval-propagation"] = "interval-propagation"


@dataclass(frozen=True)
class Refutation:
    params: MapParams
    n_steps: int
    witness: float
    upper_bound: float


@dataclass(frozen=True)
class Inconclusive:
    params: MapParams
    n_steps: int
    best_lower: float
    cells_done: int
    cells_stuck: int


CertifyOutcome = ExpansionCertificate | Refutation | Inconclusive


def _cell_product_bounds(p: MapParams, lo: float, hi: float, n: int) -> tuple[float, float] | None:
    """Lower/upper bounds of (f^n)' over the cell, or None when an image
    interval grows past width 1/2 (caller must split)."""
    s = _slop(p.b)
    lo_k, hi_k = lo, hi
    prod_lo, prod_hi = 1.0, 1.0
    for k in range(n):
        dmin, dmax = deriv_range_on_interval(p, lo_k, hi_k)
        prod_lo *= max(dmin, 0.0)
        prod_hi *= dmax
        if k == n - 1:
            break
        lo_k, hi_k = lift(p, lo_k) - s, lift(p, hi_k) + s
        if hi_k - lo_k > 0.5:
            return None
        shift = math.floor(lo_k)
        lo_k -= shift
        hi_k -= shift
    return prod_lo, prod_hi


def certify_uniform(p: MapParams, n_steps: int, lambda_target: float,
                    max_depth: int = 24) -> CertifyOutcome:
    """Prove (f^N)' >= lambda_target everywhere, refute it with a witness
    cell where the rigorous upper bound sinks below 1, or give up at the
    subdivision depth limit."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if lambda_target <= 1.0:
        raise ValueError("lambda_target must exceed 1")
    # initial split keeps every cell width <= 1/2
    stack: list[tuple[float, float, int]] = [(0.0, 0.5, 1), (0.5, 1.0, 1)]
    best_lambda = math.inf
    max_width = 0.0
    cells_done = 0
    stuck = 0
    best_lower_overall = math.inf
    while stack:
        lo, hi, depth = stack.pop()
        bounds = _cell_product_bounds(p, lo, hi, n_steps)
        if bounds is not None:
            prod_lo, prod_hi = bounds
            if prod_hi < 1.0:
                return Refutation(params=p, n_steps=n_steps,
                                  witness=0.5 * (lo + hi) % 1.0, upper_bound=prod_hi)
            if prod_lo >= lambda_target:
                cells_done += 1
                best_lambda = min(best_lambda, prod_lo)
                max_width = max(max_width, hi - lo)
                continue
            best_lower_overall = min(best_lower_overall, prod_lo)
        if depth >= max_depth:
            stuck += 1
            continue
        mid = 0.5 * (lo + hi)
        stack.append((lo, mid, depth + 1))
        stack.append((mid, hi, depth + 1))
    if stuck == 0:
        return ExpansionCertificate(params=p, n_steps=n_steps, lam=best_lambda,
                                    cells=cells_done, max_cell_width=max_width)
    return Inconclusive(params=p, n_steps=n_steps,
                        best_lower=best_lower_overall if best_lower_overall < math.inf else 0.0,
                        cells_done=cells_done, cells_stuck=stuck)


def check_certificate(cert: ExpansionCertificate, n_samples: int = 100_000,
                      seed: int = 0) -> bool:
    """Sampling can never contradict a sound certificate; returns True when
    n_samples random points all satisfy the certified bound."""
    rng = np.random.default_rng(seed)
    x = rng.random(n_samples)
    prod = np.ones(n_samples)
    a, b = cert.params.a, cert.params.b
    for _ in range(cert.n_steps):
        prod *= 2.0 + 2.0 * b * np.cos(2.0 * np.pi * x)
        x = (2.0 * x + a + (b / np.pi) * np.sin(2.0 * np.pi * x)) % 1.0
    return bool(np.all(prod >= cert.lam - 1e-12))


# ---------------------------------------------------------------------------
# Parameter-plane classification
# ---------------------------------------------------------------------------

TongueClass = Literal["tongue", "neutral", "expanding_candidate",
                      "certified_expanding", "undecided"]

NEUTRAL_TOL = 1e-6

DEFAULT_SCHEDULE = (1, 2, 4, 8, 16, 32, 64)


@dataclass(frozen=True)
class PlaneCell:
    a: float
    b: float
    cls: TongueClass
    period: int | None = None
    multiplier: float | None = None
    lyapunov: float | None = None
    cert_n: int | None = None
    cert_lambda: float | None = None
    diagnostics: dict = field(default_factory=dict)


def _refine_cycle(p: MapParams, x0: float, q: int) -> tuple[float, float] | None:
    """Newton-refine a period-q point near x0; returns (x, multiplier)."""
    x = x0 % 1.0
    for _ in range(60):
        dp, u = 1.0, x
        for _ in range(q):
            dp *= deriv(p, u)
            u = eval_map(p, u)
        resid = signed_circle_diff(u, x)
        if abs(resid) < 1e-13:
            return x, dp
        denom = dp - 1.0
        if abs(denom) < 1e-9:
            return None
        step = resid / denom
        if abs(step) > 0.05:
            step = math.copysign(0.05, step)
        x = (x - step) % 1.0
    return None


def classify_point(a: float, b: float, max_iter: int = 2000,
                   period_cap: int = 32, tol: float = 1e-7,
                   schedule: Sequence[int] = DEFAULT_SCHEDULE,
                   max_depth: int = 16) -> PlaneCell:
    """Classify one parameter-plane point by its critical orbit.

    The family carries at most one attracting or neutral cycle, so probing
    the critical orbit suffices: near-recurrence flags a candidate cycle,
    Newton pins it down, and the multiplier decides tongue against neutral.
    Otherwise a positive Lyapunov estimate triggers certification attempts
    with N walking up the schedule.
    """
    p = MapParams(a % 1.0, b)   # a is circle-valued; grids may touch 1.0
    orbit = [CRITICAL_POINT]
    for _ in range(max_iter):
        orbit.append(eval_map(p, orbit[-1]))
    burn = max_iter // 2
    for q in range(1, period_cap + 1):
        tail = orbit[burn:]
        if len(tail) <= q:
            break
        if circle_dist(tail[-1], tail[-1 - q]) < tol:
            refined = _refine_cycle(p, tail[-1], q)
            if refined is None:
                continue
            x_star, mult = refined
            if abs(mult) < 1.0 - NEUTRAL_TOL:
                return PlaneCell(a, b, "tongue", period=q, multiplier=mult,
                                 diagnostics={"cycle_x": x_star})
            if abs(abs(mult) - 1.0) <= NEUTRAL_TOL:
                return PlaneCell(a, b, "neutral", period=q, multiplier=mult,
                                 diagnostics={"cycle_x": x_star})
            break   # repelling cycle shadowed by the orbit; fall through
    try:
        lyap = lyapunov_critical(p, n=max_iter, burn_in=burn)
    except DegenerateDerivativeError:
        return PlaneCell(a, b, "undecided",
                         diagnostics={"max_iter": max_iter, "reason": "zero derivative"})
    if lyap > 0.0:
        best_lower = 0.0
        for n_try in schedule:
            outcome = certify_uniform(p, n_try, lambda_target=1.0 + 1e-6,
                                      max_depth=max_depth)
            if isinstance(outcome, ExpansionCertificate):
                return PlaneCell(a, b, "certified_expanding", lyapunov=lyap,
                                 cert_n=n_try, cert_lambda=outcome.lam)
            if isinstance(outcome, Inconclusive):
                best_lower = max(best_lower, outcome.best_lower)
        return PlaneCell(a, b, "expanding_candidate", lyapunov=lyap,
                         diagnostics={"max_iter": max_iter, "best_lambda": best_lower})
    return PlaneCell(a, b, "undecided", lyapunov=lyap,
                     diagnostics={"max_iter": max_iter, "best_lambda": 0.0})


def scan_plane(a_range: tuple[float, float], b_range: tuple[float, float],
               resolution: tuple[int, int],
               schedule: Sequence[int] = DEFAULT_SCHEDULE,
               max_iter: int = 2000, period_cap: int = 32,
               pmap=map) -> list[PlaneCell]:
    """Classify a grid of parameter points; rows in fixed (b, a) order.

    `pmap` is a map-like callable supplied by the caller (the CLI passes a
    worker pool's map); result order is grid order regardless of scheduling.
    """
    na, nb = resolution
    if na < 2 or nb < 2:
        raise ValueError("resolution must be >= 2 per axis")
    a_vals = [a_range[0] + (a_range[1] - a_range[0]) * i / (na - 1) for i in range(na)]
    b_vals = [b_range[0] + (b_range[1] - b_range[0]) * j / (nb - 1) for j in range(nb)]
    tasks = [(a, b) for b in b_vals for a in a_vals]
    return list(pmap(_classify_task, [(a, b, max_iter, period_cap, tuple(schedule))
                                      for a, b in tasks]))


def _classify_task(args) -> PlaneCell:
    a, b, max_iter, period_cap, schedule = args
    return classify_point(a, b, max_iter=max_iter, period_cap=period_cap,
                          schedule=schedule)


class TongueNotFoundError(Exception):
    pass


def _has_attracting_cycle(b: float, period: int, a_values: Sequence[float],
                          max_iter: int, period_cap: int) -> float | None:
    """Witnessing a with an attracting cycle of the exact period, else None."""
    for a in a_values:
        cell = classify_point(a, b, max_iter=max_iter, period_cap=period_cap,
                              schedule=())
        if cell.cls == "tongue" and cell.period == period:
            return a
    return None


def tongue_tip(period: int, a_window: tuple[float, float], b_tol: float = 1e-6,
               b_max: float = 0.999, a_grid: int = 65,
               max_iter: int = 1500) -> tuple[float, float]:
    """Lowest b carrying an attracting cycle of the given period for some a
    in the window, by bisection in b over an inner a-scan.

    Returns (a_star, b_star) with the witnessing a.  The a-grid has odd
    cardinality so a symmetric window keeps its midpoint on the grid.
    """
    if period < 1:
        raise ValueError("period must be >= 1")
    lo_a, hi_a = a_window
    grid = max(3, a_grid | 1)
    a_values = [lo_a + (hi_a - lo_a) * i / (grid - 1) for i in range(grid)]
    period_cap = max(2 * period, period + 2)
    hi = b_max
    witness = _has_attracting_cycle(hi, period, a_values, max_iter, period_cap)
    if witness is None:
        raise TongueNotFoundError(
            f"no attracting period-{period} cycle found at b={b_max} in {a_window}")
    lo = 0.0
    while hi - lo > b_tol:
        mid = 0.5 * (lo + hi)
        w = _has_attracting_cycle(mid, period, a_values, max_iter, period_cap)
        if w is None:
            lo = mid
        else:
            hi, witness = mid, w
    return witness, hi
