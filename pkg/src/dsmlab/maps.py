"""Core map evaluation for the double standard family.

The family is  f_{a,b}(x) = 2x + a + (b/pi) sin(2 pi x)  (mod 1),
a degree-2 circle map.  For b < 1 it is a local diffeomorphism with an
inflexion point at x = 1/2 where f' = 2 - 2b; at b = 1 the inflexion
degenerates to a cubic critical point.  Everything downstream is
parameterized by the pair (a, b).

All functions here are pure; values are safe to share across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath

CRITICAL_POINT = 0.5

TWO_PI = 2.0 * math.pi


class DegenerateDerivativeError(Exception):
    """A derivative product vanished (exact critical hit at b = 1)."""


@dataclass(frozen=True)
class MapParams:
    """A point (a, b) of the parameter space, a in [0,1), b in [0,1]."""

    a: float
    b: float

    def __post_init__(self):
        if not (0.0 <= self.a < 1.0):
            raise ValueError(f"a must lie in [0,1), got {self.a}")
        if not (0.0 <= self.b <= 1.0):
            raise ValueError(f"b must lie in [0,1], got {self.b}")


def wrap(x: float) -> float:
    """Normalize a real to its circle representative in [0, 1)."""
    r = x % 1.0
    return r if r < 1.0 else 0.0   # x % 1.0 can round up to 1.0


def lift(p: MapParams, x: float) -> float:
    """Unreduced lift F(x) = 2x + a + (b/pi) sin(2 pi x); F(x+1) = F(x) + 2."""
    return 2.0 * x + p.a + (p.b / math.pi) * math.sin(TWO_PI * x)


def eval_map(p: MapParams, x: float) -> float:
    """One application of f_{a,b}, reduced mod 1."""
    return wrap(lift(p, x))


def deriv(p: MapParams, x: float) -> float:
    """f'(x) = 2 + 2b cos(2 pi x), in [2-2b, 2+2b]; independent of a."""
    return 2.0 + 2.0 * p.b * math.cos(TWO_PI * x)


def deriv2(p: MapParams, x: float) -> float:
    """f''(x) = -4 pi b sin(2 pi x), bounded by 4 pi b."""
    return -4.0 * math.pi * p.b * math.sin(TWO_PI * x)


def circle_dist(x: float, y: float) -> float:
    """Distance on the circle, min(|x-y|, 1-|x-y|) in [0, 1/2]."""
    d = abs(x - y) % 1.0
    return d if d <= 0.5 else 1.0 - d


def signed_circle_diff(x: float, y: float) -> float:
    """Representative of x - y in [-1/2, 1/2)."""
    return (x - y + 0.5) % 1.0 - 0.5


# Factors below this threshold switch derivative accumulation to log space,
# so near-critical products do not underflow.
_LOG_ACCUM_THRESHOLD = 1e-8


@dataclass
class OrbitTrace:
    """Critical-orbit data: points xi_j, derivative products, a-derivatives.

    space_derivs[k] = (f^k)'(f(c)) = prod_{j=1..k} f'(xi_j)
    param_derivs[k] = d/da xi_k, via the recurrence u_{k+1} = 1 + f'(xi_k) u_k.
    critical_hit is the first j >= 1 with xi_j exactly at the critical point
    (possible only at b = 1), None otherwise.
    """

    params: MapParams
    points: list[float] = field(default_factory=list)
    space_derivs: list[float] = field(default_factory=list)
    param_derivs: list[float] = field(default_factory=list)
    critical_hit: int | None = None


def derivative_product(factors: list[float]) -> float:
    """Product of derivative factors, switching to log space when any
    factor is tiny.  Exact zeros stay zero."""
    if any(f == 0.0 for f in factors):
        return 0.0
    if all(f >= _LOG_ACCUM_THRESHOLD for f in factors):
        out = 1.0
        for f in factors:
            out *= f
        return out
    return math.exp(math.fsum(math.log(f) for f in factors))


def iterate_critical(p: MapParams, n: int, x0: float | None = None) -> OrbitTrace:
    """Iterate n steps from the critical point (or x0), tracking
    derivative products and the transversality recurrence."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = CRITICAL_POINT if x0 is None else wrap(x0)
    trace = OrbitTrace(params=p, points=[x], space_derivs=[1.0], param_derivs=[0.0])
    log_mode = False
    log_sum = 0.0
    for k in range(n):
        trace.param_derivs.append(1.0 + deriv(p, x) * trace.param_derivs[-1])
        x = eval_map(p, x)
        trace.points.append(x)
        d = deriv(p, x)
        if d == 0.0 and trace.critical_hit is None:
            trace.critical_hit = k + 1
        if not log_mode and 0.0 < d < _LOG_ACCUM_THRESHOLD:
            log_mode = True
            log_sum = math.log(trace.space_derivs[-1]) if trace.space_derivs[-1] > 0 else -math.inf
        if log_mode:
            log_sum += math.log(d) if d > 0.0 else -math.inf
            trace.space_derivs.append(math.exp(log_sum) if log_sum > -math.inf else 0.0)
        else:
            trace.space_derivs.append(trace.space_derivs[-1] * d)
    return trace


def orbit_lift(p: MapParams, x0: float, n: int) -> float:
    """Unreduced lift of the n-th iterate: the running value accumulates the
    full F-increments while the circle representative drives the dynamics.
    Useful for degree and rotation-number style checks."""
    total = x0
    cur = x0 % 1.0
    carry = total - cur
    for _ in range(n):
        total = lift(p, cur) + 2.0 * carry
        cur = total % 1.0
        carry = total - cur
    return total


def param_deriv_closed_form(p: MapParams, n: int, x0: float | None = None) -> float:
    """d/da f^n(x) as the sum over k of (f^k)'(f^{n-k}(x)).

    Independent of the recurrence in iterate_critical; quadratic cost, kept
    as a cross-check route.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = CRITICAL_POINT if x0 is None else wrap(x0)
    orbit = [x]
    for _ in range(n):
        orbit.append(eval_map(p, orbit[-1]))
    total = 0.0
    for k in range(n):
        prod = 1.0
        y = orbit[n - k]
        for _ in range(k):
            prod *= deriv(p, y)
            y = eval_map(p, y)
        total += prod
    return total


def comparability_ratio(p: MapParams, n: int) -> float:
    """Ratio d_a xi_n / (f^{n-1})'(f(c)); equals sum_k 1/(f^k)'(f(c))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    trace = iterate_critical(p, n)
    denom = trace.space_derivs[n - 1]
    if denom == 0.0 or any(d == 0.0 for d in trace.space_derivs[:n]):
        raise DegenerateDerivativeError(
            f"derivative product vanished (critical hit at j={trace.critical_hit})")
    return trace.param_derivs[n] / denom


def lyapunov_critical(p: MapParams, n: int, burn_in: int = 0) -> float:
    """Time average of log f' over xi_{burn_in+1} .. xi_n."""
    if not (n > burn_in >= 0):
        raise ValueError("need n > burn_in >= 0")
    x = CRITICAL_POINT
    total = 0.0
    for j in range(1, n + 1):
        x = eval_map(p, x)
        if j > burn_in:
            d = deriv(p, x)
            if d <= 0.0:
                raise DegenerateDerivativeError(f"nonpositive derivative at step {j}")
            total += math.log(d)
    return total / (n - burn_in)


# ---------------------------------------------------------------------------
# Arbitrary-precision mode (oracle cross-checks, deep orbits near b = 1)
# ---------------------------------------------------------------------------

def mp_orbit(a, b, n: int, prec_bits: int = 106, x0=None):
    """Critical orbit and derivative product at `prec_bits` of precision.

    Returns (points, space_derivs) as mpmath numbers; the same conventions
    as iterate_critical.
    """
    with mpmath.workprec(prec_bits):
        am, bm = mpmath.mpf(a), mpmath.mpf(b)
        two_pi = 2 * mpmath.pi
        x = mpmath.mpf("0.5") if x0 is None else mpmath.mpf(x0)
        pts = [x]
        derivs = [mpmath.mpf(1)]
        for _ in range(n):
            x = mpmath.frac(2 * x + am + bm / mpmath.pi * mpmath.sin(two_pi * x))
            pts.append(x)
            derivs.append(derivs[-1] * (2 + 2 * bm * mpmath.cos(two_pi * x)))
        return pts, derivs


def mp_eval(a, b, x, prec_bits: int = 106):
    """One arbitrary-precision map application, reduced mod 1."""
    with mpmath.workprec(prec_bits):
        am, bm, xm = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(x)
        return mpmath.frac(2 * xm + am + bm / mpmath.pi * mpmath.sin(2 * mpmath.pi * xm))


def pair_separation_step(p: MapParams, x: float, y: float, d: float) -> float:
    """Advance the lifted separation of two orbits of the same map.

    If X, Y are lifts with X - Y = d, then after one step
    D' = 2 d + (b/pi)(sin 2 pi x - sin 2 pi y), evaluated from the circle
    representatives.  Tracking d this way keeps orbit separation exact
    (no mod-1 wrap ambiguity once |d| exceeds 1/2).
    """
    return 2.0 * d + (p.b / math.pi) * (math.sin(TWO_PI * x) - math.sin(TWO_PI * y))


def two_param_separation_step(a_hi: float, a_lo: float, b: float,
                              x: float, y: float, d: float) -> float:
    """Lifted separation step for orbits under two different a values:
    D' = 2 d + (a_hi - a_lo) + (b/pi)(sin 2 pi x - sin 2 pi y)."""
    return 2.0 * d + (a_hi - a_lo) + (b / math.pi) * (math.sin(TWO_PI * x) - math.sin(TWO_PI * y))
