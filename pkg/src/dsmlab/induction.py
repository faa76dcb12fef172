"""Desk-scale parameter-exclusion run around a preperiodic-critical anchor.

Starting from dyadic pieces of (a0 - eps, a0 - eps^2) and its mirror, each
parameter interval's critical-value image is tracked through time.  At free
returns into the window the engine deletes the preimage of the approach
sliver (c - e^{-sqrt n}, c + e^{-sqrt n}), splits essential returns into
cell preimages, adjoins partial cells and short outside stubs, and advances
survivors through bound and free periods until the stopping horizon.

Monotonicity in a of the lifted critical value (its a-derivative is >= 1)
makes every interval image an honest interval; samples plus lifted gap
recurrences track it, and a sampled monotonicity check quarantines any
element whose tracking breaks down.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Literal, NamedTuple

from .maps import CRITICAL_POINT, MapParams, circle_dist, deriv, eval_map, signed_circle_diff
from .boundfree import beta_bound_period, param_bound_period
from .mt import MtParameter
from .partition import PartitionIndex, ReturnWindow, cell_length, interval_of, locate

C = CRITICAL_POINT
TWO_PI = 2.0 * math.pi


class AccountingError(Exception):
    """Measure stopped balancing at a split; the run is aborted."""


class StoppingTime(NamedTuple):
    n_hat: int
    r0: int


NhatRule = Literal["sqrt", "double-sqrt"]


def stopping_time(b: float, rule: NhatRule = "double-sqrt") -> StoppingTime:
    """Horizon where the inflexion slope 2-2b takes over from the quadratic
    term: smallest N with 2-2b >= e^{-2 sqrt N} (default rule) or
    2-2b >= e^{-sqrt N}; also the matching annulus depth R0, the smallest
    integer with e^{-2 R0} <= e^{-sqrt N}."""
    if not (0.0 < b < 1.0):
        raise ValueError("need 0 < b < 1")
    level = -math.log(2.0 - 2.0 * b)
    if rule == "double-sqrt":
        target = (level / 2.0) ** 2
    elif rule == "sqrt":
        target = level ** 2
    else:
        raise ValueError(f"unknown rule {rule!r}")
    n_hat = max(1, math.ceil(target - 1e-9))
    r0 = max(1, math.ceil(math.sqrt(n_hat) / 2.0 - 1e-12))
    return StoppingTime(n_hat, r0)


@dataclass(frozen=True)
class InductionConfig:
    a0: MtParameter
    epsilon: float
    b: float
    r_delta: int
    beta: float | None = None
    sample_density: int = 9
    nhat_rule: NhatRule = "double-sqrt"
    r_delta1: int | None = None
    two_sided: bool = True
    n_hat_override: int | None = None
    split_bisections: int = 48
    stub_short_cells: int = 2   # outside stubs within this many cells of the
                                # coarser annulus beyond the edge are adjoined

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError("epsilon must lie in (0,1)")
        frac, _ = math.frexp(self.epsilon)
        if frac != 0.5:
            raise ValueError("epsilon must be an exact power of two")
        if not (0.0 < self.b < 1.0):
            raise ValueError("need 0 < b < 1")
        if self.r_delta < 1:
            raise ValueError("r_delta must be >= 1")
        if self.sample_density < 3:
            raise ValueError("sample_density must be >= 3")

    @property
    def n0_exp(self) -> int:
        return -math.frexp(self.epsilon)[1] + 1   # epsilon = 2^{-n0_exp}

    @property
    def window(self) -> ReturnWindow:
        r1 = self.r_delta1 if self.r_delta1 is not None else max(1, self.r_delta - 2)
        return ReturnWindow(self.r_delta, r1 if r1 < self.r_delta else None)

    @property
    def n_hat(self) -> int:
        if self.n_hat_override is not None:
            return self.n_hat_override
        return stopping_time(self.b, self.nhat_rule).n_hat

    @property
    def beta_value(self) -> float:
        return self.beta if self.beta is not None else self.a0.kappa_tilde / 100.0


@dataclass(frozen=True)
class ReturnRecord:
    n: int
    idx: PartitionIndex
    kind: Literal["essential", "inessential"]
    p: int | None = None
    s0: int | None = None
    p_pointwise: int | None = None


Status = Literal["active", "survived", "excluded", "adjoined", "quarantined"]


@dataclass
class ParamElement:
    a_lo: float
    a_hi: float
    history: list[ReturnRecord] = field(default_factory=list)
    status: Status = "active"
    n0: int | None = None
    scan_from: int = 1
    eid: int = -1
    origin: str = ""

    @property
    def measure(self) -> float:
        return self.a_hi - self.a_lo

    @property
    def a_mid(self) -> float:
        return 0.5 * (self.a_lo + self.a_hi)


class ImageState:
    """Sampled image of a -> xi_n(a, b) over one element, advanced stepwise.

    Circle positions per sample plus lifted gaps between consecutive samples
    (exact pair recurrences), so hull width and wraparound stay unambiguous
    even when neighboring samples straddle the mod-1 seam.
    """

    __slots__ = ("a", "b", "x", "gaps", "n")

    def __init__(self, a_samples: list[float], b: float):
        self.a = a_samples
        self.b = b
        self.x = [C] * len(a_samples)
        self.gaps = [0.0] * (len(a_samples) - 1)
        self.n = 0

    def advance(self) -> None:
        b = self.b
        binv = b / math.pi
        xs = self.x
        a = self.a
        gaps = self.gaps
        sins = [math.sin(TWO_PI * x) for x in xs]
        for i in range(len(gaps)):
            gaps[i] = 2.0 * gaps[i] + (a[i + 1] - a[i]) + binv * (sins[i + 1] - sins[i])
        for i in range(len(xs)):
            xs[i] = (2.0 * xs[i] + a[i] + binv * sins[i]) % 1.0
        self.n += 1

    @property
    def width(self) -> float:
        return math.fsum(self.gaps)

    @property
    def monotone(self) -> bool:
        return all(g >= 0.0 for g in self.gaps)


def _sample_points(a_lo: float, a_hi: float, density: int) -> list[float]:
    pts = [a_lo + (a_hi - a_lo) * i / (density - 1) for i in range(density)]
    return sorted(set(pts))


def _make_image(el: ParamElement, cfg: InductionConfig, upto: int) -> ImageState:
    samples = _sample_points(el.a_lo, el.a_hi, cfg.sample_density)
    img = ImageState(samples, cfg.b)
    for _ in range(upto):
        img.advance()
    return img


def _lifted_offset(a_ref: float, a: float, b: float, n: int) -> float:
    """Lifted difference of xi_n(a) and xi_n(a_ref), by the pair recurrence."""
    binv = b / math.pi
    x = y = C
    d = 0.0
    for _ in range(n):
        sx, sy = math.sin(TWO_PI * x), math.sin(TWO_PI * y)
        d = 2.0 * d + (a - a_ref) + binv * (sx - sy)
        x = (2.0 * x + a + binv * sx) % 1.0
        y = (2.0 * y + a_ref + binv * sy) % 1.0
    return d


@dataclass
class ExclusionEvent:
    time: int
    measure: float
    cause: Literal["ba", "quarantine"]
    phase: Literal["startup", "step"]
    eid: int
    a_lo: float
    fraction: float


@dataclass
class AdjoinEvent:
    time: int
    measure: float
    eid: int
    into: int


@dataclass
class RunLogLine:
    time: int
    eid: int
    kind: str
    measure: float
    detail: str = ""

    def format(self) -> str:
        return f"t={self.time} el={self.eid} {self.kind} measure={self.measure!r} {self.detail}"


class Engine:
    """Processes elements one at a time; element evolutions are independent,
    so processing order affects only id assignment, which is fixed by the
    deterministic queue order."""

    def __init__(self, cfg: InductionConfig, stop_after_first_split: bool = False):
        self.cfg = cfg
        self.window = cfg.window
        self.delta = self.window.delta
        self.n_hat = cfg.n_hat
        self.stop_after_first_split = stop_after_first_split
        self.next_eid = 0
        self.queue: deque[ParamElement] = deque()
        self.survived: list[ParamElement] = []
        self.quarantined: list[ParamElement] = []
        self.first_split_done: list[ParamElement] = []
        self.exclusions: list[ExclusionEvent] = []
        self.adjoins: list[AdjoinEvent] = []
        self.log: list[RunLogLine] = []
        self.return_times: set[int] = set()
        self.startup_k_fit = 0.0

    def new_eid(self) -> int:
        eid = self.next_eid
        self.next_eid += 1
        return eid

    def run_all(self, pieces: list[ParamElement]) -> None:
        for el in sorted(pieces, key=lambda e: e.a_lo):
            if el.eid < 0:
                el.eid = self.new_eid()
            self.queue.append(el)
        while self.queue:
            self.process(self.queue.popleft())

    # -- geometry helpers ---------------------------------------------------

    def _base_cuts(self, n: int) -> tuple[list[float], float]:
        """Offsets from c at which a returning image must be cut: window
        edges, approach-sliver edges, and every cell boundary clear of the
        sliver.  Also returns the deletion radius: the sliver half-width
        e^{-sqrt n} enlarged so surviving endpoints clear the audited
        threshold strictly.  The enlargement covers the pair-recurrence
        rounding, which doubles per step (measured ~1e-10 absolute by n=22),
        so it scales as 2^n eps; past horizon ~35 it stops being a hair."""
        z = math.exp(-math.sqrt(n)) * (1.0 + 1e-9) + 2.0 ** n * 1.8e-15
        cuts = {-self.delta, self.delta}
        if z < self.delta:
            cuts.update((-z, z))
            r_deepest = math.ceil(math.sqrt(n))
            for r in range(self.window.r_delta, r_deepest + 2):
                inner = math.exp(-(r + 1))
                L = cell_length(r)
                for l in range(r * r + 1):
                    off = inner + l * L
                    if z <= off <= self.delta:
                        cuts.update((off, -off))
        return sorted(cuts), z

    def _cut_targets(self, n: int, lo_off: float, hi_off: float,
                     copies: list[int]) -> tuple[list[float], float]:
        """Lifted cut positions inside [lo_off, hi_off], one set per window
        copy.  A wide image can cover two copies of the window, which is how
        a cell acquires up to two preimages inside one element."""
        base, z = self._base_cuts(n)
        cuts = sorted({t + k for k in copies for t in base
                       if lo_off < t + k < hi_off})
        return cuts, z

    def _full_cell_exists(self, lo_off: float, hi_off: float, z: float,
                          copies: list[int]) -> bool:
        """Does any window copy inside [lo_off, hi_off] contain a whole cell
        clear of the sliver?"""
        if z >= self.delta:
            return False
        for k in copies:
            klo, khi = lo_off - k, hi_off - k
            for side in (1, -1):
                a_off = max(klo if side > 0 else -khi, z)
                b_off = min(khi if side > 0 else -klo, self.delta)
                if b_off <= a_off:
                    continue
                r_inner = math.ceil(-math.log(a_off)) + 1
                for r in range(self.window.r_delta, r_inner + 1):
                    inner = math.exp(-(r + 1))
                    L = cell_length(r)
                    l_lo = max(0, math.ceil((a_off - inner) / L - 1e-12))
                    l_hi = min(r * r - 1, math.floor((b_off - inner) / L + 1e-12) - 1)
                    if l_lo <= l_hi:
                        return True
        return False

    # -- element stepping ---------------------------------------------------

    def process(self, el: ParamElement) -> None:
        cfg = self.cfg
        start = el.scan_from
        if el.history and el.history[-1].p is None:
            rec = el.history[-1]
            bp = param_bound_period(
                (el.a_lo, el.a_hi), cfg.b, rec.n, a_mid=el.a_mid,
                sample_density=cfg.sample_density, j_max=max(4 * self.n_hat, 64))
            cell_mid = 0.5 * sum(interval_of(self.window, rec.idx))
            try:
                pw = beta_bound_period(MapParams(el.a_mid, cfg.b), cell_mid,
                                       cfg.beta_value, j_max=max(4 * self.n_hat, 64)).p
            except Exception:
                pw = None
            el.history[-1] = replace(rec, p=bp.p, p_pointwise=pw)
            start = rec.n + bp.p + 1
            self.log.append(RunLogLine(rec.n, el.eid, "bound-period",
                                       el.measure, f"p={bp.p}"))
        if el.a_hi <= el.a_lo:
            self._finish(el, start)   # zero-width degenerate element
            return
        if start > self.n_hat:
            self._finish(el, start)
            return
        img = _make_image(el, cfg, start - 1)
        for n in range(start, self.n_hat + 1):
            img.advance()
            if not img.monotone:
                self._quarantine(el, n, "lost-monotonicity")
                return
            width = img.width
            lo_off = signed_circle_diff(img.x[0], C)
            hi_off = lo_off + width
            hits = [k for k in range(math.floor(lo_off - self.delta),
                                     math.ceil(hi_off + self.delta) + 1)
                    if lo_off < k + self.delta and hi_off > k - self.delta]
            if not hits:
                continue
            self._handle_return(el, n, lo_off, hi_off, hits)
            return
        self._finish(el, self.n_hat + 1)

    def _finish(self, el: ParamElement, n: int) -> None:
        if el.history and el.history[-1].s0 is None:
            rec = el.history[-1]
            el.history[-1] = replace(
                rec, s0=max(0, self.n_hat - (rec.n + (rec.p or 0) + 1)))
        el.status = "survived"
        self.survived.append(el)
        self.log.append(RunLogLine(min(n, self.n_hat), el.eid, "survived", el.measure))

    def _quarantine(self, el: ParamElement, n: int, why: str) -> None:
        el.status = "quarantined"
        self.quarantined.append(el)
        phase = "startup" if el.n0 is None else "step"
        self.exclusions.append(ExclusionEvent(n, el.measure, "quarantine", phase,
                                              el.eid, el.a_lo, 1.0))
        self.log.append(RunLogLine(n, el.eid, "quarantined", el.measure, why))

    def _complete_last_record(self, el: ParamElement, n: int) -> None:
        if el.history and el.history[-1].s0 is None:
            rec = el.history[-1]
            el.history[-1] = replace(rec, s0=n - (rec.n + (rec.p or 0) + 1))

    def _handle_return(self, el: ParamElement, n: int,
                       lo_off: float, hi_off: float, copies: list[int]) -> None:
        cuts, z = self._cut_targets(n, lo_off, hi_off, copies)
        if self._full_cell_exists(lo_off, hi_off, z, copies):
            self.return_times.add(n)
            self._complete_last_record(el, n)
            self._split_essential(el, n, lo_off, hi_off, cuts, z)
            return
        if el.n0 is None:
            # startup passage covering no usable cell: not yet a return
            el.scan_from = n + 1
            self.queue.append(el)
            return
        if len(copies) > 1:
            self._quarantine(el, n, "inessential contact with two window copies")
            return
        k = copies[0]
        klo, khi = lo_off - k, hi_off - k
        if klo < z and khi > -z:
            self._quarantine(el, n, "inessential return touches the approach sliver")
            return
        self._complete_last_record(el, n)
        mid_off = 0.5 * (max(klo, -self.delta) + min(khi, self.delta))
        idx = locate(self.window, C + mid_off)
        if idx is None:
            side = 1.0 if mid_off >= 0 else -1.0
            idx = locate(self.window, C + side * self.delta * (1.0 - 1e-9))
        self.return_times.add(n)
        el.history.append(ReturnRecord(n=n, idx=idx, kind="inessential"))
        el.scan_from = n + 1
        self.queue.append(el)
        self.log.append(RunLogLine(n, el.eid, "inessential-return", el.measure,
                                   f"cell=({idx.r},{idx.l})"))

    def _split_essential(self, el: ParamElement, n: int,
                         lo_off: float, hi_off: float,
                         cuts: list[float], z: float) -> None:
        cfg = self.cfg
        phase = "startup" if el.n0 is None else "step"
        offsets = [x for x in cuts if lo_off < x < hi_off]
        bounds = [el.a_lo]
        for off in offsets:
            u = off - round(off)
            if abs(u - z) <= 1e-12 * z:
                prefer = "high"     # upper sliver edge: surviving side above
            elif abs(u + z) <= 1e-12 * z:
                prefer = "low"      # lower sliver edge: surviving side below
            else:
                prefer = "mid"
            bounds.append(self._invert_offset(el, n, off - lo_off, prefer))
        bounds.append(el.a_hi)
        segs: list[dict] = []
        for i in range(len(bounds) - 1):
            s_lo, s_hi = bounds[i], bounds[i + 1]
            if s_hi <= s_lo:
                continue
            o_lo = lo_off if i == 0 else offsets[i - 1]
            o_hi = hi_off if i == len(bounds) - 2 else offsets[i]
            segs.append({"a_lo": s_lo, "a_hi": s_hi, "o_lo": o_lo, "o_hi": o_hi})
        parent_measure = el.measure
        deleted = 0.0
        ztol = 1e-12 * z
        for seg in segs:
            o_mid = 0.5 * (seg["o_lo"] + seg["o_hi"])
            k = round(o_mid)              # window copy this segment sits at
            u_lo, u_hi = seg["o_lo"] - k, seg["o_hi"] - k
            u_mid = 0.5 * (u_lo + u_hi)
            if u_lo >= -z - ztol and u_hi <= z + ztol:
                seg["role"] = "ba"
                deleted += seg["a_hi"] - seg["a_lo"]
            elif abs(u_mid) >= self.delta:
                seg["role"] = "stub"
            else:
                idx = locate(self.window, C + u_mid)
                if idx is None:
                    seg["role"] = "stub"
                else:
                    clo, chi = interval_of(self.window, idx)
                    full = (u_hi - u_lo) >= (chi - clo) * (1.0 - 1e-9)
                    seg["role"] = "cell" if full else "partial"
                    seg["idx"] = idx
        children = self._assemble_children(el, n, segs)
        child_measure = math.fsum(ch.measure for ch in children)
        resid = parent_measure - deleted - child_measure
        if abs(resid) > 1e-12 * max(parent_measure, 1e-300):
            raise AccountingError(
                f"split at t={n} unbalanced: parent={parent_measure!r} "
                f"children={child_measure!r} deleted={deleted!r}")
        if deleted > 0.0:
            frac = deleted / parent_measure
            self.exclusions.append(ExclusionEvent(n, deleted, "ba", phase,
                                                  el.eid, el.a_lo, frac))
            if phase == "startup":
                k_fit = frac * self.delta / math.exp(-math.sqrt(n))
                self.startup_k_fit = max(self.startup_k_fit, k_fit)
            self.log.append(RunLogLine(n, el.eid, "ba-delete", deleted,
                                       f"fraction={frac:.3e}"))
        for ch in children:
            if self.stop_after_first_split and ch.n0 is not None:
                self.first_split_done.append(ch)
            else:
                self.queue.append(ch)

    def _invert_offset(self, el: ParamElement, n: int, target: float,
                       prefer: str = "mid") -> float:
        """Parameter whose lifted image offset from the low endpoint's image
        equals `target`; bisection on the monotone offset map.

        The final bracket spans one representable step of a, which moves the
        image by the local a-derivative times one ulp; `prefer` picks the
        bracket side whose image is at or beyond the target ("high") or at
        or below it ("low"), so deletion cuts err into the deleted side.
        """
        lo, hi = el.a_lo, el.a_hi
        b = self.cfg.b
        for _ in range(self.cfg.split_bisections):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if _lifted_offset(el.a_lo, mid, b, n) < target:
                lo = mid
            else:
                hi = mid
        if prefer == "high":
            return hi
        if prefer == "low":
            return lo
        return 0.5 * (lo + hi)

    def _assemble_children(self, el: ParamElement, n: int,
                           segs: list[dict]) -> list[ParamElement]:
        """Adjoin partial cells and short outside stubs to an adjacent cell
        child, then materialize the children."""
        kept = [dict(ch) for ch in segs if ch["role"] != "ba"]
        edge_r = self.window.r_delta - 1 if self.window.r_delta > 1 else 1
        short_span = self.cfg.stub_short_cells * cell_length(edge_r)
        for ch in kept:
            if ch["role"] == "stub":
                k = round(0.5 * (ch["o_lo"] + ch["o_hi"]))
                beyond = max(abs(ch["o_lo"] - k), abs(ch["o_hi"] - k)) - self.delta
                ch["role"] = "stub_short" if beyond <= short_span else "stub_long"
        merged: list[dict] = []
        for ch in kept:
            if ch["role"] in ("partial", "stub_short") and merged and \
                    merged[-1]["role"] == "cell" and merged[-1]["a_hi"] == ch["a_lo"]:
                merged[-1]["a_hi"] = ch["a_hi"]
                merged[-1]["adjoined"] = merged[-1].get("adjoined", 0.0) + \
                    (ch["a_hi"] - ch["a_lo"])
                continue
            merged.append(ch)
        out: list[dict] = []
        for ch in reversed(merged):
            if ch["role"] in ("partial", "stub_short") and out and \
                    out[-1]["role"] == "cell" and ch["a_hi"] == out[-1]["a_lo"]:
                out[-1]["a_lo"] = ch["a_lo"]
                out[-1]["adjoined"] = out[-1].get("adjoined", 0.0) + \
                    (ch["a_hi"] - ch["a_lo"])
                continue
            out.append(ch)
        out.reverse()
        children: list[ParamElement] = []
        for ch in out:
            child = ParamElement(a_lo=ch["a_lo"], a_hi=ch["a_hi"],
                                 history=list(el.history), status="active",
                                 n0=el.n0, scan_from=n + 1,
                                 eid=self.new_eid(), origin=el.origin)
            role = ch["role"]
            if role in ("cell", "partial"):
                child.history.append(ReturnRecord(n=n, idx=ch["idx"], kind="essential"))
                if child.n0 is None:
                    child.n0 = n
                if ch.get("adjoined"):
                    self.adjoins.append(AdjoinEvent(n, ch["adjoined"], el.eid, child.eid))
            self.log.append(RunLogLine(n, child.eid, f"child-{role}", child.measure))
            children.append(child)
        return children


# ---------------------------------------------------------------------------
# Audits and report
# ---------------------------------------------------------------------------

@dataclass
class InductionChecklist:
    """Pass/fail and fitted margins for the running-hypothesis items (i)-(vi),
    evaluated at the element endpoints."""

    item_i: bool
    item_ii: bool
    item_iii_fit: float
    item_iv_fit: float | None
    item_v: bool
    item_vi_fit: float
    worst_v_margin: float


def verify_induction(el: ParamElement, cfg: InductionConfig,
                     n: int | None = None) -> InductionChecklist:
    """(i) derivative growth at the critical value to the last return time;
    (ii) stretched-exponential growth from n0 on; (iii) the same with a
    fitted constant; (iv) fitted return-to-return expansion; (v) the
    approach-rate condition from n0 on, constant-free; (vi) the same with a
    fitted constant (over positive times; time zero sits at c by definition).
    """
    if n is None:
        n = el.history[-1].n if el.history else 0
    n0 = el.n0 if el.n0 is not None else n + 1
    item_i = item_ii = item_v = True
    iii_fit = vi_fit = worst_v = math.inf
    iv_fit: float | None = None
    for a in (el.a_lo, el.a_hi):
        p = MapParams(a, cfg.b)
        x = eval_map(p, C)
        prods = [1.0]            # prods[k] = (f^k)'(f(c))
        pts = [x]                # pts[k] = xi_{k+1}
        prod = 1.0
        for _ in range(n):
            prod *= deriv(p, x)
            x = eval_map(p, x)
            prods.append(prod)
            pts.append(x)
        if n >= 1 and prods[n - 1] < math.exp(2.0 * (n - 1) ** (2.0 / 3.0)):
            item_i = False
        for nu in range(max(n0, 1), n):
            if prods[nu] < math.exp(nu ** (2.0 / 3.0)):
                item_ii = False
        for nu in range(1, n):
            iii_fit = min(iii_fit, prods[nu] / math.exp(nu ** (2.0 / 3.0)))
        for nu in range(max(n0, 1), n + 1):
            d = circle_dist(pts[nu - 1], C)
            worst_v = min(worst_v, d / math.exp(-math.sqrt(nu)))
            if d < math.exp(-math.sqrt(nu)):
                item_v = False
        for nu in range(1, n + 1):
            vi_fit = min(vi_fit, circle_dist(pts[nu - 1], C) / math.exp(-math.sqrt(nu)))
        ret_times = [r.n for r in el.history if r.n <= n]
        for nu in ret_times[:-1]:
            if prods[nu - 1] > 0:
                seg = prods[n - 1] / prods[nu - 1]
                iv_fit = seg if iv_fit is None else min(iv_fit, seg)
    return InductionChecklist(item_i=item_i, item_ii=item_ii,
                              item_iii_fit=iii_fit, item_iv_fit=iv_fit,
                              item_v=item_v, item_vi_fit=vi_fit,
                              worst_v_margin=worst_v)


@dataclass
class SurvivorReport:
    config: dict
    omega0_measure: float
    omega0_intervals: list[tuple[float, float]]
    n_hat: int
    r0: int
    survivors: list[ParamElement]
    exclusion_log: list[ExclusionEvent]
    adjoin_log: list[AdjoinEvent]
    run_log: list[RunLogLine]
    return_times: list[int]
    startup_k_fit: float
    audits: list[InductionChecklist]

    @property
    def total_measure(self) -> float:
        return math.fsum(el.measure for el in self.survivors)

    @property
    def excluded_measure(self) -> float:
        return math.fsum(ev.measure for ev in self.exclusion_log)

    @property
    def survivor_ratio(self) -> float:
        return self.total_measure / self.omega0_measure

    @property
    def conservation_residual(self) -> float:
        return self.omega0_measure - self.total_measure - self.excluded_measure

    def analytic_product(self, over_return_times: bool = True) -> float:
        """prod (1 - e^{-sqrt(n)/2}), over observed return times or over the
        whole range from the earliest first-return to the horizon."""
        if over_return_times:
            times = list(self.return_times)
        else:
            n0_min = min((el.n0 for el in self.survivors if el.n0 is not None),
                         default=self.n_hat)
            times = list(range(n0_min, self.n_hat + 1))
        out = 1.0
        for nn in times:
            out *= 1.0 - math.exp(-0.5 * math.sqrt(nn))
        return out

    def essential_bound_periods(self) -> list[tuple[int, int, int]]:
        """(n, |r|, p) for every completed essential return on record."""
        seen = {}
        for el in self.survivors:
            for rec in el.history:
                if rec.kind == "essential" and rec.p is not None:
                    seen[(el.eid, rec.n)] = (rec.n, abs(rec.idx.r), rec.p)
        return sorted(seen.values())

    def step_phase_ba_events(self) -> list[ExclusionEvent]:
        return [ev for ev in self.exclusion_log
                if ev.cause == "ba" and ev.phase == "step"]

    def to_json(self) -> str:
        def el_dict(el: ParamElement) -> dict:
            return {
                "id": el.eid,
                "lo_hex": float(el.a_lo).hex(),
                "hi_hex": float(el.a_hi).hex(),
                "measure": el.measure,
                "n0": el.n0,
                "returns": [{
                    "n": r.n, "r": r.idx.r, "l": r.idx.l, "kind": r.kind,
                    "p": r.p, "s0": r.s0, "p_pointwise": r.p_pointwise,
                } for r in el.history],
            }

        payload = {
            "meta": {"tool": "dsmlab", "schema": "induction-report-v1",
                     "config": self.config},
            "omega0": {
                "measure": self.omega0_measure,
                "intervals": [[float(lo).hex(), float(hi).hex()]
                              for lo, hi in self.omega0_intervals],
            },
            "stopping": {"n_hat": self.n_hat, "r0": self.r0},
            "survivors": [el_dict(el) for el in self.survivors],
            "exclusions": [{
                "time": ev.time, "measure": ev.measure, "cause": ev.cause,
                "phase": ev.phase, "element": ev.eid,
                "lo_hex": float(ev.a_lo).hex(), "fraction": ev.fraction,
            } for ev in self.exclusion_log],
            "adjoined": [{
                "time": ev.time, "measure": ev.measure,
                "from": ev.eid, "into": ev.into,
            } for ev in self.adjoin_log],
            "totals": {
                "survivor_measure": self.total_measure,
                "excluded_measure": self.excluded_measure,
                "survivor_ratio": self.survivor_ratio,
                "conservation_residual": self.conservation_residual,
                "analytic_product_run_times": self.analytic_product(True),
                "analytic_product_full": self.analytic_product(False),
            },
            "return_times": self.return_times,
            "audits": {
                "startup_k_fit": self.startup_k_fit,
                "induction_v_failures": sum(1 for ch in self.audits if not ch.item_v),
                "bound_period_law_violations": sum(
                    1 for (_, r, p) in self.essential_bound_periods()
                    if p > 8.0 * r ** 1.5),
            },
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    def format_log(self) -> str:
        return "\n".join(line.format() for line in self.run_log)


def dyadic_pieces(cfg: InductionConfig) -> tuple[list[ParamElement], list[tuple[float, float]]]:
    """Initial dyadic pieces of (a0 - eps, a0 - eps^2), mirrored to the
    right side when configured."""
    n0 = cfg.n0_exp
    pieces: list[ParamElement] = []
    intervals: list[tuple[float, float]] = []
    a0 = cfg.a0.a0
    sides = (-1, +1) if cfg.two_sided else (-1,)
    for side in sides:
        for j in range(n0, 2 * n0):
            w_lo, w_hi = 2.0 ** -(j + 1), 2.0 ** -j
            if side < 0:
                lo, hi = a0 - w_hi, a0 - w_lo
            else:
                lo, hi = a0 + w_lo, a0 + w_hi
            pieces.append(ParamElement(a_lo=lo, a_hi=hi, origin=f"eta[{side:+d}]{j}"))
            intervals.append((lo, hi))
    return pieces, intervals


def startup(cfg: InductionConfig) -> tuple[list[ParamElement], float, Engine]:
    """Run every piece to its first essential split only.

    Returns (first-return elements plus survivors, exceptional measure from
    quarantines, engine with the exclusion and adjoin logs).
    """
    engine = Engine(cfg, stop_after_first_split=True)
    pieces, _ = dyadic_pieces(cfg)
    engine.run_all(pieces)
    exceptional = math.fsum(ev.measure for ev in engine.exclusions
                            if ev.cause == "quarantine")
    done = sorted(engine.first_split_done + engine.survived, key=lambda e: e.a_lo)
    return done, exceptional, engine


def run(cfg: InductionConfig) -> SurvivorReport:
    """Full exclusion run: dyadic startup, then returns and splits until
    every element survives past the horizon or is excluded."""
    pieces, intervals = dyadic_pieces(cfg)
    engine = Engine(cfg)
    engine.run_all(pieces)
    omega0 = math.fsum(hi - lo for lo, hi in intervals)
    survivors = sorted(engine.survived, key=lambda e: e.a_lo)
    audits = [verify_induction(el, cfg) for el in survivors]
    mt = cfg.a0
    report = SurvivorReport(
        config={
            "a0": mt.a0, "m": mt.m, "ell": mt.ell, "epsilon": cfg.epsilon,
            "b": cfg.b, "r_delta": cfg.r_delta, "beta": cfg.beta,
            "sample_density": cfg.sample_density, "nhat_rule": cfg.nhat_rule,
            "two_sided": cfg.two_sided, "n_hat_override": cfg.n_hat_override,
        },
        omega0_measure=omega0,
        omega0_intervals=intervals,
        n_hat=cfg.n_hat,
        r0=max(1, math.ceil(math.sqrt(cfg.n_hat) / 2.0 - 1e-12)),
        survivors=survivors,
        exclusion_log=sorted(engine.exclusions, key=lambda e: (e.time, e.a_lo)),
        adjoin_log=sorted(engine.adjoins, key=lambda e: (e.time, e.eid)),
        run_log=engine.log,
        return_times=sorted(engine.return_times),
        startup_k_fit=engine.startup_k_fit,
        audits=audits,
    )
    if abs(report.conservation_residual) > 1e-12 * max(omega0, 1e-300):
        raise AccountingError(
            f"run conservation residual {report.conservation_residual!r}")
    return report
