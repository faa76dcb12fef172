"""Return window and its annulus-by-annulus partition.

The window around the critical point c is I* = (c - delta, c + delta) with
delta = e^{-r_delta}.  Each dyadic-in-e annulus at depth r (distances
between e^{-r-1} and e^{-r} from c) splits into r^2 equal cells; the cell
index is a signed pair (r, l) with r > 0 on the right of c, r < 0 on the
left, and l increasing away from c so that cell (r, r^2) coincides with
(r-1, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .maps import CRITICAL_POINT, signed_circle_diff


class IndexOutOfWindowError(Exception):
    pass


@dataclass(frozen=True)
class ReturnWindow:
    """Window radii: delta = e^{-r_delta}, optional wider delta1 = e^{-r_delta1}.

    The radii are stored as the integer exponents so endpoints and index
    arithmetic never drift apart.
    """

    r_delta: int
    r_delta1: int | None = None

    def __post_init__(self):
        if self.r_delta < 1:
            raise ValueError("r_delta must be a positive integer")
        if self.r_delta1 is not None and not (1 <= self.r_delta1 < self.r_delta):
            raise ValueError("r_delta1 must satisfy 1 <= r_delta1 < r_delta")

    @property
    def delta(self) -> float:
        return math.exp(-self.r_delta)

    @property
    def delta1(self) -> float:
        if self.r_delta1 is None:
            raise ValueError("window has no wider radius configured")
        return math.exp(-self.r_delta1)


@dataclass(frozen=True)
class PartitionIndex:
    """Signed annulus depth r (|r| >= r_delta) and cell number l in [0, r^2)."""

    r: int
    l: int

    def __post_init__(self):
        if self.r == 0:
            raise ValueError("r must be nonzero")
        if not (0 <= self.l < self.r * self.r):
            raise ValueError(f"l must lie in [0, {self.r * self.r}), got {self.l}")


def cell_length(r: int) -> float:
    """|I_{r,l}| = e^{-|r|} (1 - e^{-1}) / r^2."""
    ar = abs(r)
    return math.exp(-ar) * (1.0 - math.exp(-1.0)) / (ar * ar)


def annulus_length(r: int) -> float:
    """|I_r| = e^{-|r|} (1 - e^{-1})."""
    return math.exp(-abs(r)) * (1.0 - math.exp(-1.0))


def cell_offsets(w: ReturnWindow, idx: PartitionIndex) -> tuple[float, float]:
    """Distances from c of the cell boundaries, 0 < off_lo < off_hi.

    Offsets are the exact cell geometry; deep cells (large |r|) are narrower
    than one ulp of the anchored endpoints, so all measure arithmetic runs
    on offsets.
    """
    ar = abs(idx.r)
    if ar < w.r_delta:
        raise IndexOutOfWindowError(f"|r|={ar} is inside the window edge r_delta={w.r_delta}")
    inner = math.exp(-(ar + 1))
    L = cell_length(ar)
    return inner + idx.l * L, inner + (idx.l + 1) * L


def interval_of(w: ReturnWindow, idx: PartitionIndex) -> tuple[float, float]:
    """Endpoints (lo, hi) of cell I_{r,l}, lo < hi, both on the c side of r.

    Right side (r > 0): [c + e^{-r-1} + l L, c + e^{-r-1} + (l+1) L) with
    L the cell length; mirrored about c for r < 0.
    """
    off_lo, off_hi = cell_offsets(w, idx)
    c = CRITICAL_POINT
    if idx.r > 0:
        return c + off_lo, c + off_hi
    return c - off_hi, c - off_lo


def locate(w: ReturnWindow, x: float) -> PartitionIndex | None:
    """Cell containing x, or None when x is outside I* or exactly at c.

    Ownership: cells are half-open [lo, hi) to the right of c and (lo, hi]
    to the left, so every interior point belongs to exactly one cell.
    Ownership is exact in offset coordinates; going through an anchored
    circle point costs one rounding of x - c (see locate_offset).
    """
    return locate_offset(w, signed_circle_diff(x, CRITICAL_POINT))


def locate_offset(w: ReturnWindow, off: float) -> PartitionIndex | None:
    """Cell containing the point at signed offset `off` from c.

    In distance-from-c coordinates every cell owns [inner, outer) on both
    sides; mirrored to the circle this is [lo, hi) right of c and (lo, hi]
    left of c.
    """
    u = abs(off)
    if u == 0.0 or u >= w.delta:
        return None
    # depth r with e^{-r-1} <= u < e^{-r}; log gives a candidate, then the
    # exact comparisons settle boundary rounding.
    r = math.ceil(-math.log(u)) - 1
    while u >= math.exp(-r):
        r -= 1
    while u < math.exp(-(r + 1)):
        r += 1
    if r < w.r_delta:
        return None
    inner = math.exp(-(r + 1))
    L = cell_length(r)
    l = int((u - inner) / L)
    l = min(max(l, 0), r * r - 1)
    while l > 0 and u < inner + l * L:
        l -= 1
    while l < r * r - 1 and u >= inner + (l + 1) * L:
        l += 1
    return PartitionIndex(r if off > 0.0 else -r, l)


@dataclass(frozen=True)
class ExtendedCell:
    lo: float
    hi: float
    truncated: bool


def _neighbor(idx: PartitionIndex, step: int) -> PartitionIndex | None:
    """Neighbor cell `step` positions away from c (+1 outward, -1 inward),
    crossing annuli via the (r, r^2) = (r-1, 0) convention."""
    ar, l = abs(idx.r), idx.l + step
    if l >= ar * ar:
        ar -= 1
        if ar == 0:
            return None
        l = 0
    elif l < 0:
        ar += 1
        l = ar * ar - 1
    return PartitionIndex(ar if idx.r > 0 else -ar, l)


def extended(w: ReturnWindow, idx: PartitionIndex) -> ExtendedCell:
    """Union of the cell with both neighbors; truncated at the window edge
    when the outward neighbor would leave I*."""
    if abs(idx.r) < w.r_delta:
        raise IndexOutOfWindowError(f"|r|={abs(idx.r)} is inside the window edge")
    lo, hi = interval_of(w, idx)
    truncated = False
    inward = _neighbor(idx, -1)
    outward = _neighbor(idx, +1)
    if outward is not None and abs(outward.r) < w.r_delta:
        outward = None
    if outward is None:
        truncated = True
    pieces = [(lo, hi)]
    for nb in (inward, outward):
        if nb is not None:
            pieces.append(interval_of(w, nb))
    return ExtendedCell(min(p[0] for p in pieces), max(p[1] for p in pieces), truncated)
