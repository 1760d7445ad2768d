"""Recovery quality: Hausdorff distance, interval IoU, atom hits, decay rates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySet, NonPositiveError


def merge_intervals(intervals: Iterable[Sequence[float]]) -> list[tuple[float, float]]:
    """Sort and merge overlapping or touching closed intervals."""
    out: list[list[float]] = []
    for lo, hi in sorted((float(a), float(b)) for a, b in intervals):
        if lo > hi:
            raise ValueError(f"interval [{lo}, {hi}] has lower > upper")
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(lo, hi) for lo, hi in out]


@dataclass(frozen=True)
class SupportSet:
    """A finite union of points and closed intervals, in canonical form:
    intervals merged and sorted, points sorted, deduplicated and not covered
    by any interval. Degenerate intervals become points."""

    points: tuple[float, ...] = ()
    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        proper = [(a, b) for a, b in self.intervals if a < b]
        pts = [float(p) for p in self.points]
        pts += [float(a) for a, b in self.intervals if a == b]
        merged = merge_intervals(proper + [(a, b) for a, b in self.intervals if a > b])
        kept = sorted(
            {p for p in pts if not any(lo <= p <= hi for lo, hi in merged)}
        )
        object.__setattr__(self, "points", tuple(kept))
        object.__setattr__(self, "intervals", tuple(merged))

    @classmethod
    def from_spec(cls, spec) -> "SupportSet":
        points, intervals = spec.support()
        return cls(tuple(points), tuple(intervals))

    @classmethod
    def from_estimate(cls, est) -> "SupportSet":
        return cls(tuple(est.atoms), tuple(est.intervals))

    def is_empty(self) -> bool:
        return not self.points and not self.intervals

    def components(self) -> list[tuple[float, float]]:
        return sorted([(p, p) for p in self.points] + list(self.intervals))

    def distance(self, x: float) -> float:
        best = math.inf
        for lo, hi in self.components():
            if x < lo:
                d = lo - x
            elif x > hi:
                d = x - hi
            else:
                return 0.0
            best = min(best, d)
        return best


def _directed(A: SupportSet, B: SupportSet) -> float:
    """``sup_{a in A} dist(a, B)``. The distance to ``B`` is piecewise linear,
    so the supremum sits at a point of ``A``, an endpoint of an interval of
    ``A``, or the midpoint of a gap of ``B`` inside an interval of ``A``."""
    candidates = list(A.points)
    for lo, hi in A.intervals:
        candidates += [lo, hi]
    comps = B.components()
    mids = [0.5 * (u0 + l1) for (_, u0), (l1, _) in zip(comps, comps[1:])]
    for lo, hi in A.intervals:
        candidates += [m for m in mids if lo <= m <= hi]
    return max(B.distance(c) for c in candidates)


def hausdorff(A: SupportSet, B: SupportSet) -> float:
    if A.is_empty() or B.is_empty():
        raise EmptySet("Hausdorff distance needs two nonempty sets")
    return max(_directed(A, B), _directed(B, A))


def _length(intervals) -> float:
    return math.fsum(b - a for a, b in intervals)


def interval_iou(A: Sequence[Sequence[float]], B: Sequence[Sequence[float]]) -> float:
    """Intersection over union of two interval unions, by total length."""
    A = merge_intervals(A)
    B = merge_intervals(B)
    if not A and not B:
        return 1.0
    if not A or not B:
        return 0.0
    if A == B:
        return 1.0
    inter = 0.0
    i = j = 0
    while i < len(A) and j < len(B):
        lo = max(A[i][0], B[j][0])
        hi = min(A[i][1], B[j][1])
        if hi > lo:
            inter += hi - lo
        if A[i][1] < B[j][1]:
            i += 1
        else:
            j += 1
    union = _length(A) + _length(B) - inter
    if union <= 0:
        return 1.0 if A == B else 0.0
    return inter / union


@dataclass(frozen=True)
class AtomMatch:
    per_atom: tuple[bool, ...]
    false_positives: tuple[float, ...]

    @property
    def overall(self) -> bool:
        return all(self.per_atom) and not self.false_positives

    def __bool__(self) -> bool:
        return self.overall


def atom_success(truth: Sequence[float], found: Sequence[float], epsilon: float) -> AtomMatch:
    """A true atom is recovered iff exactly one found atom lies within
    ``epsilon`` of it. Found atoms at least ``epsilon`` from every true atom
    are false positives and also fail the overall verdict."""
    found = [float(f) for f in found]
    per_atom = tuple(sum(abs(f - t) < epsilon for f in found) == 1 for t in truth)
    extras = tuple(f for f in found if all(abs(f - t) >= epsilon for t in truth))
    return AtomMatch(per_atom, extras)


@dataclass(frozen=True)
class RateFit:
    rate: float
    r2: float
    slope: float
    intercept: float


def rate_fit(errors: Sequence[tuple[float, float]]) -> RateFit:
    """Least-squares fit of ``log e_n`` against ``n``; ``rate = exp(slope)``."""
    if len(errors) < 4:
        raise ValueError(f"need at least 4 samples, got {len(errors)}")
    n = np.array([float(a) for a, _ in errors])
    e = np.array([float(b) for _, b in errors])
    if np.any(~(e > 0)):
        raise NonPositiveError("errors must be strictly positive")
    log_e = np.log(e)
    slope, intercept = np.polyfit(n, log_e, 1)
    resid = log_e - (slope * n + intercept)
    ss_tot = float(np.sum((log_e - log_e.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot <= 1e-300 else 1.0 - ss_res / ss_tot
    return RateFit(math.exp(slope), r2, float(slope), float(intercept))
