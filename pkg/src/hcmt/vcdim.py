"""Brute-force shattering checks for a one-parameter step family.

The family scanned here is f(x, s) = (s+2) for x >= s and (s-2) for x < s,
a single-breakpoint step whose subgraphs {(x, t) : t < f(x, s)} can pick out
surprisingly many subsets of a finite point cloud as s sweeps the line.
Membership patterns are piecewise constant in s, so enumerating them at a
finite set of critical values (plus midpoints and sentinels) is exact; no
sampling is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

from .errors import DataError, RangeError

MAX_POINTS = 6


@dataclass(frozen=True)
class LabeledPoint:
    """A candidate subgraph member: location x >= 0 and height t."""

    x: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.t)):
            raise RangeError("labeled points must have finite coordinates")
        if self.x < 0.0:
            raise RangeError("point locations live on the nonnegative axis")


def step_scan_value(x: float, s: float) -> float:
    """The scanned function itself: s+2 at or right of the break, s-2 left
    of it."""
    return s + 2.0 if x >= s else s - 2.0


@dataclass(frozen=True)
class SubgraphFamily:
    """A one-parameter function family together with a per-point breakpoint
    finder.

    `value(x, s)` evaluates the family member at parameter s.
    `critical_values(point)` returns every s at which that point's
    membership in the subgraph {t < f(x, s)} can switch.  Enumeration is
    exact only when the finder is complete; the `step_scan` instance is the
    one with that guarantee.
    """

    value: Callable[[float, float], float]
    critical_values: Callable[[LabeledPoint], tuple[float, ...]]

    @classmethod
    def step_scan(cls) -> "SubgraphFamily":
        # membership flips at s = x (branch switch), s = t - 2 (upper
        # branch crosses t), and s = t + 2 (lower branch crosses t)
        return cls(
            value=step_scan_value,
            critical_values=lambda pt: (pt.x, pt.t - 2.0, pt.t + 2.0),
        )


def _candidate_parameters(points, family: SubgraphFamily) -> list:
    crit = sorted({float(v) for pt in points
                   for v in family.critical_values(pt)})
    cands = list(crit)
    cands.extend((a + b) / 2.0 for a, b in zip(crit, crit[1:]))
    cands.extend((crit[0] - 1.0, crit[-1] + 1.0, -math.inf, math.inf))
    return cands


def achievable_subsets(points: Iterable[LabeledPoint],
                       family: SubgraphFamily | None = None):
    """All membership patterns the family's subgraphs realize on the points.

    Returns a set of frozensets of point indices.  Exact for the default
    step family: the pattern as a function of s is piecewise constant with
    breakpoints contained in the per-point critical values, so evaluating at
    those values, the midpoints between them, and far-out sentinels covers
    every piece.
    """
    pts = tuple(points)
    if not 1 <= len(pts) <= MAX_POINTS:
        raise DataError(
            f"subset enumeration handles 1 to {MAX_POINTS} points, "
            f"got {len(pts)}")
    fam = family if family is not None else SubgraphFamily.step_scan()
    patterns = set()
    for s in _candidate_parameters(pts, fam):
        patterns.add(frozenset(
            i for i, pt in enumerate(pts) if pt.t < fam.value(pt.x, s)))
    return patterns


def is_shattered(points: Iterable[LabeledPoint],
                 family: SubgraphFamily | None = None) -> bool:
    """Whether every subset of the points is achievable (empty: vacuously)."""
    pts = tuple(points)
    if not pts:
        return True
    return len(achievable_subsets(pts, family)) == 2 ** len(pts)
