"""Threshold-scan statistics on p-values and on t-statistic panels.

The p-value scan standardizes the empirical exceedance count at level
alpha,

    W(alpha) = (#{j : p_j <= alpha} - p alpha) / sqrt(p alpha (1 - alpha)),

and reports the supremum of W over a level range [alpha_1, alpha_2].  The
count is a right-continuous step function of alpha and W has no interior
stationary point between jumps (alpha (2k - p) = k has no root inside
(0, 1)), so the supremum is found exactly by evaluating a finite candidate
set: both range endpoints, every sorted p-value inside the range, and the
left limit at each such p-value (count minus multiplicity).  A left limit
is strictly dominated by the attained value at the same level, so the
supremum is always attained and re-evaluating W at the reported argmax
reproduces the reported value.

The second-moment scan standardizes a truncated sum of squares of
t-statistics at threshold lam,

    S(lam) = (sum_j T_j^2 1{lam <= |T_j| <= M} - p mu0(lam)) / (sqrt(p) sigma0(lam)),

with mu0 and sigma0 the truncated-moment kernels, and scans lam over the
image of a level range under the variance inversion sigma0^2(lam) = alpha.
The truncated sum is constant between consecutive |T_j| values, so the
scan evaluates suffix sums at every jump (value attained, and just above
it, where ties drop out), both endpoints, and a uniform refinement grid
inside each constant-sum segment to track the smooth part of S between
jumps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, RangeError
from .normal import _mu0, _sigma0_sq, mt_lambda_from_alpha, pi0

__all__ = [
    "PCLAMP_LO",
    "PCLAMP_HI",
    "LevelRange",
    "PValueSample",
    "TStatPanel",
    "StatisticResult",
    "t_statistics",
    "pvalues_from_t",
    "hc_statistic",
    "mt_statistic",
]

PCLAMP_LO = 1e-16
PCLAMP_HI = 1.0 - 1e-16


@dataclass(frozen=True)
class LevelRange:
    """Closed level interval [alpha1, alpha2] with 0 < alpha1 < alpha2 < 1."""

    alpha1: float
    alpha2: float

    def __post_init__(self):
        a1, a2 = float(self.alpha1), float(self.alpha2)
        if not (0.0 < a1 < a2 < 1.0):
            raise RangeError(
                f"level range needs 0 < alpha1 < alpha2 < 1, got [{a1!r}, {a2!r}]"
            )

    @classmethod
    def full(cls, p: int) -> "LevelRange":
        """The untrimmed range [1/p, 1/2]."""
        p = int(p)
        if p < 3:
            raise RangeError("full range needs p >= 3")
        return cls(1.0 / p, 0.5)

    @classmethod
    def trimmed(cls, p: int, c: float, d: float, upper: str = "loglog") -> "LevelRange":
        """Trimmed range [(log p)^c / p, u(p)] for u = (log p)^-d or p^-d.

        Raises a range error with the feasible exponent bound when the
        requested trim makes the interval empty, which happens long before
        the exponents look extreme: the lower end exceeds the loglog upper
        end as soon as (log p)^(c+d) >= p.
        """
        p = int(p)
        if p <= 3:
            raise RangeError("trimmed range needs p > e so that log log p > 0")
        logp = math.log(p)
        a1 = logp**c / p
        if upper == "loglog":
            a2 = logp ** (-d)
            c_max = logp / math.log(logp) - d
        elif upper == "poly":
            a2 = p ** (-d)
            c_max = (1.0 - d) * logp / math.log(logp)
        else:
            raise RangeError(f"unknown upper trim kind {upper!r}")
        if not (0.0 < a1 < a2 < 1.0):
            raise RangeError(
                f"trimmed range is empty at p={p}: lower end {a1!r} does not sit "
                f"below upper end {a2!r}; with d={d!r} the trim exponent must "
                f"satisfy c < {c_max:.3f}, got c={c!r}"
            )
        return cls(a1, a2)


@dataclass(frozen=True, eq=False)
class PValueSample:
    """P-values stored sorted ascending, with the original positions kept.

    `order[i]` is the index the i-th smallest p-value had in the input, and
    `n_clamped` counts values that were pushed back into the open unit
    interval upstream.
    """

    values: np.ndarray
    order: np.ndarray
    n_clamped: int = 0

    def __post_init__(self):
        if self.values.ndim != 1 or self.values.size == 0:
            raise DataError("p-value sample must be a nonempty vector")
        if np.any(~np.isfinite(self.values)):
            raise DataError("p-values must be finite")
        if np.any(self.values < 0.0) or np.any(self.values > 1.0):
            raise DataError("p-values must lie in [0, 1]")

    @classmethod
    def from_values(cls, raw, n_clamped: int = 0) -> "PValueSample":
        arr = np.asarray(raw, dtype=float).ravel()
        order = np.argsort(arr, kind="stable")
        return cls(values=arr[order], order=order, n_clamped=int(n_clamped))

    @property
    def size(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True, eq=False)
class TStatPanel:
    """t-statistics with the per-column sample size they came from."""

    t_stats: np.ndarray
    n: int

    def __post_init__(self):
        if int(self.n) < 2:
            raise DataError("panel sample size must be at least 2")
        t = np.asarray(self.t_stats, dtype=float)
        if t.ndim != 1 or t.size == 0:
            raise DataError("t-statistics must form a nonempty vector")
        if np.any(~np.isfinite(t)):
            raise DataError("t-statistics must be finite")

    @property
    def size(self) -> int:
        return int(np.asarray(self.t_stats).size)


@dataclass(frozen=True)
class StatisticResult:
    """Scan outcome: the supremum, where it was attained, and audit counts."""

    value: float
    argmax_level: float
    candidate_count: int
    n_clamped: int = 0


def t_statistics(data) -> TStatPanel:
    """One-sample t-statistics down the columns of an (n, p) panel.

    Uses the (n - 1)-denominator sample standard deviation.  A column with
    zero spread has no t-statistic; the error names the offending column.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise DataError("panel must be a 2-d array of shape (n, p)")
    n = x.shape[0]
    if n < 2:
        raise DataError("t-statistics need at least two observations per column")
    if np.any(~np.isfinite(x)):
        raise DataError("panel contains non-finite entries")
    sd = x.std(axis=0, ddof=1)
    zero = np.flatnonzero(sd == 0.0)
    if zero.size:
        raise DataError(f"column {int(zero[0])} has zero sample variance")
    return TStatPanel(t_stats=math.sqrt(n) * x.mean(axis=0) / sd, n=n)


def _as_t_array(panel) -> np.ndarray:
    if isinstance(panel, TStatPanel):
        t = np.asarray(panel.t_stats, dtype=float).ravel()
    else:
        t = np.asarray(panel, dtype=float).ravel()
    if t.size == 0:
        raise DataError("need at least one t-statistic")
    if np.any(~np.isfinite(t)):
        raise DataError("t-statistics must be finite")
    return t


def pvalues_from_t(panel) -> PValueSample:
    """Two-sided normal-reference p-values pi0(|T_j|), clamped away from 0 and 1.

    Clamping to [1e-16, 1 - 1e-16] keeps downstream level scans finite; the
    number of clamped entries is recorded on the sample rather than warned
    about.  Accepts a `TStatPanel` or a bare vector.
    """
    t = _as_t_array(panel)
    raw = pi0(np.abs(t))
    raw = np.atleast_1d(raw)
    clamped = np.clip(raw, PCLAMP_LO, PCLAMP_HI)
    n_clamped = int(np.count_nonzero(clamped != raw))
    return PValueSample.from_values(clamped, n_clamped=n_clamped)


def hc_statistic(sample, level_range: LevelRange) -> StatisticResult:
    """Exact supremum of the standardized exceedance scan over a level range.

    `sample` may be a `PValueSample` or any array of p-values (coerced).
    The candidate set is both endpoints, every p-value inside the range,
    and the left limit at each such p-value; see the module docstring for
    why this is exhaustive.
    """
    if not isinstance(sample, PValueSample):
        sample = PValueSample.from_values(sample)
    pv = sample.values
    p = pv.size
    a1, a2 = float(level_range.alpha1), float(level_range.alpha2)

    inside = pv[(pv >= a1) & (pv <= a2)]
    distinct = np.unique(inside)

    levels = [a1, a2]
    counts = [int(np.searchsorted(pv, a1, side="right")),
              int(np.searchsorted(pv, a2, side="right"))]
    attained = [True, True]
    for t in distinct:
        levels.append(float(t))
        counts.append(int(np.searchsorted(pv, t, side="right")))
        attained.append(True)
        if t > a1:
            # left limit: count strictly below t, evaluated at level t
            levels.append(float(t))
            counts.append(int(np.searchsorted(pv, t, side="left")))
            attained.append(False)

    lev = np.asarray(levels)
    cnt = np.asarray(counts, dtype=float)
    w = (cnt - p * lev) / np.sqrt(p * lev * (1.0 - lev))

    # max value, then attained before left limit, then the smallest level
    order = sorted(range(len(levels)),
                   key=lambda i: (-w[i], not attained[i], lev[i]))
    win = order[0]
    return StatisticResult(
        value=float(w[win]),
        argmax_level=float(lev[win]),
        candidate_count=len(levels),
        n_clamped=sample.n_clamped,
    )


def mt_statistic(panel, level_range: LevelRange, m_trunc: float | None = None,
                 refine: int = 64) -> StatisticResult:
    """Supremum of the standardized truncated sum-of-squares scan.

    The level range is mapped to a threshold range through the variance
    inversion (small levels sit near the upper truncation point, so the
    range flips).  `m_trunc` defaults to sqrt(2 log p).  `refine` interior
    points per constant-sum segment track the smooth part of the scan
    between jumps; 1 is the minimum, 64 the default.  Accepts a
    `TStatPanel` or a bare vector.
    """
    t = _as_t_array(panel)
    p = t.size
    if m_trunc is None:
        if p < 2:
            raise RangeError("default upper truncation needs p >= 2")
        m_trunc = math.sqrt(2.0 * math.log(p))
    m = float(m_trunc)
    if refine < 1:
        raise RangeError("refine must be at least 1")

    lam_lo = mt_lambda_from_alpha(level_range.alpha2, m)
    lam_hi = mt_lambda_from_alpha(level_range.alpha1, m)

    abs_t = np.sort(np.abs(t))
    sq = abs_t * abs_t
    suffix = np.zeros(p + 1)
    suffix[:p] = np.cumsum(sq[::-1])[::-1]
    hi_tail = suffix[np.searchsorted(abs_t, m, side="right")]

    def sum_from(lams, side):
        idx = np.searchsorted(abs_t, lams, side=side)
        return suffix[idx] - hi_tail

    jumps = np.unique(abs_t[(abs_t >= lam_lo) & (abs_t <= lam_hi)])

    levels = [lam_lo, lam_hi]
    sums = [float(sum_from(lam_lo, "left")), float(sum_from(lam_hi, "left"))]
    attained = [True, True]
    for tj in jumps:
        levels.append(float(tj))
        sums.append(float(sum_from(tj, "left")))
        attained.append(True)
        levels.append(float(tj))
        sums.append(float(sum_from(tj, "right")))
        attained.append(False)

    if refine > 0:
        bounds = np.unique(np.concatenate([[lam_lo, lam_hi], jumps]))
        for a, b in zip(bounds[:-1], bounds[1:]):
            interior = np.linspace(a, b, refine + 2)[1:-1]
            const = float(sum_from(a, "right"))
            for lam in interior:
                levels.append(float(lam))
                sums.append(const)
                attained.append(True)

    lev = np.asarray(levels)
    total = np.asarray(sums)
    denom = np.sqrt(p * _sigma0_sq(lev, m))
    s = (total - p * _mu0(lev, m)) / denom

    order = sorted(range(len(levels)),
                   key=lambda i: (-s[i], not attained[i], lev[i]))
    win = order[0]
    return StatisticResult(
        value=float(s[win]),
        argmax_level=float(lev[win]),
        candidate_count=len(levels),
        n_clamped=0,
    )
