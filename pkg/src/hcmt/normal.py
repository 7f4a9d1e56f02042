"""Standard normal kernels used throughout the package.

Univariate pieces
-----------------
phi(x) and Phi(x) are the standard normal density and cdf.  The two-sided
tail probability

    two_sided_tail(lam) = P(|Z| >= lam) = 2 * (1 - Phi(lam)),   lam >= 0,

is the null rejection level of a symmetric z-threshold, and

    sigma0_sq_hc(lam) = pi0 * (1 - pi0),   pi0 = two_sided_tail(lam),

is the variance of the corresponding 0/1 exceedance indicator.  Inverting
the tail gives the threshold for a requested level,

    hc_lambda_from_alpha(alpha) = Phi^{-1}(1 - alpha/2).

Truncated second-moment pieces
------------------------------
For a truncation window [lam, M] with 0 <= lam < M the truncated second
moment of Z and its centered variance have closed forms obtained by
integrating x^2 phi and x^4 phi by parts:

    mu0(lam, M)    = 2 * (lam phi(lam) - M phi(M) + Phi(M) - Phi(lam))
    sigma0^2(lam)  = 2 * (lam^3 phi(lam) - M^3 phi(M)) + (3 - mu0) * mu0

These standardize a truncated sum-of-squares scan.  `sigma0_sq_mt` rises
then falls in lam; the peak lam* solves lam^2 = 2 mu0(lam), and level
inversion is only well posed on the decreasing branch lam in (lam*, M).

Note the deliberate naming split: `sigma0_sq_hc` and `sigma0_sq_mt` are
unrelated variances that happen to share a historical symbol.  Neither is
a special case of the other.

Bivariate pieces
----------------
biv_cdf(x, y, rho) is the centered bivariate normal cdf with unit
variances and correlation rho, computed through the identity

    Phi2(x, y; rho) = Phi(x) Phi(y) + int_0^rho phi2(x, y; r) dr,

where phi2 is the bivariate density; the rho-integral is evaluated by
adaptive Simpson quadrature to absolute tolerance 1e-10.  The joint
two-sided tail of an equicorrelated pair,

    psi_tail(lam, nu, rho) = P(|X| >= lam, |Y| >= nu)
                           = 2 Phi2(-lam, -nu; rho) + 2 Phi2(-lam, -nu; -rho),

and its rho-derivative

    psi_density(lam, nu, rho) = 2 phi2(lam, nu; rho) - 2 phi2(lam, nu; -rho)

drive the dependent covariance sums.  (The minus sign in psi_density is
forced by psi_tail(0, 0, rho) = 1 for all rho, whose derivative must
vanish; the plus combination does not.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import NumericalError, RangeError

__all__ = [
    "std_pdf",
    "std_cdf",
    "std_quantile",
    "pi0",
    "sigma0_sq_hc",
    "hc_lambda_from_alpha",
    "MtMomentParams",
    "mu0_mt",
    "sigma0_sq_mt",
    "mt_variance_peak",
    "mt_lambda_from_alpha",
    "biv_cdf",
    "psi_tail",
    "psi_density",
]

_SQRT2PI = math.sqrt(2.0 * math.pi)


def std_pdf(x):
    """Standard normal density, vectorized."""
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x) / _SQRT2PI
    return out if out.ndim else float(out)


def std_cdf(x):
    """Standard normal cdf, vectorized, absolute error below 1e-15."""
    out = ndtr(np.asarray(x, dtype=float))
    return out if out.ndim else float(out)


def std_quantile(u):
    """Inverse standard normal cdf on the open interval (0, 1)."""
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr <= 0.0) or np.any(u_arr >= 1.0):
        raise RangeError("quantile argument must lie strictly inside (0, 1)")
    out = ndtri(u_arr)
    return out if out.ndim else float(out)


def pi0(lam):
    """Two-sided tail P(|Z| >= lam) for lam >= 0, vectorized."""
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr < 0.0):
        raise RangeError("two-sided tail needs a nonnegative threshold")
    out = 2.0 * ndtr(-lam_arr)
    return out if out.ndim else float(out)


def sigma0_sq_hc(lam):
    """Variance pi0 * (1 - pi0) of the two-sided exceedance indicator."""
    tail = pi0(lam)
    return tail * (1.0 - tail)


def hc_lambda_from_alpha(alpha):
    """Threshold lam with P(|Z| >= lam) = alpha, for alpha in (0, 1).

    Uses -Phi^{-1}(alpha/2) rather than Phi^{-1}(1 - alpha/2) so that tiny
    levels keep full relative precision.
    """
    a = np.asarray(alpha, dtype=float)
    if np.any(a <= 0.0) or np.any(a >= 1.0):
        raise RangeError("level must lie strictly inside (0, 1)")
    out = -ndtri(a / 2.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class MtMomentParams:
    """Truncation window [lam, m_trunc] for the second-moment kernels.

    `lam` may be a scalar or an array of thresholds sharing one upper
    truncation point; every entry must satisfy 0 <= lam < m_trunc.
    """

    lam: object
    m_trunc: float

    def __post_init__(self):
        m = float(self.m_trunc)
        lam_arr = np.asarray(self.lam, dtype=float)
        if not np.isfinite(m) or m <= 0.0:
            raise RangeError("upper truncation point must be positive and finite")
        if np.any(lam_arr < 0.0) or np.any(lam_arr >= m):
            raise RangeError(
                "thresholds must satisfy 0 <= lam < m_trunc "
                f"(m_trunc={m!r})"
            )


def _mu0(lam, m):
    # Phi(m) - Phi(lam) as a difference of upper tails: for thresholds deep in
    # the tail the direct cdf difference cancels catastrophically, the
    # survival form keeps full relative precision.
    return 2.0 * (lam * std_pdf(lam) - m * std_pdf(m) + ndtr(-lam) - ndtr(-m))


def _sigma0_sq(lam, m):
    mu = _mu0(lam, m)
    return 2.0 * (lam**3 * std_pdf(lam) - m**3 * std_pdf(m)) + (3.0 - mu) * mu


def mu0_mt(params: MtMomentParams):
    """Truncated second moment 2 * int_lam^M x^2 phi(x) dx in closed form."""
    lam = np.asarray(params.lam, dtype=float)
    out = _mu0(lam, float(params.m_trunc))
    return out if out.ndim else float(out)


def sigma0_sq_mt(params: MtMomentParams):
    """Variance of the truncated sum-of-squares summand, closed form."""
    lam = np.asarray(params.lam, dtype=float)
    out = _sigma0_sq(lam, float(params.m_trunc))
    return out if out.ndim else float(out)


def mt_variance_peak(m_trunc: float) -> float:
    """Location lam* of the variance maximum, the root of lam^2 = 2 mu0.

    lam^2 - 2 mu0(lam) is strictly increasing (its derivative is
    2 lam + 4 lam^2 phi(lam) > 0), negative at 0 and positive at m_trunc,
    so the root is unique; found by bisection.
    """
    m = float(m_trunc)
    if m <= 0.0:
        raise RangeError("upper truncation point must be positive")
    lo, hi = 0.0, m
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * mid - 2.0 * _mu0(mid, m) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, m):
            break
    return 0.5 * (lo + hi)


def mt_lambda_from_alpha(alpha: float, m_trunc: float) -> float:
    """Invert sigma0_sq_mt on its decreasing branch.

    Returns the threshold lam in (lam*, m_trunc) with variance alpha, where
    lam* is the variance peak.  A coarse scan brackets the root, bisection
    polishes it to relative tolerance |sigma0^2 - alpha| < 1e-12 * alpha.
    Levels at or above the peak variance are rejected with the attainable
    interval in the message.
    """
    m = float(m_trunc)
    alpha = float(alpha)
    lam_star = mt_variance_peak(m)
    peak = _sigma0_sq(lam_star, m)
    if not 0.0 < alpha < peak:
        raise RangeError(
            f"level {alpha!r} is outside the attainable interval (0, {peak!r}) "
            f"for m_trunc={m!r}"
        )
    grid = np.linspace(lam_star, m, 65)
    vals = _sigma0_sq(grid, m)
    # vals decreases from peak to 0; find the first grid point at or below alpha
    idx = int(np.argmax(vals <= alpha))
    lo, hi = grid[idx - 1], grid[idx]
    best, best_gap = lo, abs(vals[idx - 1] - alpha)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        smid = _sigma0_sq(mid, m)
        gap = abs(smid - alpha)
        if gap < best_gap:
            best, best_gap = mid, gap
        if smid > alpha:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 2.0 * np.spacing(hi):
            break
    if best_gap < 1e-12 * alpha:
        return float(best)
    raise NumericalError(
        f"threshold inversion stalled at lam={best!r} for level {alpha!r} "
        f"(residual {best_gap!r})"
    )


def _binorm_pdf(x: float, y: float, r: float) -> float:
    det = 1.0 - r * r
    expo = -(x * x - 2.0 * r * x * y + y * y) / (2.0 * det)
    return math.exp(expo) / (2.0 * math.pi * math.sqrt(det))


def _adaptive_simpson(f, a, b, tol, depth=60):
    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    return _simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)


def _simpson_step(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
    right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol or depth <= 0:
        if depth <= 0 and abs(delta) > 15.0 * tol:
            raise NumericalError("adaptive quadrature failed to converge")
        return left + right + delta / 15.0
    half = 0.5 * tol
    return _simpson_step(f, a, m, fa, flm, fm, left, half, depth - 1) + \
        _simpson_step(f, m, b, fm, frm, fb, right, half, depth - 1)


def biv_cdf(x: float, y: float, rho: float) -> float:
    """Bivariate normal cdf P(X <= x, Y <= y) with correlation rho, |rho| < 1.

    Computed as Phi(x) Phi(y) plus the integral of the bivariate density
    over correlations from 0 to rho (adaptive Simpson, absolute tolerance
    1e-10), which follows from differentiating the cdf in rho.
    """
    x, y, rho = float(x), float(y), float(rho)
    if not abs(rho) < 1.0:
        raise RangeError("correlation must satisfy |rho| < 1")
    base = float(ndtr(x)) * float(ndtr(y))
    if rho == 0.0:
        return base
    f = lambda r: _binorm_pdf(x, y, r)
    if rho > 0.0:
        corr = _adaptive_simpson(f, 0.0, rho, 1e-10)
    else:
        corr = -_adaptive_simpson(f, rho, 0.0, 1e-10)
    return base + corr


def psi_tail(lam: float, nu: float, rho: float) -> float:
    """Joint two-sided tail P(|X| >= lam, |Y| >= nu) under correlation rho."""
    lam, nu = float(lam), float(nu)
    if lam < 0.0 or nu < 0.0:
        raise RangeError("joint tail needs nonnegative thresholds")
    return 2.0 * biv_cdf(-lam, -nu, rho) + 2.0 * biv_cdf(-lam, -nu, -rho)


def psi_density(lam: float, nu: float, rho: float) -> float:
    """Derivative of psi_tail in rho: 2 phi2(lam, nu; rho) - 2 phi2(lam, nu; -rho)."""
    lam, nu, rho = float(lam), float(nu), float(rho)
    if not abs(rho) < 1.0:
        raise RangeError("correlation must satisfy |rho| < 1")
    return 2.0 * _binorm_pdf(lam, nu, rho) - 2.0 * _binorm_pdf(lam, nu, -rho)
