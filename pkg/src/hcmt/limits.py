"""Extreme-value limits, normalizing sequences, and critical values.

The normalized level-scan supremum, centered and scaled by

    a_p = sqrt(2 log log p),
    b_p = (2 log log p + (1/2) log log log p) / a_p,

converges to a Gumbel-family law with cdf exp(-kappa e^{-x}).  The scale
constant kappa is 1/(2 sqrt(pi)) for the full level range and
(1 - d)/(2 sqrt(pi)) when the upper end is polynomially trimmed to p^-d.
Quantiles invert in closed form, x = -log(log(1/u) / kappa), which is how
critical values are produced.

The threshold-range endpoints implied by a trimmed level range satisfy
asymptotic expansions (o(1) terms dropped here, the exact inverted roots
always reported alongside):

    lam1^2 = 2 d log log p - log log log p - log(pi d)     (loglog upper trim)
    lam1^2 = 2 d log p     - log log p     - log(pi d)     (poly upper trim)
    lam2^2 = 2 log p - (2c + 1) log log p - log  pi        (both variants)

For the second-moment scan the limit process is locally stationary on a
log-variance time horizon T, and the classical extreme-value constants for
such processes are

    a_T = sqrt(2 log T),
    b_T = a_T + a_T^{-1} ( (2-alpha)/(2 alpha) log log T
                           + log(C H_alpha (2 pi)^{-1/2} 2^{(2-alpha)/(2 alpha)}) ),

normalizing to the standard Gumbel exp(-e^{-x}).  At alpha = 1, C = 1/2,
H_1 = 1 the logarithm's argument collapses to 1/(2 sqrt(pi)), tying the
two Gumbel forms together; `mt_hc_normalization_gap` measures how fast the
two centerings agree as p grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RangeError
from .normal import hc_lambda_from_alpha
from .stats import LevelRange

__all__ = [
    "KAPPA_FULL",
    "kappa_poly_trimmed",
    "GumbelLimit",
    "LocalStationaryConstants",
    "gumbel_cdf",
    "gumbel_quantile",
    "hc_critical_value",
    "LambdaRangeExpansion",
    "lambda_range_expansion",
    "mt_horizon",
    "mt_gumbel_params",
    "mt_hc_normalization_gap",
]

KAPPA_FULL = 1.0 / (2.0 * math.sqrt(math.pi))

MIN_P_FOR_NORMALIZATION = 16  # smallest p with log log log p real


def kappa_poly_trimmed(d: float) -> float:
    """Scale constant (1 - d)/(2 sqrt(pi)) for an upper trim at p^-d."""
    d = float(d)
    if not 0.0 <= d < 1.0:
        raise RangeError("poly trim exponent must lie in [0, 1)")
    return (1.0 - d) / (2.0 * math.sqrt(math.pi))


@dataclass(frozen=True)
class GumbelLimit:
    """Gumbel-family law exp(-kappa e^{-x}) with its normalizing pair."""

    scale_kappa: float
    a_p: float
    b_p: float

    def __post_init__(self):
        if not float(self.scale_kappa) > 0.0:
            raise RangeError("Gumbel scale constant must be positive")

    @classmethod
    def from_p(cls, p: int, scale_kappa: float = KAPPA_FULL) -> "GumbelLimit":
        p = int(p)
        if p < MIN_P_FOR_NORMALIZATION:
            raise RangeError(
                f"normalizing sequences need p >= {MIN_P_FOR_NORMALIZATION} "
                "(log log log p must be real)"
            )
        ll = math.log(math.log(p))
        a = math.sqrt(2.0 * ll)
        b = (2.0 * ll + 0.5 * math.log(ll)) / a
        return cls(scale_kappa=float(scale_kappa), a_p=a, b_p=b)


def gumbel_cdf(limit: GumbelLimit, x):
    """cdf exp(-kappa e^{-x}), vectorized in x."""
    x = np.asarray(x, dtype=float)
    out = np.exp(-limit.scale_kappa * np.exp(-x))
    return out if out.ndim else float(out)


def gumbel_quantile(limit: GumbelLimit, u):
    """Quantile -log(log(1/u) / kappa) for u strictly inside (0, 1)."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise RangeError("Gumbel quantile argument must lie inside (0, 1)")
    out = -np.log(np.log(1.0 / u) / limit.scale_kappa)
    return out if out.ndim else float(out)


def hc_critical_value(p: int, gamma: float, scale_kappa: float = KAPPA_FULL) -> float:
    """Asymptotic level-gamma critical value b_p + x_gamma / a_p.

    x_gamma is the (1 - gamma)-quantile of the Gumbel-family limit.  The
    finite-p gap between this and the simulated reference quantile is a
    measured quantity, not an error; see the acceptance suite.
    """
    gamma = float(gamma)
    if not 0.0 < gamma < 1.0:
        raise RangeError("test level gamma must lie inside (0, 1)")
    limit = GumbelLimit.from_p(p, scale_kappa)
    x = gumbel_quantile(limit, 1.0 - gamma)
    return limit.b_p + x / limit.a_p


@dataclass(frozen=True)
class LambdaRangeExpansion:
    """Asymptotic threshold-range endpoints next to their exact roots."""

    lambda1_approx: float
    lambda2_approx: float
    lambda1_exact: float
    lambda2_exact: float


def lambda_range_expansion(p: int, c: float, d: float,
                           variant: str = "hc_loglog") -> LambdaRangeExpansion:
    """Expansion of the threshold range implied by a trimmed level range.

    The level range is [(log p)^c / p, u(p)] with u = (log p)^-d for the
    `hc_loglog` variant and u = p^-d for the `hc_poly` variant.  The upper
    level end maps to the lower threshold lam1 and vice versa.  Exact roots
    come from the tail inversion; the approximations drop the o(1) terms.
    """
    p = int(p)
    c, d = float(c), float(d)
    if d <= 0.0 or c < 0.0:
        raise RangeError("trim exponents need d > 0 and c >= 0")
    logp = math.log(p)

    if variant == "hc_loglog":
        if p < MIN_P_FOR_NORMALIZATION:
            raise RangeError("loglog variant needs p >= 16 for log log log p")
        lam1_sq = 2.0 * d * math.log(logp) - math.log(math.log(logp)) - math.log(math.pi * d)
    elif variant == "hc_poly":
        if logp <= 1.0:
            raise RangeError("poly variant needs p > e")
        lam1_sq = 2.0 * d * logp - math.log(logp) - math.log(math.pi * d)
    else:
        raise RangeError(f"unknown expansion variant {variant!r}")

    lam2_sq = 2.0 * logp - (2.0 * c + 1.0) * math.log(logp) - math.log(math.pi)
    if lam1_sq <= 0.0 or lam2_sq <= 0.0:
        raise RangeError(
            f"expansion undefined at p={p}: squared thresholds "
            f"({lam1_sq!r}, {lam2_sq!r}) must be positive"
        )

    upper = "loglog" if variant == "hc_loglog" else "poly"
    rng = LevelRange.trimmed(p, c, d, upper=upper)
    return LambdaRangeExpansion(
        lambda1_approx=math.sqrt(lam1_sq),
        lambda2_approx=math.sqrt(lam2_sq),
        lambda1_exact=hc_lambda_from_alpha(rng.alpha2),
        lambda2_exact=hc_lambda_from_alpha(rng.alpha1),
    )


@dataclass(frozen=True)
class LocalStationaryConstants:
    """Constants of a locally stationary Gaussian extreme-value family."""

    alpha_index: float
    c_fun: float
    h_alpha: float
    horizon_T: float

    def __post_init__(self):
        if not 0.0 < float(self.alpha_index) <= 2.0:
            raise RangeError("local-stationarity index must lie in (0, 2]")
        if not float(self.c_fun) > 0.0:
            raise RangeError("covariance constant must be positive")
        if not float(self.h_alpha) > 0.0:
            raise RangeError("Pickands-type constant must be positive")
        if not float(self.horizon_T) > 0.0:
            raise RangeError("time horizon must be positive")


def mt_horizon(p: int, c: float, d: float) -> float:
    """Log-variance horizon (1 - d) log p - c log log p of the trimmed scan."""
    p = int(p)
    if p <= 3:
        raise RangeError("horizon needs p > e")
    return (1.0 - float(d)) * math.log(p) - float(c) * math.log(math.log(p))


def mt_gumbel_params(consts: LocalStationaryConstants) -> tuple[float, float]:
    """Normalizing pair (a_T, b_T) toward the standard Gumbel exp(-e^{-x})."""
    t = float(consts.horizon_T)
    if t <= math.e:
        raise RangeError("horizon must exceed e for log log T to be positive")
    alpha = float(consts.alpha_index)
    a = math.sqrt(2.0 * math.log(t))
    coeff = (2.0 - alpha) / (2.0 * alpha)
    log_arg = consts.c_fun * consts.h_alpha * (2.0 * math.pi) ** -0.5 * 2.0**coeff
    b = a + (coeff * math.log(math.log(t)) + math.log(log_arg)) / a
    return a, b


def mt_hc_normalization_gap(p: int, c: float, d: float) -> float:
    """Centering mismatch between the two Gumbel routes, scaled by a_T.

    Route one: the locally stationary constants at alpha = 1, C = 1/2,
    H = 1 on the horizon T_p, normalizing to the standard Gumbel.  Route
    two: the trimmed-range Gumbel with kappa = (1 - d)/(2 sqrt(pi)), whose
    standard-Gumbel-equivalent centering is b_p + log(kappa)/a_p.  The
    scaled difference a_T (b_T - b_p - log(kappa)/a_p) tends to 0 as p
    grows, which is the computable content of the claim that the two limit
    statements agree.
    """
    t = mt_horizon(p, c, d)
    consts = LocalStationaryConstants(alpha_index=1.0, c_fun=0.5, h_alpha=1.0,
                                      horizon_T=t)
    a_t, b_t = mt_gumbel_params(consts)
    kappa = kappa_poly_trimmed(d)
    limit = GumbelLimit.from_p(p, kappa)
    b_equiv = limit.b_p + math.log(kappa) / limit.a_p
    return a_t * (b_t - b_equiv)
