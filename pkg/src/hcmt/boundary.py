"""Detection boundaries for sparse alternatives and the power experiment.

For round(p^(1-beta)) signals of size sqrt(2 r log p), the level-scan test
at a single candidate level alpha = L_p / p^s has a sharp phase transition
in r: rejection probability tends to one above a boundary rho_s(beta) and
collapses to the test size below it.  Scanning s over an interval takes
the lower envelope of these single-level boundaries:

    rho_single:       (sqrt(s) - sqrt((1+s)/2 - beta))^2, finite only while
                      beta <= (1+s)/2;
    rho_star:         envelope over s in [0,1], piecewise beta - 1/2 then
                      (1 - sqrt(1-beta))^2 with the knot at beta = 3/4;
    rho_star_trimmed: envelope over s in [1-theta, 1-eta]; trimming the
                      small-level end (eta > 0) pushes the boundary to
                      infinity for beta > 1 - eta/2, where the scan loses
                      rate optimality entirely.

Branch knots are evaluated by continuity (intervals closed on the right),
and the two trimmed outer branches are exactly rho_single at the interval
endpoints s = 1-theta and s = 1-eta.

The power experiment estimates rejection rates on a (beta, r) grid.  The
critical value is the empirical 1-gamma quantile of the statistic under
the null with the same generator, range, and replication budget (the
asymptotic Gumbel quantile is available as an opt-in, flagged in the
result, but desk-scale convergence is log log p slow).  Cells with r = 0
draw fresh null replications rather than reusing the calibration draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig
from .datagen import AlternativeSpec
from .errors import ConfigError, RangeError
from .limits import KAPPA_FULL, hc_critical_value, kappa_poly_trimmed
from .runner import sample_statistics

__all__ = [
    "BoundaryQuery",
    "rho_single",
    "rho_star",
    "rho_star_trimmed",
    "PowerTable",
    "power_experiment",
]


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not 0.5 < beta < 1.0:
        raise RangeError("sparsity exponent must lie strictly in (1/2, 1)")
    return beta


@dataclass(frozen=True)
class BoundaryQuery:
    """Validated point (beta, s, theta, eta) for boundary evaluations."""

    beta: float
    s: float = 1.0
    theta: float = 0.999
    eta: float = 0.0

    def __post_init__(self):
        _check_beta(self.beta)
        if not 0.0 <= self.s <= 1.0:
            raise RangeError("single-level exponent s must lie in [0, 1]")
        if not 0.0 <= self.eta < self.theta < 1.0:
            raise RangeError(
                "trimming exponents must satisfy 0 <= eta < theta < 1")


def rho_single(s: float, beta: float) -> float:
    """Boundary of the single-level scan at alpha ~ p^(-s), or infinity."""
    beta = _check_beta(beta)
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise RangeError("single-level exponent s must lie in [0, 1]")
    cut = (1.0 + s) / 2.0
    if beta > cut:
        return math.inf
    return (math.sqrt(s) - math.sqrt(cut - beta)) ** 2


def rho_star(beta: float) -> float:
    """Lower envelope of rho_single over s in [0, 1]."""
    beta = _check_beta(beta)
    if beta <= 0.75:
        return beta - 0.5
    return (1.0 - math.sqrt(1.0 - beta)) ** 2


def rho_star_trimmed(theta: float, eta: float, beta: float) -> float:
    """Envelope over s in [1-theta, 1-eta]; infinite for beta > 1 - eta/2."""
    beta = _check_beta(beta)
    theta, eta = float(theta), float(eta)
    if not 0.0 <= eta < theta < 1.0:
        raise RangeError(
            "trimming exponents must satisfy 0 <= eta < theta < 1")
    if beta <= 0.75 - theta / 4.0:
        return rho_single(1.0 - theta, beta)
    if beta <= 0.75 - eta / 4.0:
        return beta - 0.5
    if beta <= 1.0 - eta / 2.0:
        # guard the radicand: it hits zero exactly at the branch endpoint
        inner = max(1.0 - beta - eta / 2.0, 0.0)
        return (math.sqrt(1.0 - eta) - math.sqrt(inner)) ** 2
    return math.inf


@dataclass(frozen=True, eq=False)
class PowerTable:
    """Rejection-rate grid with its calibration provenance."""

    betas: np.ndarray
    rs: np.ndarray
    rejection_rates: np.ndarray  # shape (len(betas), len(rs))
    critical_value: float
    calibration: str
    gamma: float
    statistic: str
    replications: int
    low_replications: bool
    alpha1: float
    alpha2: float

    def rows(self):
        """Flat (beta, r, rejection_rate) triples for tabular output."""
        for i, b in enumerate(self.betas):
            for j, r in enumerate(self.rs):
                yield float(b), float(r), float(self.rejection_rates[i, j])


def _gumbel_critical_value(config: ExperimentConfig) -> float:
    if config.statistic != "hc":
        raise ConfigError(
            "asymptotic calibration is only available for the hc statistic")
    if config.range_mode == "trimmed" and config.upper == "poly":
        kappa = kappa_poly_trimmed(config.d)
    else:
        kappa = KAPPA_FULL
    return hc_critical_value(config.p, config.gamma, scale_kappa=kappa)


def power_experiment(config: ExperimentConfig,
                     n_threads: int = 1) -> PowerTable:
    """Empirical rejection rates over the configured (beta, r) grid.

    Substream 0 is reserved for the calibration draws; grid cells use
    substreams 1, 2, ... in row-major order, so the table is reproducible
    cell by cell and identical under any thread count.
    """
    config.validate()
    if not config.power_beta_grid or not config.power_r_grid:
        raise ConfigError("power experiment needs nonempty beta and r grids")
    level_range = config.level_range()

    null_stats = sample_statistics(config, level_range, None, substream=0,
                                   n_threads=n_threads)
    if config.calibration == "simulated":
        crit = float(np.quantile(null_stats, 1.0 - config.gamma))
    else:
        crit = _gumbel_critical_value(config)

    betas = np.asarray(config.power_beta_grid, dtype=float)
    rs = np.asarray(config.power_r_grid, dtype=float)
    rates = np.empty((betas.size, rs.size))
    for i, beta in enumerate(betas):
        for j, r in enumerate(rs):
            substream = 1 + i * rs.size + j
            if r == 0.0:
                alt = None  # null cell, still a fresh substream
            else:
                alt = AlternativeSpec(beta_sparsity=float(beta),
                                      r_strength=float(r),
                                      signal_sign=config.signal_sign)
            stats = sample_statistics(config, level_range, alt,
                                      substream=substream,
                                      n_threads=n_threads)
            rates[i, j] = float(np.mean(stats > crit))

    return PowerTable(
        betas=betas,
        rs=rs,
        rejection_rates=rates,
        critical_value=crit,
        calibration=config.calibration,
        gamma=config.gamma,
        statistic=config.statistic,
        replications=config.replications,
        low_replications=config.replications < 100,
        alpha1=level_range.alpha1,
        alpha2=level_range.alpha2,
    )
