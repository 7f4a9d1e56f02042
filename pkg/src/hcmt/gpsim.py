"""Reference Gaussian processes and limiting covariance grids.

Normalized bridge
-----------------
The level-scan statistic's null reference is the normalized Brownian
bridge U(alpha) = B0(alpha) / sqrt(alpha (1 - alpha)).  Under the logit
time change t = log(alpha / (1 - alpha)) this process is stationary with
correlation

    cov(U(alpha), U(nu)) = exp(-|t_alpha - t_nu| / 2)
                         = sqrt(alpha (1 - nu) / ((1 - alpha) nu)),  alpha <= nu,

an Ornstein-Uhlenbeck law, so a path on a logit-uniform grid can be drawn
exactly as a first-order autoregression: U at the first grid level is
standard normal and

    U_{k+1} = e^{-Delta_k / 2} U_k + sqrt(1 - e^{-Delta_k}) xi_k,

with Delta_k the logit step and xi_k fresh standard normals.  No
discretization error enters the covariance; only the sup is restricted to
the grid.

Second-moment limit process
---------------------------
The truncated sum-of-squares scan has a mean-zero Gaussian limit indexed
by the threshold with covariance, for lam <= nu on the decreasing variance
branch,

    sigma0(nu)/sigma0(lam) + mu0(nu) (mu0(nu) - mu0(lam)) / (sigma0(lam) sigma0(nu)),

sampled here by Cholesky factorization with a diagonal jitter ladder
(1e-12 up to 1e-8) because tight grids make the matrix near-singular.

Dependent covariance grids
--------------------------
For a stationary sequence with lag correlations rho_k, the exceedance
empirical process has covariance (on the normalized scale, lam <= nu)

    sigma0(lam) sigma0(nu) cov(lam, nu)
        = pi0(nu) (1 - pi0(lam))
          + 2 sum_{k=1}^{p-1} ((p - k)/p) (Psi(lam, nu; rho_k) - Psi(lam, nu; 0)),

where Psi is the joint two-sided tail and sigma0 here is the square root
of the exceedance variance pi0 (1 - pi0).  The big-block variant replaces
p by a block length a1 and multiplies by m a1 / n with n = m (a1 + a2).
Setting every rho_k = 0 recovers the independent kernel
pi0(nu) (1 - pi0(lam)) / (sigma0(lam) sigma0(nu)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefiniteError, RangeError
from .normal import _mu0, _sigma0_sq, mt_variance_peak, pi0, psi_tail, sigma0_sq_hc
from .stats import LevelRange

__all__ = [
    "LogitGrid",
    "CovGrid",
    "bridge_paths",
    "bridge_sup_sample",
    "mt_limit_sup_sample",
    "hc_cov_independent",
    "hc_cov_dependent",
    "hc_cov_block",
    "cov_discrepancy",
    "DEFAULT_GRID_SIZE",
]

DEFAULT_GRID_SIZE = 4096


def _logit(a):
    return np.log(a / (1.0 - a))


@dataclass(frozen=True, eq=False)
class LogitGrid:
    """Levels placed uniformly in logit time, endpoints pinned to the range."""

    levels: np.ndarray
    logits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "levels", np.asarray(self.levels, dtype=float))
        object.__setattr__(self, "logits", np.asarray(self.logits, dtype=float))
        if self.levels.ndim != 1 or self.levels.size < 1:
            raise RangeError("level grid must be a nonempty vector")
        if np.any(self.levels <= 0.0) or np.any(self.levels >= 1.0):
            raise RangeError("grid levels must lie strictly inside (0, 1)")
        if self.levels.size > 1 and np.any(np.diff(self.levels) <= 0.0):
            raise RangeError("grid levels must be strictly increasing")

    @classmethod
    def from_range(cls, level_range: LevelRange, grid_size: int) -> "LogitGrid":
        grid_size = int(grid_size)
        if grid_size < 1:
            raise RangeError("grid size must be at least 1")
        lo = _logit(level_range.alpha1)
        hi = _logit(level_range.alpha2)
        if grid_size == 1:
            logits = np.array([lo])
            levels = np.array([level_range.alpha1])
        else:
            logits = np.linspace(lo, hi, grid_size)
            levels = 1.0 / (1.0 + np.exp(-logits))
            levels[0] = level_range.alpha1
            levels[-1] = level_range.alpha2
        return cls(levels=levels, logits=logits)

    @property
    def size(self) -> int:
        return int(self.levels.size)


_COV_KINDS = ("independent", "dependent", "block", "mt_limit")


@dataclass(frozen=True, eq=False)
class CovGrid:
    """Covariance matrix over a level or threshold grid, with provenance.

    `provenance` is a tuple whose first entry names the family; the
    normalized families ("independent", "mt_limit") must carry a unit
    diagonal, the dependence-corrected ones need not.
    """

    grid_levels: np.ndarray
    matrix: np.ndarray
    provenance: tuple

    def __post_init__(self):
        g = np.asarray(self.grid_levels, dtype=float)
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (g.size, g.size):
            raise RangeError("covariance matrix shape must match the grid")
        if not self.provenance or self.provenance[0] not in _COV_KINDS:
            raise RangeError(f"unknown covariance provenance {self.provenance!r}")
        if np.max(np.abs(m - m.T)) > 1e-12:
            raise RangeError("covariance matrix must be symmetric to 1e-12")
        if self.provenance[0] in ("independent", "mt_limit"):
            if np.max(np.abs(np.diag(m) - 1.0)) > 1e-10:
                raise RangeError(
                    "normalized covariance families must have unit diagonal")


def bridge_paths(grid: LogitGrid, rng, n_paths: int) -> np.ndarray:
    """Exact stationary AR sampling of the normalized bridge on the grid.

    Returns an (n_paths, grid.size) array.  Works for any strictly
    increasing grid, logit-uniform or not, because the recursion only uses
    the logit gaps.
    """
    size = grid.size
    n_paths = int(n_paths)
    if n_paths < 1:
        raise RangeError("number of paths must be positive")
    noise = rng.standard_normal((n_paths, size))
    paths = np.empty_like(noise)
    paths[:, 0] = noise[:, 0]
    if size > 1:
        steps = np.diff(grid.logits)
        decay = np.exp(-0.5 * steps)
        innov = np.sqrt(1.0 - np.exp(-steps))
        for k in range(size - 1):
            paths[:, k + 1] = decay[k] * paths[:, k] + innov[k] * noise[:, k + 1]
    return paths


def bridge_sup_sample(level_range: LevelRange, grid_size: int, rng,
                      size: int | None = None):
    """Draw the grid supremum of the normalized bridge over the level range.

    One draw by default; pass `size` for a vector of independent draws from
    the same stream.  The path itself is exact (see module docstring), the
    only approximation is taking the maximum over `grid_size` logit-uniform
    levels instead of the continuum.
    """
    grid = LogitGrid.from_range(level_range, grid_size)
    n = 1 if size is None else int(size)
    if n < 1:
        raise RangeError("number of draws must be positive")
    sups = bridge_paths(grid, rng, n).max(axis=1)
    return float(sups[0]) if size is None else sups


def mt_limit_covariance(lambda_grid, m_trunc: float) -> CovGrid:
    """Covariance grid of the second-moment limit process on the grid."""
    lam = np.asarray(lambda_grid, dtype=float)
    if lam.ndim != 1 or lam.size < 1:
        raise RangeError("threshold grid must be a nonempty vector")
    if lam.size > 1 and np.any(np.diff(lam) <= 0.0):
        raise RangeError("threshold grid must be strictly increasing")
    m = float(m_trunc)
    peak = mt_variance_peak(m)
    if lam[0] < peak - 1e-9 or lam[-1] >= m:
        raise RangeError(
            f"threshold grid must sit on the decreasing variance branch "
            f"[{peak!r}, {m!r})"
        )
    mu = _mu0(lam, m)
    sig = np.sqrt(_sigma0_sq(lam, m))
    # for lam_i <= lam_j: sig_j/sig_i + mu_j (mu_j - mu_i) / (sig_i sig_j)
    i, j = np.meshgrid(np.arange(lam.size), np.arange(lam.size), indexing="ij")
    lo = np.minimum(i, j)
    hi = np.maximum(i, j)
    mat = sig[hi] / sig[lo] + mu[hi] * (mu[hi] - mu[lo]) / (sig[lo] * sig[hi])
    mat = 0.5 * (mat + mat.T)
    return CovGrid(grid_levels=lam, matrix=mat, provenance=("mt_limit",))


def _cholesky_with_jitter(matrix: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, escalating diagonal jitter 1e-12 to 1e-8."""
    jitters = [0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8]
    for eps in jitters:
        try:
            return np.linalg.cholesky(
                matrix + eps * np.eye(matrix.shape[0]) if eps else matrix)
        except np.linalg.LinAlgError:
            continue
    min_eig = float(np.linalg.eigvalsh(matrix).min())
    raise NotPositiveDefiniteError(
        f"covariance stayed non positive definite after jitter up to 1e-8 "
        f"(smallest eigenvalue {min_eig!r})",
        min_eigenvalue=min_eig,
    )


def mt_limit_sup_sample(lambda_grid, m_trunc: float, rng,
                        size: int | None = None):
    """Draw the grid supremum of the second-moment limit process.

    One draw by default, a vector when `size` is given.  The Gaussian
    vector is sampled through a jittered Cholesky factor of the grid
    covariance; failure past the jitter budget reports the smallest
    eigenvalue.
    """
    cov = mt_limit_covariance(lambda_grid, m_trunc)
    chol = _cholesky_with_jitter(cov.matrix)
    n = 1 if size is None else int(size)
    if n < 1:
        raise RangeError("number of draws must be positive")
    draws = rng.standard_normal((n, cov.grid_levels.size)) @ chol.T
    sups = draws.max(axis=1)
    return float(sups[0]) if size is None else sups


def _validated_rho_seq(rho_seq) -> tuple[np.ndarray, np.ndarray]:
    """Lag indices (1-based) and values, dropping negligible entries."""
    rho = np.asarray(rho_seq, dtype=float).ravel()
    if np.any(np.abs(rho) >= 1.0):
        raise RangeError("lag correlations must satisfy |rho_k| < 1")
    lags = np.arange(1, rho.size + 1)
    keep = np.abs(rho) >= 1e-12
    return lags[keep], rho[keep]


def _hc_cov_corrected(lambda_grid, rho_seq, length: int, prefactor: float,
                      provenance: tuple) -> CovGrid:
    lam = np.asarray(lambda_grid, dtype=float)
    if lam.ndim != 1 or lam.size < 1:
        raise RangeError("threshold grid must be a nonempty vector")
    if lam.size > 1 and np.any(np.diff(lam) <= 0.0):
        raise RangeError("threshold grid must be strictly increasing")
    if np.any(lam < 0.0):
        raise RangeError("thresholds must be nonnegative")
    lags, rho = _validated_rho_seq(rho_seq)
    keep = lags <= length - 1
    lags, rho = lags[keep], rho[keep]

    tails = pi0(lam)
    sig = np.sqrt(sigma0_sq_hc(lam))
    g = lam.size
    mat = np.empty((g, g))
    for i in range(g):
        for j in range(i, g):
            lo, hi = lam[i], lam[j]
            base = tails[j] * (1.0 - tails[i])
            corr = 0.0
            indep = tails[i] * tails[j]
            for k, r in zip(lags, rho):
                weight = (length - k) / length
                corr += weight * (psi_tail(lo, hi, r) - indep)
            val = prefactor * (base + 2.0 * corr) / (sig[i] * sig[j])
            mat[i, j] = val
            mat[j, i] = val
    return CovGrid(grid_levels=lam, matrix=mat, provenance=provenance)


def hc_cov_independent(lambda_grid) -> CovGrid:
    """Independent-kernel covariance pi0(nu)(1 - pi0(lam))/(sig_lam sig_nu)."""
    return _hc_cov_corrected(lambda_grid, [], length=2, prefactor=1.0,
                             provenance=("independent",))


def hc_cov_dependent(lambda_grid, rho_seq, p: int) -> CovGrid:
    """Exceedance-process covariance under lag correlations rho_k.

    Entries with |rho_k| < 1e-12 are dropped from the sum, which bounds the
    cost at O(K g^2) joint-tail evaluations for K retained lags.
    """
    p = int(p)
    if p < 2:
        raise RangeError("sequence length must be at least 2")
    return _hc_cov_corrected(lambda_grid, rho_seq, length=p, prefactor=1.0,
                             provenance=("dependent", tuple(np.asarray(rho_seq, dtype=float))))


def hc_cov_block(lambda_grid, rho_seq, a1: int, a2: int, m: int) -> CovGrid:
    """Big-block covariance: block length a1, prefactor m a1 / (m (a1 + a2))."""
    a1, a2, m = int(a1), int(a2), int(m)
    if not (a1 >= a2 >= 1):
        raise RangeError("block lengths must satisfy a1 >= a2 >= 1")
    if m < 3:
        raise RangeError("need at least 3 blocks")
    n = m * (a1 + a2)
    prefactor = m * a1 / n
    return _hc_cov_corrected(lambda_grid, rho_seq, length=a1, prefactor=prefactor,
                             provenance=("block", a1, a2, m))


def cov_discrepancy(a: CovGrid, b: CovGrid) -> float:
    """Max absolute entrywise difference between two grids on the same levels."""
    if a.grid_levels.size != b.grid_levels.size or np.any(
            a.grid_levels != b.grid_levels):
        raise RangeError("covariance grids live on different level grids")
    return float(np.max(np.abs(a.matrix - b.matrix)))
