"""Reproducible generators for the experiment regimes.

Three ingredients combine: a cross-sectional dependence model for the
underlying Gaussian sequence, a standardized marginal law for panel
entries, and an optional sparse alternative.

Dependence is always guaranteed structurally rather than estimated.  The
autoregressive model mixes geometrically by construction; the banded model
is m-dependent (exactly independent beyond the bandwidth).  Banded
sequences are drawn through the banded Cholesky factor of the Toeplitz
autocovariance, which reproduces the target autocorrelation exactly at
every lag while keeping the draw O(p * bandwidth).

Heavy-tailed panels keep the dependence bookkeeping on the Gaussian scale:
entries are generated as a Gaussian row transformed through its own cdf
into uniforms and then through the target marginal quantile (a Gaussian
copula).  The lag correlations quoted for the panel therefore refer to the
underlying Gaussian sequence.  Independent columns skip the copula and
draw the marginal directly.

Streams are counter-based (Philox keyed by a seed sequence), so any
(replication, substream) pair can be opened independently of every other:
parallel workers need no coordination and replay is bit-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky_banded
from scipy.signal import lfilter
from scipy.special import ndtr, stdtrit

from .errors import ConfigError, NotPositiveDefiniteError, RangeError
from .normal import std_quantile

__all__ = [
    "DependenceSpec",
    "MarginalSpec",
    "AlternativeSpec",
    "gen_dependent_z",
    "gen_heavy_panel",
    "rng_stream",
]

_RHO_TINY = 1e-12


@dataclass(frozen=True)
class DependenceSpec:
    """Cross-sectional dependence model: iid, ar1(rho), or banded(rho_seq)."""

    kind: str
    rho: float = 0.0
    rho_seq: tuple = ()

    def __post_init__(self):
        if self.kind == "iid":
            pass
        elif self.kind == "ar1":
            if not abs(self.rho) < 1.0:
                raise RangeError("ar1 correlation must satisfy |rho| < 1")
        elif self.kind == "banded":
            seq = tuple(float(r) for r in self.rho_seq)
            object.__setattr__(self, "rho_seq", seq)
            if len(seq) == 0:
                raise RangeError("banded dependence needs at least one lag")
            if any(abs(r) >= 1.0 for r in seq):
                raise RangeError("lag correlations must satisfy |rho_k| < 1")
            self._check_spectral_density(seq)
        else:
            raise ConfigError(f"unknown dependence kind {self.kind!r}")

    @staticmethod
    def _check_spectral_density(seq):
        # the autocorrelation extends to a stationary sequence only if
        # 1 + 2 sum rho_k cos(k w) stays nonnegative
        w = np.linspace(0.0, math.pi, 4096)
        dens = 1.0 + 2.0 * sum(
            r * np.cos((k + 1) * w) for k, r in enumerate(seq))
        low = float(dens.min())
        if low < -1e-9:
            raise NotPositiveDefiniteError(
                f"banded correlations are not a valid autocovariance "
                f"(spectral density reaches {low:.6g})",
                min_eigenvalue=low,
            )

    @classmethod
    def iid(cls) -> "DependenceSpec":
        return cls(kind="iid")

    @classmethod
    def ar1(cls, rho: float) -> "DependenceSpec":
        return cls(kind="ar1", rho=float(rho))

    @classmethod
    def banded(cls, rho_seq) -> "DependenceSpec":
        return cls(kind="banded", rho_seq=tuple(rho_seq))

    @property
    def bandwidth(self) -> int:
        return len(self.rho_seq) if self.kind == "banded" else 0

    def lag_correlations(self, max_lag: int) -> np.ndarray:
        """The implied rho_1..rho_max_lag, truncated where negligible."""
        if max_lag < 0:
            raise RangeError("max_lag must be nonnegative")
        if self.kind == "iid":
            return np.zeros(0)
        if self.kind == "ar1":
            vals = self.rho ** np.arange(1, max_lag + 1)
            # |rho|^k is decreasing, so dropping negligible tails keeps a prefix
            return vals[np.abs(vals) >= _RHO_TINY]
        return np.array(self.rho_seq[:max_lag])


@dataclass(frozen=True)
class MarginalSpec:
    """Standardized marginal law with a declared moment margin delta.

    The (2 + delta)-th absolute moment must be finite, strictly: a Student
    law needs df > 2 + delta and a symmetric Pareto law needs
    tail_index > 2 + delta.  All marginals have mean 0 and variance 1 by
    analytic scaling, not empirical normalization.
    """

    kind: str
    df: float = 0.0
    tail_index: float = 0.0
    delta: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.delta <= 1.0:
            raise RangeError("moment margin delta must lie in (0, 1]")
        if self.kind == "gaussian":
            pass
        elif self.kind == "student_t":
            if not self.df > 2.0 + self.delta:
                raise RangeError(
                    f"student_t needs df > 2 + delta = {2.0 + self.delta}, "
                    f"got df = {self.df}")
        elif self.kind == "pareto_sym":
            if not self.tail_index > 2.0 + self.delta:
                raise RangeError(
                    f"pareto_sym needs tail_index > 2 + delta = "
                    f"{2.0 + self.delta}, got {self.tail_index}")
        else:
            raise ConfigError(f"unknown marginal kind {self.kind!r}")

    @classmethod
    def gaussian(cls) -> "MarginalSpec":
        return cls(kind="gaussian")

    @classmethod
    def student_t(cls, df: float, delta: float = 1.0) -> "MarginalSpec":
        return cls(kind="student_t", df=float(df), delta=float(delta))

    @classmethod
    def pareto_sym(cls, tail_index: float, delta: float = 1.0) -> "MarginalSpec":
        return cls(kind="pareto_sym", tail_index=float(tail_index),
                   delta=float(delta))

    def _scale(self) -> float:
        if self.kind == "student_t":
            return math.sqrt((self.df - 2.0) / self.df)
        if self.kind == "pareto_sym":
            a = self.tail_index
            return math.sqrt((a - 2.0) / a)
        return 1.0

    def quantile(self, u):
        """Inverse cdf of the standardized marginal, elementwise on (0, 1).

        Inputs are nudged off exact 0 and 1 so that uniform draws landing on
        a representable endpoint cannot produce infinities.
        """
        u = np.clip(np.asarray(u, dtype=float), 1e-16, 1.0 - 1e-16)
        if self.kind == "gaussian":
            out = std_quantile(u)
        elif self.kind == "student_t":
            out = stdtrit(self.df, u) * self._scale()
        else:
            a = self.tail_index
            s = self._scale()
            out = np.where(u < 0.5,
                           -s * (2.0 * u) ** (-1.0 / a),
                           s * (2.0 * (1.0 - u)) ** (-1.0 / a))
        out = np.asarray(out, dtype=float)
        return out if out.ndim else float(out)

    def draw(self, rng, shape):
        """Direct standardized draws, bypassing the copula."""
        if self.kind == "gaussian":
            return rng.standard_normal(shape)
        if self.kind == "student_t":
            return rng.standard_t(self.df, size=shape) * self._scale()
        return self.quantile(rng.random(shape))


@dataclass(frozen=True)
class AlternativeSpec:
    """Sparse alternative: round(p^(1-beta)) signals of size sqrt(2 r log p)."""

    beta_sparsity: float
    r_strength: float
    signal_sign: str = "positive"

    def __post_init__(self):
        if not 0.5 < self.beta_sparsity < 1.0:
            raise RangeError("sparsity exponent must lie strictly in (1/2, 1)")
        if not self.r_strength > 0.0:
            raise RangeError("signal strength must be positive")
        if self.signal_sign not in ("positive", "random"):
            raise ConfigError(
                f"signal_sign must be 'positive' or 'random', "
                f"got {self.signal_sign!r}")

    def signal_count(self, p: int) -> int:
        count = int(round(p ** (1.0 - self.beta_sparsity)))
        if count < 1:
            raise RangeError("alternative produces no signals at this p")
        return count

    def signal_magnitude(self, p: int) -> float:
        return math.sqrt(2.0 * self.r_strength * math.log(p))


def _banded_cholesky(rho_seq, p: int) -> np.ndarray:
    """Lower-banded Cholesky factor of the Toeplitz correlation matrix."""
    bw = len(rho_seq)
    ab = np.zeros((bw + 1, p))
    ab[0, :] = 1.0
    for k, r in enumerate(rho_seq, start=1):
        if k < p:
            ab[k, : p - k] = r
    try:
        return cholesky_banded(ab, lower=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - spectral check first
        raise NotPositiveDefiniteError(
            f"banded correlation matrix is not positive definite at p={p}"
        ) from exc


def _dependent_gaussian(n: int, p: int, dep: DependenceSpec, rng) -> np.ndarray:
    """n independent rows of a length-p sequence with the target correlation."""
    if dep.kind == "iid":
        return rng.standard_normal((n, p))
    if dep.kind == "ar1":
        rho = dep.rho
        w = rng.standard_normal((n, p))
        # stationary start: unit innovation at the first slot, then
        # variance 1 - rho^2 so every marginal stays standard normal
        w[:, 1:] *= math.sqrt(1.0 - rho * rho)
        return lfilter([1.0], [1.0, -rho], w, axis=1)
    chol = _banded_cholesky(dep.rho_seq, p)
    eps = rng.standard_normal((n, p))
    x = chol[0, :] * eps
    for k in range(1, chol.shape[0]):
        x[:, k:] += chol[k, : p - k] * eps[:, : p - k]
    return x


def _signal_columns(p: int, alt: AlternativeSpec, rng):
    count = alt.signal_count(p)
    cols = rng.choice(p, size=count, replace=False)
    if alt.signal_sign == "positive":
        signs = np.ones(count)
    else:
        signs = rng.choice([-1.0, 1.0], size=count)
    return cols, signs


def gen_dependent_z(p: int, dep: DependenceSpec,
                    alt: AlternativeSpec | None, rng) -> np.ndarray:
    """One stationary Gaussian sequence, optionally with sparse mean shifts.

    The signal set is drawn uniformly from the stream, so recording the
    stream triple makes the placement reproducible.
    """
    p = int(p)
    if p < 1:
        raise RangeError("sequence length must be positive")
    z = _dependent_gaussian(1, p, dep, rng)[0]
    if alt is not None:
        cols, signs = _signal_columns(p, alt, rng)
        z[cols] += signs * alt.signal_magnitude(p)
    return z


def gen_heavy_panel(n: int, p: int, dep: DependenceSpec, marg: MarginalSpec,
                    alt: AlternativeSpec | None, rng) -> np.ndarray:
    """n x p panel: rows iid, standardized marginals, optional signal shift.

    Signal columns get a per-observation mean shift of
    sqrt(2 r log p) / sqrt(n), sized so the column t-statistic is centered
    near the z-case signal magnitude.
    """
    n, p = int(n), int(p)
    if n < 2:
        raise RangeError("panels need at least two observations per column")
    if p < 1:
        raise RangeError("panel width must be positive")
    if dep.kind == "iid":
        x = marg.draw(rng, (n, p))
    else:
        z = _dependent_gaussian(n, p, dep, rng)
        if marg.kind == "gaussian":
            x = z
        else:
            x = marg.quantile(ndtr(z))
    if alt is not None:
        cols, signs = _signal_columns(p, alt, rng)
        x[:, cols] += signs * (alt.signal_magnitude(p) / math.sqrt(n))
    return x


def rng_stream(master_seed: int, replication_index: int, substream: int = 0):
    """Counter-based generator for a (replication, substream) cell.

    Distinct triples give statistically independent streams; the same
    triple always replays the identical draw sequence.
    """
    for name, val in (("master_seed", master_seed),
                      ("replication_index", replication_index),
                      ("substream", substream)):
        if int(val) != val or val < 0:
            raise RangeError(f"{name} must be a nonnegative integer")
    seq = np.random.SeedSequence(
        [int(master_seed), int(replication_index), int(substream)])
    return np.random.Generator(np.random.Philox(seq))
