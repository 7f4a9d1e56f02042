"""Scan statistics for sparse signal detection and their limit theory.

The package is organized around small functional modules:

- `normal`: standard normal kernels, truncated moments, bivariate tails
- `stats`: threshold-scan statistics on p-values and on t-panels
- `limits`: extreme-value constants, critical values, range expansions
- `gpsim`: Gaussian process reference distributions and covariance grids
- `datagen`: dependent and heavy-tailed panel generators with seeded streams
- `boundary`: detection boundary curves and the power experiment harness
- `vcdim`: shattering checks for the two-sided threshold family
- `cli`: command line front end over the above

The harness modules (`config`, `runner`, `cli`) are imported by their full
paths; everything mathematical is re-exported here.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DataError,
    HcmtError,
    NotPositiveDefiniteError,
    NumericalError,
    RangeError,
)
from .normal import (
    MtMomentParams,
    biv_cdf,
    hc_lambda_from_alpha,
    mt_lambda_from_alpha,
    mt_variance_peak,
    mu0_mt,
    pi0,
    psi_density,
    psi_tail,
    sigma0_sq_hc,
    sigma0_sq_mt,
    std_cdf,
    std_pdf,
    std_quantile,
)
from .stats import (
    LevelRange,
    PValueSample,
    StatisticResult,
    TStatPanel,
    hc_statistic,
    mt_statistic,
    pvalues_from_t,
    t_statistics,
)
from .limits import (
    KAPPA_FULL,
    GumbelLimit,
    LambdaRangeExpansion,
    LocalStationaryConstants,
    gumbel_cdf,
    gumbel_quantile,
    hc_critical_value,
    kappa_poly_trimmed,
    lambda_range_expansion,
    mt_gumbel_params,
    mt_hc_normalization_gap,
    mt_horizon,
)
from .gpsim import (
    DEFAULT_GRID_SIZE,
    CovGrid,
    LogitGrid,
    bridge_paths,
    bridge_sup_sample,
    cov_discrepancy,
    hc_cov_block,
    hc_cov_dependent,
    hc_cov_independent,
    mt_limit_covariance,
    mt_limit_sup_sample,
)
from .datagen import (
    AlternativeSpec,
    DependenceSpec,
    MarginalSpec,
    gen_dependent_z,
    gen_heavy_panel,
    rng_stream,
)
from .boundary import (
    BoundaryQuery,
    PowerTable,
    power_experiment,
    rho_single,
    rho_star,
    rho_star_trimmed,
)
from .vcdim import (
    LabeledPoint,
    SubgraphFamily,
    achievable_subsets,
    is_shattered,
    step_scan_value,
)

__all__ = [
    "__version__",
    "HcmtError",
    "ConfigError",
    "RangeError",
    "NumericalError",
    "NotPositiveDefiniteError",
    "DataError",
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
    "LevelRange",
    "PValueSample",
    "TStatPanel",
    "StatisticResult",
    "t_statistics",
    "pvalues_from_t",
    "hc_statistic",
    "mt_statistic",
    "KAPPA_FULL",
    "kappa_poly_trimmed",
    "GumbelLimit",
    "gumbel_cdf",
    "gumbel_quantile",
    "hc_critical_value",
    "LambdaRangeExpansion",
    "lambda_range_expansion",
    "LocalStationaryConstants",
    "mt_horizon",
    "mt_gumbel_params",
    "mt_hc_normalization_gap",
    "DEFAULT_GRID_SIZE",
    "LogitGrid",
    "CovGrid",
    "bridge_paths",
    "bridge_sup_sample",
    "mt_limit_covariance",
    "mt_limit_sup_sample",
    "hc_cov_independent",
    "hc_cov_dependent",
    "hc_cov_block",
    "cov_discrepancy",
    "DependenceSpec",
    "MarginalSpec",
    "AlternativeSpec",
    "gen_dependent_z",
    "gen_heavy_panel",
    "rng_stream",
    "BoundaryQuery",
    "rho_single",
    "rho_star",
    "rho_star_trimmed",
    "PowerTable",
    "power_experiment",
    "LabeledPoint",
    "SubgraphFamily",
    "step_scan_value",
    "achievable_subsets",
    "is_shattered",
]
