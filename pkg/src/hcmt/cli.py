"""Command line front end: deterministic experiments writing commented CSV.

Subcommands
-----------
hc, mt        simulate the scan statistic (or evaluate it on --data) and
              write one row per replication
null-dist     null law of the statistic against its two references: a
              simulated limit-process supremum sample (two-sample KS) and
              the extreme-value law (one-sample KS on the normalized scale)
bridge-sup    sample the normalized-bridge supremum on the level range
cov-gap       formula-level covariance discrepancy between a dependent
              design and independence, swept over trimming exponents
boundary     detection boundary table over a beta grid
power         rejection-rate grid from the power experiment
mdr-check     empirical two-sided t-statistic tail against the normal tail
vc-check      shattering verification for the step scan family

Every CSV starts with '#'-prefixed comment lines carrying the code version
and the full resolved configuration, and ends with a '#'-prefixed summary
block, so a result file is self-describing.  Identical configuration and
seed produce byte-identical files regardless of the thread count.

Exit codes: 0 on success, 2 for configuration or input errors, 3 for
numerical failures.  Output files of a failed run are removed rather than
left half-written.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .boundary import power_experiment, rho_star, rho_star_trimmed
from .config import ExperimentConfig
from .datagen import rng_stream
from .errors import (
    ConfigError,
    DataError,
    HcmtError,
    NumericalError,
    RangeError,
)
from .gpsim import LogitGrid, bridge_sup_sample, cov_discrepancy, \
    hc_cov_dependent, hc_cov_independent, mt_limit_sup_sample
from .limits import (
    KAPPA_FULL,
    GumbelLimit,
    LocalStationaryConstants,
    gumbel_cdf,
    kappa_poly_trimmed,
    mt_gumbel_params,
    mt_horizon,
)
from .normal import hc_lambda_from_alpha, mt_lambda_from_alpha, pi0
from .runner import (
    compute_statistic,
    config_comment_lines,
    ks_distance_to_cdf,
    ks_distance_two_sample,
    mdr_tail_ratios,
    resolve_threads,
    sample_statistics,
    write_csv,
)
from .stats import LevelRange
from .vcdim import LabeledPoint, achievable_subsets, is_shattered

SUMMARY_QUANTILES = (0.5, 0.9, 0.95, 0.99)
COV_GAP_DEFAULT_GRID = 128
MDR_GRID_POINTS = 26
VC_QUADRUPLES = 500

# CLI flag -> config field, applied only when the flag was given
_OVERRIDE_FIELDS = {
    "statistic": "statistic",
    "p": "p",
    "n": "n",
    "replications": "replications",
    "seed": "master_seed",
    "threads": "threads",
    "gamma": "gamma",
    "output": "output",
    "grid_size": "grid_size",
    "refine": "refine",
    "m_trunc": "m_trunc",
    "range": "range_mode",
    "c": "c",
    "d": "d",
    "upper": "upper",
    "alpha1": "alpha1",
    "alpha2": "alpha2",
    "dep": "dep_kind",
    "rho": "rho",
    "rho_seq": "rho_seq",
    "marginal": "marg_kind",
    "df": "df",
    "tail_index": "tail_index",
    "delta": "delta",
    "alt": "alt_enabled",
    "beta": "beta",
    "r": "r",
    "signal_sign": "signal_sign",
    "beta_grid": "power_beta_grid",
    "r_grid": "power_r_grid",
    "calibration": "calibration",
}


def _parse_float_list(text: str) -> tuple:
    """Grid syntax: 'start:stop:step' (inclusive stop) or 'a,b,c'."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(v) for v in text.split(":")]
            if len(parts) != 3:
                raise ValueError("expected start:stop:step")
            start, stop, step = parts
            if step <= 0.0 or stop < start:
                raise ValueError("need step > 0 and stop >= start")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return tuple(start + k * step for k in range(count))
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"bad grid {text!r}: {exc}") from exc


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="INI configuration file; flags override")
    sub.add_argument("--p", type=int, help="number of coordinates")
    sub.add_argument("--n", type=int,
                     help="panel rows per coordinate (0: direct z draws)")
    sub.add_argument("--replications", type=int)
    sub.add_argument("--seed", type=int, help="master seed for all streams")
    sub.add_argument("--threads", type=int,
                     help="worker threads (0: HCMT_THREADS or 1)")
    sub.add_argument("--output", "-o", help="CSV output path")
    sub.add_argument("--range", choices=["full", "trimmed", "explicit"])
    sub.add_argument("--c", type=float, help="lower trim exponent")
    sub.add_argument("--d", type=float, help="upper trim exponent")
    sub.add_argument("--upper", choices=["loglog", "poly"])
    sub.add_argument("--alpha1", type=float)
    sub.add_argument("--alpha2", type=float)
    sub.add_argument("--grid-size", type=int, dest="grid_size")


def _add_generator(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--dep", choices=["iid", "ar1", "banded"])
    sub.add_argument("--rho", type=float)
    sub.add_argument("--rho-seq", type=_parse_float_list, dest="rho_seq")
    sub.add_argument("--marginal",
                     choices=["gaussian", "student_t", "pareto_sym"])
    sub.add_argument("--df", type=float)
    sub.add_argument("--tail-index", type=float, dest="tail_index")
    sub.add_argument("--delta", type=float)
    sub.add_argument("--alt", action=argparse.BooleanOptionalAction,
                     default=None, help="plant sparse signals")
    sub.add_argument("--beta", type=float, help="signal sparsity exponent")
    sub.add_argument("--r", type=float, help="signal strength exponent")
    sub.add_argument("--signal-sign", choices=["positive", "random"],
                     dest="signal_sign")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hcmt",
        description="Scan statistics for sparse signal detection: "
                    "simulation, limits, boundaries.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    for name in ("hc", "mt"):
        sub = subs.add_parser(
            name, help=f"simulate or evaluate the {name} statistic")
        _add_common(sub)
        _add_generator(sub)
        sub.add_argument("--refine", type=int)
        sub.add_argument("--m-trunc", type=float, dest="m_trunc")
        sub.add_argument("--gamma", type=float)
        sub.add_argument("--data",
                         help="numeric CSV matrix to evaluate instead of "
                              "simulating (one row: a statistic vector)")
        sub.set_defaults(handler=cmd_statistic, statistic=name)

    sub = subs.add_parser("null-dist",
                          help="null law vs simulated sup and Gumbel limit")
    _add_common(sub)
    sub.add_argument("--statistic", choices=["hc", "mt"])
    sub.add_argument("--refine", type=int)
    sub.add_argument("--m-trunc", type=float, dest="m_trunc")
    sub.add_argument("--gamma", type=float)
    sub.add_argument("--plot", help="write a CDF overlay SVG here")
    sub.set_defaults(handler=cmd_null_dist)

    sub = subs.add_parser("bridge-sup",
                          help="sample the normalized bridge supremum")
    _add_common(sub)
    sub.set_defaults(handler=cmd_bridge_sup)

    sub = subs.add_parser("cov-gap",
                          help="covariance gap to independence per trim d")
    _add_common(sub)
    _add_generator(sub)
    sub.add_argument("--d-grid", type=_parse_float_list, dest="d_grid",
                     help="trim exponents to sweep (default: the single "
                          "configured d)")
    sub.set_defaults(handler=cmd_cov_gap)

    sub = subs.add_parser("boundary", help="detection boundary table")
    _add_common(sub)
    sub.add_argument("--beta-grid", type=_parse_float_list, dest="beta_grid",
                     default=_parse_float_list("0.55:0.95:0.05"))
    sub.add_argument("--theta", type=float, default=0.999,
                     help="effective scale of the lower trim")
    sub.add_argument("--eta", type=float, default=0.0,
                     help="effective scale of the upper trim")
    sub.set_defaults(handler=cmd_boundary)

    sub = subs.add_parser("power", help="rejection-rate grid")
    _add_common(sub)
    _add_generator(sub)
    sub.add_argument("--statistic", choices=["hc", "mt"])
    sub.add_argument("--refine", type=int)
    sub.add_argument("--m-trunc", type=float, dest="m_trunc")
    sub.add_argument("--gamma", type=float)
    sub.add_argument("--beta-grid", type=_parse_float_list, dest="beta_grid")
    sub.add_argument("--r-grid", type=_parse_float_list, dest="r_grid")
    sub.add_argument("--calibration", choices=["simulated", "gumbel"])
    sub.add_argument("--plot", help="write a power heatmap SVG here")
    sub.set_defaults(handler=cmd_power)

    sub = subs.add_parser("mdr-check",
                          help="t-statistic tail vs normal tail")
    _add_common(sub)
    sub.add_argument("--df", type=float)
    sub.add_argument("--lambda-max", dest="lambda_max", default="auto",
                     help="largest threshold, or 'auto' for sqrt(log p)")
    sub.set_defaults(handler=cmd_mdr_check)

    sub = subs.add_parser("vc-check",
                          help="shattering checks for the step scan family")
    _add_common(sub)
    sub.set_defaults(handler=cmd_vc_check)

    return parser


def _resolve_config(args) -> ExperimentConfig:
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = ExperimentConfig.from_ini(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
    else:
        cfg = ExperimentConfig()
    overrides = {}
    for flag, field_name in _OVERRIDE_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field_name] = value
    if overrides:
        cfg = cfg.with_overrides(**overrides)
    return cfg.validate()


def _read_matrix(path: str) -> np.ndarray:
    """Plain numeric CSV: rows are observations, columns coordinates; a
    single row is taken as a vector of test statistics."""
    try:
        mat = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except OSError as exc:
        raise DataError(f"cannot read data file: {exc}") from exc
    except ValueError as exc:
        raise DataError(f"{path}: not a numeric matrix: {exc}") from exc
    if mat.size == 0:
        raise DataError(f"{path}: empty matrix")
    if mat.shape[0] == 1:
        return mat[0]
    return mat


def _quantile_summary(values: np.ndarray) -> list[str]:
    lines = [f"mean = {float(np.mean(values))!r}"]
    for q in SUMMARY_QUANTILES:
        lines.append(f"q{int(q * 100)} = {float(np.quantile(values, q))!r}")
    return lines


def _gumbel_limit_for(config: ExperimentConfig) -> GumbelLimit | None:
    """Extreme-value reference for the configured statistic and range.

    The p-value scan normalizes with the classical sequences and kappa
    matched to the range (halved scale constant under a polynomial upper
    trim).  The second-moment scan normalizes toward the standard Gumbel
    through the locally stationary constants on its log-variance horizon,
    which is defined for trimmed ranges only; None signals this reference
    does not apply.
    """
    if config.statistic == "hc":
        if config.range_mode == "trimmed" and config.upper == "poly":
            kappa = kappa_poly_trimmed(config.d)
        else:
            kappa = KAPPA_FULL
        return GumbelLimit.from_p(config.p, kappa)
    if config.range_mode != "trimmed":
        return None
    try:
        horizon = mt_horizon(config.p, config.c, config.d)
        consts = LocalStationaryConstants(alpha_index=1.0, c_fun=0.5,
                                          h_alpha=1.0, horizon_T=horizon)
        a_t, b_t = mt_gumbel_params(consts)
    except RangeError:
        # the log-variance horizon only clears e for fairly large p; below
        # that the normalization is undefined, not misconfigured
        return None
    return GumbelLimit(scale_kappa=1.0, a_p=a_t, b_p=b_t)


def _emit(outputs: list, config: ExperimentConfig, columns, rows,
          summary) -> None:
    """Write the CSV (if an output path is set) and print the summary."""
    if config.output:
        outputs.append(config.output)
        write_csv(config.output, config_comment_lines(config), columns, rows,
                  trailing_comments=summary)
    for line in summary:
        print(line)
    if config.output:
        print(f"wrote {config.output}")


def cmd_statistic(args, config: ExperimentConfig, outputs: list) -> int:
    level_range = config.level_range()
    if getattr(args, "data", None):
        data = _read_matrix(args.data)
        result = compute_statistic(config, data, level_range)
        rows = [[result.value, result.argmax_level]]
        summary = [f"value = {result.value!r}",
                   f"argmax_level = {result.argmax_level!r}"]
        _emit(outputs, config, ["value", "argmax_level"], rows, summary)
        return 0
    n_threads = resolve_threads(config.threads)
    sample = sample_statistics(config, level_range, config.alternative(),
                               substream=0, n_threads=n_threads)
    rows = [[i, v] for i, v in enumerate(sample)]
    _emit(outputs, config, ["replication", "value"], rows,
          _quantile_summary(sample))
    return 0


def cmd_null_dist(args, config: ExperimentConfig, outputs: list) -> int:
    level_range = config.level_range()
    n_threads = resolve_threads(config.threads)
    sample = sample_statistics(config, level_range, None, substream=0,
                               n_threads=n_threads)
    ref_rng = rng_stream(config.master_seed, 0, substream=1)
    if config.statistic == "hc":
        reference = bridge_sup_sample(level_range, config.grid_size, ref_rng,
                                      size=config.replications)
    else:
        m = config.m_trunc if config.m_trunc > 0.0 else \
            math.sqrt(2.0 * math.log(config.p))
        lam_lo = mt_lambda_from_alpha(level_range.alpha2, m)
        lam_hi = mt_lambda_from_alpha(level_range.alpha1, m)
        lam_grid = np.linspace(lam_lo, lam_hi, config.grid_size)
        reference = mt_limit_sup_sample(lam_grid, m, ref_rng,
                                        size=config.replications)
    ks_sim = ks_distance_two_sample(sample, reference)
    limit = _gumbel_limit_for(config)
    if limit is None:
        ks_gum = math.nan
    else:
        normalized = limit.a_p * (sample - limit.b_p)
        ks_gum = ks_distance_to_cdf(normalized,
                                    lambda x: gumbel_cdf(limit, x))
    rows = [[i, s, r] for i, (s, r) in enumerate(zip(sample, reference))]
    summary = [f"ks_vs_simulated_sup = {ks_sim!r}",
               f"ks_vs_gumbel = {ks_gum!r}"] + _quantile_summary(sample)
    _emit(outputs, config, ["replication", "statistic", "reference_sup"],
          rows, summary)
    if getattr(args, "plot", None):
        outputs.append(args.plot)
        _plot_cdf_overlay(args.plot, sample, reference, limit)
        print(f"wrote {args.plot}")
    return 0


def cmd_bridge_sup(args, config: ExperimentConfig, outputs: list) -> int:
    level_range = config.level_range()
    rng = rng_stream(config.master_seed, 0, substream=0)
    sample = bridge_sup_sample(level_range, config.grid_size, rng,
                               size=config.replications)
    rows = [[i, v] for i, v in enumerate(sample)]
    _emit(outputs, config, ["replication", "sup"], rows,
          _quantile_summary(sample))
    return 0


def cmd_cov_gap(args, config: ExperimentConfig, outputs: list) -> int:
    d_values = getattr(args, "d_grid", None) or (config.d,)
    grid_size = args.grid_size if args.grid_size is not None \
        else min(config.grid_size, COV_GAP_DEFAULT_GRID)
    dep = config.dependence()
    rho_seq = dep.lag_correlations(config.p - 1) if dep.kind != "iid" else []
    rows = []
    for d in d_values:
        lr = LevelRange.trimmed(config.p, config.c, float(d),
                                upper=config.upper)
        levels = LogitGrid.from_range(lr, grid_size).levels
        lam = hc_lambda_from_alpha(levels)[::-1]  # thresholds fall in alpha
        independent = hc_cov_independent(lam)
        if len(rho_seq):
            dependent = hc_cov_dependent(lam, rho_seq, config.p)
            gap = cov_discrepancy(dependent, independent)
        else:
            gap = 0.0
        rows.append([float(d), lr.alpha1, lr.alpha2, gap])
    summary = [f"grid_size = {grid_size}",
               f"max_gap = {max(r[3] for r in rows)!r}"]
    _emit(outputs, config, ["d", "alpha1", "alpha2", "cov_gap"], rows,
          summary)
    return 0


def cmd_boundary(args, config: ExperimentConfig, outputs: list) -> int:
    theta, eta = float(args.theta), float(args.eta)
    rows = []
    for beta in args.beta_grid:
        rows.append([float(beta), rho_star(float(beta)),
                     rho_star_trimmed(theta, eta, float(beta))])
    summary = [f"theta = {theta!r}", f"eta = {eta!r}",
               f"points = {len(rows)}"]
    _emit(outputs, config, ["beta", "rho_full", "rho_trimmed"], rows,
          summary)
    return 0


def cmd_power(args, config: ExperimentConfig, outputs: list) -> int:
    n_threads = resolve_threads(config.threads)
    table = power_experiment(config, n_threads=n_threads)
    rows = [list(row) for row in table.rows()]
    summary = [f"critical_value = {table.critical_value!r}",
               f"calibration = {table.calibration}",
               f"gamma = {table.gamma!r}"]
    if table.low_replications:
        summary.append("warning = rejection rates rest on fewer than 100 "
                       "replications")
    _emit(outputs, config, ["beta", "r", "rejection_rate"], rows, summary)
    if getattr(args, "plot", None):
        outputs.append(args.plot)
        _plot_power_heatmap(args.plot, table)
        print(f"wrote {args.plot}")
    return 0


def cmd_mdr_check(args, config: ExperimentConfig, outputs: list) -> int:
    if str(args.lambda_max).strip() == "auto":
        lam_max = math.sqrt(math.log(config.p))
    else:
        try:
            lam_max = float(args.lambda_max)
        except ValueError as exc:
            raise ConfigError(
                f"--lambda-max must be a number or 'auto', "
                f"got {args.lambda_max!r}") from exc
    if not lam_max > 0.0:
        raise ConfigError("--lambda-max must be positive")
    n = config.n if config.n >= 2 else 500
    grid = np.linspace(0.0, lam_max, MDR_GRID_POINTS)
    rng = rng_stream(config.master_seed, 0, substream=0)
    empirical = mdr_tail_ratios(n, config.df, grid, config.replications, rng)
    reference = pi0(grid)
    errors = np.abs(empirical / reference - 1.0)
    rows = [[float(g), float(e), float(rf), float(err)]
            for g, e, rf, err in zip(grid, empirical, reference, errors)]
    summary = [f"n = {n}", f"df = {config.df!r}",
               f"max_ratio_error = {float(errors.max())!r}"]
    _emit(outputs, config,
          ["lambda", "empirical_tail", "normal_tail", "ratio_error"],
          rows, summary)
    return 0


def cmd_vc_check(args, config: ExperimentConfig, outputs: list) -> int:
    triple = (LabeledPoint(11 / 4, 9 / 4), LabeledPoint(15 / 4, 13 / 4),
              LabeledPoint(25 / 4, 21 / 4))
    rows = []

    def add(case, pts):
        subsets = achievable_subsets(pts)
        rows.append([case, len(pts), len(subsets),
                     str(is_shattered(pts)).lower()])
        return len(subsets)

    add("figure_triple", triple)
    add("figure_triple_plus_origin", triple + (LabeledPoint(0.0, 0.0),))
    rng = rng_stream(config.master_seed, 0, substream=0)
    worst = 0
    for k in range(VC_QUADRUPLES):
        quad = [LabeledPoint(float(rng.uniform(0.0, 10.0)),
                             float(rng.uniform(-5.0, 10.0)))
                for _ in range(4)]
        worst = max(worst, add(f"quadruple_{k:03d}", quad))
    summary = [f"figure_triple_shattered = {str(is_shattered(triple)).lower()}",
               f"quadruple_max_subsets = {worst}",
               f"all_quadruples_below_16 = {str(worst < 16).lower()}"]
    _emit(outputs, config, ["case", "n_points", "n_subsets", "shattered"],
          rows, summary)
    return 0


def _plot_cdf_overlay(path: str, sample, reference, limit: GumbelLimit):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for values, label in ((np.sort(sample), "statistic"),
                          (np.sort(reference), "simulated sup")):
        ax.step(values, np.arange(1, values.size + 1) / values.size,
                where="post", label=label)
    if limit is not None:
        lo = min(float(np.min(sample)), float(np.min(reference)))
        hi = max(float(np.max(sample)), float(np.max(reference)))
        xs = np.linspace(lo, hi, 400)
        ax.plot(xs, gumbel_cdf(limit, limit.a_p * (xs - limit.b_p)),
                linestyle="--", label="extreme-value limit")
    ax.set_xlabel("value")
    ax.set_ylabel("cumulative probability")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _axis_bounds(values) -> tuple[float, float]:
    lo, hi = float(values[0]), float(values[-1])
    if lo == hi:  # single grid point: give the image some width
        pad = max(0.05, abs(lo) * 0.05)
        return lo - pad, hi + pad
    return lo, hi


def _plot_power_heatmap(path: str, table):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    im = ax.imshow(table.rejection_rates, origin="lower", aspect="auto",
                   vmin=0.0, vmax=1.0, cmap="viridis",
                   extent=_axis_bounds(table.rs) + _axis_bounds(table.betas))
    ax.set_xlabel("signal strength r")
    ax.set_ylabel("sparsity beta")
    fig.colorbar(im, ax=ax, label="rejection rate")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _cleanup(outputs: list) -> None:
    for path in outputs:
        try:
            os.unlink(path)
        except OSError:
            pass


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    outputs: list[str] = []
    try:
        config = _resolve_config(args)
        return args.handler(args, config, outputs)
    except ConfigError as exc:
        _cleanup(outputs)
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        _cleanup(outputs)
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        _cleanup(outputs)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except HcmtError as exc:
        _cleanup(outputs)
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        _cleanup(outputs)
        print(f"output error: {exc}", file=sys.stderr)
        return 2
    except BaseException:
        _cleanup(outputs)
        raise


if __name__ == "__main__":
    sys.exit(main())
