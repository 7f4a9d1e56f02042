"""Replication harness: deterministic parallel sampling and file output.

Determinism contract: every replication opens its own counter-based stream
keyed by (master_seed, replication, substream), and results land in a
preallocated slot indexed by replication.  The thread count therefore
changes wall time only, never a single byte of output.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import stats as scipy_stats

from . import __version__
from .config import ExperimentConfig
from .datagen import (
    AlternativeSpec,
    MarginalSpec,
    gen_dependent_z,
    gen_heavy_panel,
    rng_stream,
)
from .errors import DataError
from .stats import (
    LevelRange,
    StatisticResult,
    hc_statistic,
    mt_statistic,
    pvalues_from_t,
    t_statistics,
)

__all__ = [
    "resolve_threads",
    "parallel_map_indexed",
    "compute_statistic",
    "sample_statistics",
    "ks_distance_to_cdf",
    "ks_distance_two_sample",
    "config_comment_lines",
    "write_csv",
    "mdr_tail_ratios",
]

THREADS_ENV_VAR = "HCMT_THREADS"


def resolve_threads(requested: int = 0) -> int:
    """Thread count: explicit request wins, then the environment, then 1."""
    if requested > 0:
        return int(requested)
    env = os.environ.get(THREADS_ENV_VAR, "").strip()
    if env:
        try:
            parsed = int(env)
        except ValueError as exc:
            raise DataError(
                f"{THREADS_ENV_VAR} must be an integer, got {env!r}") from exc
        if parsed > 0:
            return parsed
    return 1


def parallel_map_indexed(fn, count: int, n_threads: int) -> list:
    """[fn(0), ..., fn(count-1)] in index order, computed on n_threads."""
    results = [None] * count
    if n_threads <= 1 or count <= 1:
        for i in range(count):
            results[i] = fn(i)
        return results

    def worker(i):
        results[i] = fn(i)

    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        list(pool.map(worker, range(count)))
    return results


def compute_statistic(config: ExperimentConfig, data: np.ndarray,
                      level_range: LevelRange | None = None) -> StatisticResult:
    """Evaluate the configured scan statistic on a vector or a panel.

    A one-dimensional array is taken as the test statistics themselves; a
    two-dimensional array is a panel whose columns get t-statistics first.
    """
    data = np.asarray(data, dtype=float)
    if level_range is None:
        level_range = config.level_range()
    if data.ndim == 2:
        source = t_statistics(data)
    elif data.ndim == 1:
        source = data
    else:
        raise DataError("statistic input must be a vector or a matrix")
    if config.statistic == "hc":
        sample = pvalues_from_t(source)
        return hc_statistic(sample, level_range)
    m_trunc = config.m_trunc if config.m_trunc > 0.0 else None
    return mt_statistic(source, level_range, m_trunc=m_trunc,
                        refine=config.refine)


def _replication_value(config: ExperimentConfig, level_range: LevelRange,
                       alt: AlternativeSpec | None, replication: int,
                       substream: int) -> float:
    stream = rng_stream(config.master_seed, replication, substream)
    dep = config.dependence()
    if config.n == 0:
        data = gen_dependent_z(config.p, dep, alt, stream)
    else:
        data = gen_heavy_panel(config.n, config.p, dep, config.marginal(),
                               alt, stream)
    return compute_statistic(config, data, level_range).value


def sample_statistics(config: ExperimentConfig, level_range: LevelRange,
                      alt: AlternativeSpec | None, substream: int,
                      n_threads: int = 1,
                      replications: int | None = None) -> np.ndarray:
    """Statistic draws across replications, identical for any thread count."""
    reps = config.replications if replications is None else int(replications)
    out = np.empty(reps)

    def one(i):
        out[i] = _replication_value(config, level_range, alt, i, substream)

    parallel_map_indexed(one, reps, n_threads)
    return out


def ks_distance_to_cdf(sample: np.ndarray, cdf) -> float:
    """Kolmogorov distance between an empirical sample and a cdf callable."""
    return float(scipy_stats.kstest(np.asarray(sample, dtype=float), cdf).statistic)


def ks_distance_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    return float(scipy_stats.ks_2samp(np.asarray(a, dtype=float),
                                      np.asarray(b, dtype=float)).statistic)


def config_comment_lines(config: ExperimentConfig) -> list[str]:
    """The resolved config and code version, one comment line each.

    Execution-only fields are left out: the thread count cannot influence
    a result byte (that is the determinism contract) and the output path
    names the file itself, so recording either would only break the
    byte-identity of reruns.
    """
    lines = [f"version = {__version__}"]
    for raw in config.to_ini().splitlines():
        if not raw.strip():
            continue
        if raw.startswith("threads =") or raw.startswith("output ="):
            continue
        lines.append(raw)
    return lines


def write_csv(path: str, comments: list[str], column_names: list[str],
              rows, trailing_comments=()) -> None:
    """CSV with '#' comment headers, LF line endings on every platform.

    `trailing_comments` go after the data rows, also '#'-prefixed; readers
    that strip comment lines see a plain rectangular table either way.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(column_names)
        for row in rows:
            writer.writerow(row)
        for line in trailing_comments:
            fh.write(f"# {line}\n")


def mdr_tail_ratios(n: int, df: float, lambda_grid, replications: int,
                    rng, chunk_size: int = 20_000) -> np.ndarray:
    """Empirical two-sided tail of the one-sample t-statistic on a grid.

    Draws `replications` panels of `n` unit-variance Student-t observations,
    forms the t-statistic of each, and returns the fraction with |T| at or
    above each grid threshold.  Panels are drawn in fixed-size chunks so the
    memory stays flat; the chunk size does not affect the result beyond the
    stream position, so it is part of the determinism contract and fixed by
    default.
    """
    n = int(n)
    replications = int(replications)
    if replications < 1:
        raise DataError("tail estimation needs at least one replication")
    grid = np.asarray(lambda_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DataError("threshold grid must be a nonempty vector")
    marg = MarginalSpec.student_t(df)
    counts = np.zeros(grid.size, dtype=np.int64)
    done = 0
    while done < replications:
        m = min(int(chunk_size), replications - done)
        x = marg.draw(rng, (n, m))
        t = np.abs(t_statistics(x).t_stats)
        counts += (t[None, :] >= grid[:, None]).sum(axis=1)
        done += m
    return counts / float(replications)
