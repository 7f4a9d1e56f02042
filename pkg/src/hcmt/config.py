"""Experiment configuration: one flat record, INI on disk.

Every knob an experiment run can turn lives in ExperimentConfig.  The
on-disk form is key-value sections readable by configparser; values
serialize through repr-style strings so a load of a dump reproduces the
exact field values, bit for bit.  Command-line flags override file values
by rebuilding the record with dataclasses.replace before validation.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, fields, replace

from .datagen import AlternativeSpec, DependenceSpec, MarginalSpec
from .errors import ConfigError, RangeError
from .gpsim import DEFAULT_GRID_SIZE
from .stats import LevelRange

__all__ = ["ExperimentConfig"]

_STATISTICS = ("hc", "mt")
_RANGE_MODES = ("full", "trimmed", "explicit")
_CALIBRATIONS = ("simulated", "gumbel")

# section -> field names, the wire layout of the INI file
_SECTIONS = {
    "run": ("statistic", "p", "n", "replications", "master_seed", "threads",
            "gamma", "output", "grid_size", "refine", "m_trunc"),
    "range": ("range_mode", "c", "d", "upper", "alpha1", "alpha2"),
    "dependence": ("dep_kind", "rho", "rho_seq"),
    "marginal": ("marg_kind", "df", "tail_index", "delta"),
    "alternative": ("alt_enabled", "beta", "r", "signal_sign"),
    "power": ("power_beta_grid", "power_r_grid", "calibration"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    statistic: str = "hc"
    p: int = 1000
    n: int = 0  # 0: direct Gaussian sequence; >= 2: panel of observations
    replications: int = 200
    master_seed: int = 0
    threads: int = 0  # 0: resolve from environment or single-threaded
    gamma: float = 0.05
    output: str = ""
    grid_size: int = DEFAULT_GRID_SIZE
    refine: int = 64
    m_trunc: float = 0.0  # 0: default truncation sqrt(2 log p)

    range_mode: str = "trimmed"
    c: float = 1.0
    d: float = 0.5
    upper: str = "loglog"
    alpha1: float = 0.0
    alpha2: float = 0.0

    dep_kind: str = "iid"
    rho: float = 0.0
    rho_seq: tuple = ()

    marg_kind: str = "gaussian"
    df: float = 5.0
    tail_index: float = 4.5
    delta: float = 1.0

    alt_enabled: bool = False
    beta: float = 0.7
    r: float = 0.4
    signal_sign: str = "positive"

    power_beta_grid: tuple = ()
    power_r_grid: tuple = ()
    calibration: str = "simulated"

    # -- domain object construction (each re-runs the module validations)

    def level_range(self) -> LevelRange:
        if self.range_mode == "full":
            return LevelRange.full(self.p)
        if self.range_mode == "trimmed":
            return LevelRange.trimmed(self.p, self.c, self.d, upper=self.upper)
        return LevelRange(alpha1=self.alpha1, alpha2=self.alpha2)

    def dependence(self) -> DependenceSpec:
        if self.dep_kind == "iid":
            return DependenceSpec.iid()
        if self.dep_kind == "ar1":
            return DependenceSpec.ar1(self.rho)
        if self.dep_kind == "banded":
            return DependenceSpec.banded(self.rho_seq)
        raise ConfigError(f"unknown dependence kind {self.dep_kind!r}")

    def marginal(self) -> MarginalSpec:
        if self.marg_kind == "gaussian":
            return MarginalSpec.gaussian()
        if self.marg_kind == "student_t":
            return MarginalSpec.student_t(self.df, delta=self.delta)
        if self.marg_kind == "pareto_sym":
            return MarginalSpec.pareto_sym(self.tail_index, delta=self.delta)
        raise ConfigError(f"unknown marginal kind {self.marg_kind!r}")

    def alternative(self) -> AlternativeSpec | None:
        if not self.alt_enabled:
            return None
        return AlternativeSpec(beta_sparsity=self.beta, r_strength=self.r,
                               signal_sign=self.signal_sign)

    def validate(self) -> "ExperimentConfig":
        """Check every invariant, including the nested domain specs."""
        if self.statistic not in _STATISTICS:
            raise ConfigError(f"statistic must be one of {_STATISTICS}, "
                              f"got {self.statistic!r}")
        if self.range_mode not in _RANGE_MODES:
            raise ConfigError(f"range_mode must be one of {_RANGE_MODES}, "
                              f"got {self.range_mode!r}")
        if self.calibration not in _CALIBRATIONS:
            raise ConfigError(f"calibration must be one of {_CALIBRATIONS}, "
                              f"got {self.calibration!r}")
        if self.p < 1:
            raise RangeError("p must be a positive integer")
        if self.n != 0 and self.n < 2:
            raise RangeError("n must be 0 (direct sequence) or at least 2")
        if self.n == 0 and self.marg_kind != "gaussian":
            raise ConfigError("heavy-tailed marginals need a panel: set n >= 2")
        if self.replications < 1:
            raise RangeError("replications must be positive")
        if self.master_seed < 0:
            raise RangeError("master_seed must be nonnegative")
        if self.threads < 0:
            raise RangeError("threads must be nonnegative")
        if not 0.0 < self.gamma < 1.0:
            raise RangeError("gamma must lie strictly inside (0, 1)")
        if self.grid_size < 1:
            raise RangeError("grid_size must be at least 1")
        if self.refine < 1:
            raise RangeError("refine must be at least 1")
        if self.m_trunc < 0.0:
            raise RangeError("m_trunc must be 0 (automatic) or positive")
        if any(r < 0.0 for r in self.power_r_grid):
            raise RangeError("power r grid values must be nonnegative")
        self.level_range()
        self.dependence()
        self.marginal()
        self.alternative()
        for b in self.power_beta_grid:
            AlternativeSpec(beta_sparsity=b, r_strength=1.0)
        return self

    # -- serialization

    def to_ini(self) -> str:
        parser = configparser.ConfigParser()
        for section, names in _SECTIONS.items():
            parser[section] = {name: _dump(getattr(self, name))
                               for name in names}
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "ExperimentConfig":
        parser = configparser.ConfigParser()
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"malformed config file: {exc}") from exc
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for section in parser.sections():
            if section not in _SECTIONS:
                raise ConfigError(f"unknown config section [{section}]")
            for name, raw in parser[section].items():
                if name not in _SECTIONS[section]:
                    raise ConfigError(
                        f"unknown key {name!r} in section [{section}]")
                values[name] = _parse(name, types[name], raw)
        return cls(**values)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)


def _dump(value) -> str:
    if isinstance(value, tuple):
        return ",".join(repr(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _parse(name: str, type_name: str, raw: str):
    raw = raw.strip()
    try:
        if type_name == "bool":
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if type_name == "int":
            return int(raw)
        if type_name == "float":
            return float(raw)
        if type_name == "tuple":
            if not raw:
                return ()
            return tuple(float(part) for part in raw.split(","))
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {exc}") from exc
