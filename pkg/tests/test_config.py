"""Tests for experiment configuration loading and validation."""

import pytest

from hcmt.config import ExperimentConfig
from hcmt.datagen import AlternativeSpec, DependenceSpec, MarginalSpec
from hcmt.errors import ConfigError, RangeError
from hcmt.stats import LevelRange


class TestDefaultsAndValidation:
    def test_defaults_validate(self):
        cfg = ExperimentConfig()
        assert cfg.validate() is cfg

    def test_statistic_name_checked(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(statistic="ks").validate()

    def test_range_mode_checked(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(range_mode="auto").validate()

    def test_calibration_checked(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(calibration="bootstrap").validate()

    def test_numeric_bounds(self):
        with pytest.raises(RangeError):
            ExperimentConfig(p=0).validate()
        with pytest.raises(RangeError):
            ExperimentConfig(n=1).validate()
        with pytest.raises(RangeError):
            ExperimentConfig(replications=0).validate()
        with pytest.raises(RangeError):
            ExperimentConfig(master_seed=-1).validate()
        with pytest.raises(RangeError):
            ExperimentConfig(gamma=0.0).validate()
        with pytest.raises(RangeError):
            ExperimentConfig(gamma=1.0).validate()
        with pytest.raises(RangeError):
            ExperimentConfig(grid_size=0).validate()
        with pytest.raises(RangeError):
            ExperimentConfig(refine=0).validate()
        with pytest.raises(RangeError):
            ExperimentConfig(m_trunc=-1.0).validate()
        with pytest.raises(RangeError):
            ExperimentConfig(threads=-2).validate()

    def test_heavy_marginal_needs_panel(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(n=0, marg_kind="student_t").validate()
        ExperimentConfig(n=100, marg_kind="student_t", df=5.0).validate()

    def test_nested_spec_invariants_revalidated(self):
        # bad values only surface through the domain constructors
        with pytest.raises(RangeError):
            ExperimentConfig(dep_kind="ar1", rho=1.0).validate()
        with pytest.raises(RangeError):
            ExperimentConfig(n=10, marg_kind="student_t", df=2.5).validate()
        with pytest.raises(RangeError):
            ExperimentConfig(alt_enabled=True, beta=0.4).validate()
        with pytest.raises(RangeError):
            ExperimentConfig(range_mode="explicit", alpha1=0.5,
                             alpha2=0.1).validate()
        with pytest.raises(RangeError):
            ExperimentConfig(power_beta_grid=(0.7, 1.2)).validate()
        with pytest.raises(RangeError):
            ExperimentConfig(power_r_grid=(-0.5,)).validate()


class TestDomainObjectConstruction:
    def test_level_range_modes(self):
        full = ExperimentConfig(range_mode="full", p=100).level_range()
        assert full == LevelRange(alpha1=1 / 100, alpha2=0.5)
        trimmed = ExperimentConfig(range_mode="trimmed", p=10_000, c=1.0,
                                   d=0.5, upper="loglog").level_range()
        assert trimmed == LevelRange.trimmed(10_000, 1.0, 0.5, upper="loglog")
        explicit = ExperimentConfig(range_mode="explicit", alpha1=0.01,
                                    alpha2=0.4).level_range()
        assert explicit == LevelRange(alpha1=0.01, alpha2=0.4)

    def test_dependence_dispatch(self):
        assert ExperimentConfig(dep_kind="iid").dependence() == DependenceSpec.iid()
        assert (ExperimentConfig(dep_kind="ar1", rho=0.3).dependence()
                == DependenceSpec.ar1(0.3))
        assert (ExperimentConfig(dep_kind="banded", rho_seq=(0.4, 0.2)).dependence()
                == DependenceSpec.banded([0.4, 0.2]))
        with pytest.raises(ConfigError):
            ExperimentConfig(dep_kind="fancy").dependence()

    def test_marginal_dispatch(self):
        assert ExperimentConfig().marginal() == MarginalSpec.gaussian()
        assert (ExperimentConfig(marg_kind="student_t", df=6.0,
                                 delta=0.5).marginal()
                == MarginalSpec.student_t(6.0, delta=0.5))
        assert (ExperimentConfig(marg_kind="pareto_sym", tail_index=4.0,
                                 delta=1.0).marginal()
                == MarginalSpec.pareto_sym(4.0, delta=1.0))

    def test_alternative_optional(self):
        assert ExperimentConfig().alternative() is None
        alt = ExperimentConfig(alt_enabled=True, beta=0.7, r=0.4,
                               signal_sign="random").alternative()
        assert alt == AlternativeSpec(0.7, 0.4, "random")


class TestSerialization:
    def test_round_trip_default(self):
        cfg = ExperimentConfig()
        assert ExperimentConfig.from_ini(cfg.to_ini()) == cfg

    def test_round_trip_awkward_floats(self):
        cfg = ExperimentConfig(c=1 / 3, gamma=0.1, rho=0.1 + 0.2,
                               rho_seq=(0.1, 1 / 7),
                               power_beta_grid=(0.55, 0.6),
                               power_r_grid=(0.0, 2 / 3),
                               m_trunc=2.718281828459045)
        assert ExperimentConfig.from_ini(cfg.to_ini()) == cfg

    def test_round_trip_all_flags(self):
        cfg = ExperimentConfig(statistic="mt", p=77, n=12, replications=3,
                               master_seed=99, threads=2, gamma=0.01,
                               output="out.csv", grid_size=7, refine=5,
                               m_trunc=3.5, range_mode="explicit",
                               alpha1=0.001, alpha2=0.3, dep_kind="banded",
                               rho_seq=(0.3,), marg_kind="student_t", df=8.0,
                               delta=0.25, alt_enabled=True, beta=0.66,
                               r=1.25, signal_sign="random",
                               calibration="gumbel")
        assert ExperimentConfig.from_ini(cfg.to_ini()) == cfg

    def test_partial_file_keeps_defaults(self):
        cfg = ExperimentConfig.from_ini("[run]\np = 42\n")
        assert cfg.p == 42
        assert cfg.statistic == "hc"
        assert cfg.grid_size == ExperimentConfig().grid_size

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_ini("[mystery]\nx = 1\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_ini("[run]\nbogus = 1\n")

    def test_bad_values_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_ini("[run]\np = lots\n")
        with pytest.raises(ConfigError):
            ExperimentConfig.from_ini("[run]\ngamma = tiny\n")
        with pytest.raises(ConfigError):
            ExperimentConfig.from_ini("[alternative]\nenabled = maybe\n"
                                      .replace("enabled", "alt_enabled"))
        with pytest.raises(ConfigError):
            ExperimentConfig.from_ini("not ini at all [[[")

    def test_boolean_spellings(self):
        assert ExperimentConfig.from_ini(
            "[alternative]\nalt_enabled = true\n").alt_enabled is True
        assert ExperimentConfig.from_ini(
            "[alternative]\nalt_enabled = no\n").alt_enabled is False

    def test_empty_tuple_round_trips(self):
        cfg = ExperimentConfig(rho_seq=(), power_beta_grid=())
        back = ExperimentConfig.from_ini(cfg.to_ini())
        assert back.rho_seq == ()
        assert back.power_beta_grid == ()

    def test_with_overrides(self):
        cfg = ExperimentConfig()
        out = cfg.with_overrides(p=9, statistic="mt")
        assert out.p == 9 and out.statistic == "mt"
        assert cfg.p == 1000  # original untouched
