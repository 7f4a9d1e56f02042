"""End-to-end tests of the command line interface.

Everything goes through `main(argv)` so the tests exercise exactly what a
shell invocation would, including exit codes and file side effects.
"""

import math

import numpy as np
import pytest

from hcmt.cli import _parse_float_list, build_parser, main
from hcmt.config import ExperimentConfig


def read_table(path):
    """Data rows of a commented CSV as a list of string lists."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                rows.append(line.rstrip("\n").split(","))
    return rows


def comment_block(path):
    with open(path, encoding="utf-8") as fh:
        return [ln[2:].rstrip("\n") for ln in fh if ln.startswith("#")]


class TestParsing:
    def test_float_list_colon(self):
        got = _parse_float_list("0.55:0.95:0.05")
        assert len(got) == 9
        assert got[0] == 0.55
        assert got[-1] == pytest.approx(0.95)

    def test_float_list_comma(self):
        assert _parse_float_list("0.5,0.7,0.9") == (0.5, 0.7, 0.9)

    def test_float_list_bad(self):
        import argparse
        with pytest.raises(argparse.ArgumentTypeError):
            _parse_float_list("1:2")
        with pytest.raises(argparse.ArgumentTypeError):
            _parse_float_list("a,b")

    def test_parser_builds(self):
        parser = build_parser()
        args = parser.parse_args(["hc", "--p", "100", "--seed", "3"])
        assert args.statistic == "hc" and args.p == 100 and args.seed == 3


class TestExitCodes:
    def test_infeasible_range_is_config_error(self, capsys):
        code = main(["hc", "--p", "1000", "--c", "9", "--d", "2",
                     "--seed", "42"])
        assert code == 2
        err = capsys.readouterr().err
        assert "config error" in err
        assert "c" in err  # names the offending field

    def test_bad_config_file_value(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[run]\np = many\n")
        assert main(["hc", "--config", str(cfg)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_missing_config_file(self, capsys):
        assert main(["hc", "--config", "/no/such/file.ini"]) == 2

    def test_bad_data_file(self, tmp_path, capsys):
        data = tmp_path / "junk.csv"
        data.write_text("a,b,c\n")
        assert main(["hc", "--data", str(data), "--p", "3",
                     "--range", "full"]) == 2
        assert "input error" in capsys.readouterr().err

    def test_gumbel_calibration_rejected_for_mt(self, capsys):
        code = main(["power", "--statistic", "mt", "--p", "100",
                     "--replications", "20", "--range", "full",
                     "--beta-grid", "0.7", "--r-grid", "0.5",
                     "--calibration", "gumbel"])
        assert code == 2

    def test_unwritable_output(self, capsys):
        code = main(["boundary", "--beta-grid", "0.6",
                     "-o", "/no/such/dir/out.csv"])
        assert code == 2
        assert "output error" in capsys.readouterr().err


class TestStatisticCommands:
    def test_hc_simulation_output(self, tmp_path, capsys):
        out = tmp_path / "hc.csv"
        code = main(["hc", "--p", "200", "--replications", "15",
                     "--seed", "4", "--range", "full", "-o", str(out)])
        assert code == 0
        rows = read_table(out)
        assert rows[0] == ["replication", "value"]
        assert len(rows) == 16
        assert [r[0] for r in rows[1:]] == [str(i) for i in range(15)]
        comments = comment_block(out)
        assert comments[0].startswith("version = ")
        assert any(c.startswith("mean = ") for c in comments)

    def test_hc_on_data_vector(self, tmp_path):
        data = tmp_path / "vec.csv"
        data.write_text("0.5,1.2,-0.3\n")
        out = tmp_path / "res.csv"
        code = main(["hc", "--data", str(data), "--p", "3", "--range",
                     "explicit", "--alpha1", "0.05", "--alpha2", "0.5",
                     "-o", str(out)])
        assert code == 0
        rows = read_table(out)
        assert rows[0] == ["value", "argmax_level"]
        from hcmt.stats import LevelRange, hc_statistic, pvalues_from_t
        want = hc_statistic(pvalues_from_t(np.array([0.5, 1.2, -0.3])),
                            LevelRange(0.05, 0.5))
        assert float(rows[1][0]) == want.value

    def test_hc_on_data_panel(self, tmp_path):
        rng = np.random.default_rng(8)
        panel = rng.standard_normal((12, 6))
        data = tmp_path / "panel.csv"
        np.savetxt(data, panel, delimiter=",")
        out = tmp_path / "res.csv"
        code = main(["hc", "--data", str(data), "--p", "6",
                     "--range", "full", "-o", str(out)])
        assert code == 0
        assert len(read_table(out)) == 2

    def test_mt_simulation_runs(self, tmp_path):
        out = tmp_path / "mt.csv"
        code = main(["mt", "--p", "150", "--replications", "10",
                     "--seed", "4", "--range", "trimmed", "--c", "1.0",
                     "--d", "0.5", "-o", str(out)])
        assert code == 0
        assert len(read_table(out)) == 11

    def test_no_output_path_still_works(self, capsys):
        code = main(["hc", "--p", "100", "--replications", "5",
                     "--seed", "1", "--range", "full"])
        assert code == 0
        assert "mean = " in capsys.readouterr().out


class TestDeterminism:
    def test_hc_byte_identical_across_threads(self, tmp_path):
        argv = ["hc", "--p", "200", "--replications", "20", "--seed", "4",
                "--range", "full"]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(argv + ["--threads", "1", "-o", str(out1)]) == 0
        assert main(argv + ["--threads", "4", "-o", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_power_byte_identical_across_threads(self, tmp_path):
        argv = ["power", "--statistic", "hc", "--p", "200",
                "--replications", "30", "--seed", "7", "--range", "full",
                "--beta-grid", "0.7", "--r-grid", "0,1.0"]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(argv + ["--threads", "1", "-o", str(out1)]) == 0
        assert main(argv + ["--threads", "3", "-o", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_env_thread_override(self, tmp_path, monkeypatch):
        argv = ["hc", "--p", "150", "--replications", "10", "--seed", "2",
                "--range", "full"]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        monkeypatch.delenv("HCMT_THREADS", raising=False)
        assert main(argv + ["-o", str(out1)]) == 0
        monkeypatch.setenv("HCMT_THREADS", "5")
        assert main(argv + ["-o", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestNullDist:
    def test_reports_both_distances(self, tmp_path, capsys):
        out = tmp_path / "nd.csv"
        code = main(["null-dist", "--statistic", "hc", "--p", "150",
                     "--replications", "40", "--seed", "4",
                     "--range", "full", "--grid-size", "64",
                     "-o", str(out)])
        assert code == 0
        comments = comment_block(out)
        ks_lines = [c for c in comments if c.startswith("ks_")]
        assert len(ks_lines) == 2
        for line in ks_lines:
            value = float(line.split("=")[1])
            assert 0.0 <= value <= 1.0
        rows = read_table(out)
        assert rows[0] == ["replication", "statistic", "reference_sup"]
        assert len(rows) == 41

    def test_mt_small_p_gumbel_undefined(self, tmp_path):
        out = tmp_path / "nd.csv"
        code = main(["null-dist", "--statistic", "mt", "--p", "150",
                     "--replications", "20", "--seed", "4",
                     "--range", "trimmed", "--c", "1.0", "--d", "0.5",
                     "--grid-size", "32", "-o", str(out)])
        assert code == 0
        gum = [c for c in comment_block(out) if c.startswith("ks_vs_gumbel")]
        assert gum and math.isnan(float(gum[0].split("=")[1]))

    def test_plot_written(self, tmp_path):
        out = tmp_path / "nd.csv"
        svg = tmp_path / "nd.svg"
        code = main(["null-dist", "--statistic", "hc", "--p", "100",
                     "--replications", "20", "--seed", "1",
                     "--range", "full", "--grid-size", "32",
                     "-o", str(out), "--plot", str(svg)])
        assert code == 0
        assert svg.read_bytes().lstrip().startswith(b"<?xml")


class TestBridgeSup:
    def test_rows_and_quantiles(self, tmp_path):
        out = tmp_path / "bs.csv"
        code = main(["bridge-sup", "--p", "500", "--replications", "25",
                     "--seed", "9", "--range", "full",
                     "--grid-size", "128", "-o", str(out)])
        assert code == 0
        rows = read_table(out)
        assert rows[0] == ["replication", "sup"]
        values = [float(r[1]) for r in rows[1:]]
        assert len(values) == 25
        assert all(np.isfinite(values))


class TestCovGap:
    def test_gap_shrinks_with_d(self, tmp_path):
        out = tmp_path / "cg.csv"
        code = main(["cov-gap", "--p", "1000000", "--dep", "ar1",
                     "--rho", "0.3", "--c", "1.0", "--d-grid", "2:4:1",
                     "--grid-size", "32", "-o", str(out)])
        assert code == 0
        rows = read_table(out)
        assert rows[0] == ["d", "alpha1", "alpha2", "cov_gap"]
        gaps = [float(r[3]) for r in rows[1:]]
        assert len(gaps) == 3
        assert gaps[0] > gaps[1] > gaps[2] > 0.0

    def test_iid_gap_zero(self, tmp_path):
        out = tmp_path / "cg.csv"
        code = main(["cov-gap", "--p", "100000", "--dep", "iid",
                     "--c", "1.0", "--d-grid", "2", "--grid-size", "16",
                     "-o", str(out)])
        assert code == 0
        assert float(read_table(out)[1][3]) == 0.0


class TestBoundary:
    def test_table_matches_formulas(self, tmp_path):
        from hcmt.boundary import rho_star, rho_star_trimmed
        out = tmp_path / "bd.csv"
        code = main(["boundary", "--beta-grid", "0.55:0.95:0.05",
                     "--theta", "0.9", "--eta", "0.1", "-o", str(out)])
        assert code == 0
        rows = read_table(out)
        assert rows[0] == ["beta", "rho_full", "rho_trimmed"]
        assert len(rows) == 10
        for beta_s, full_s, trimmed_s in rows[1:]:
            beta = float(beta_s)
            assert float(full_s) == rho_star(beta)
            assert float(trimmed_s) == rho_star_trimmed(0.9, 0.1, beta)

    def test_infinite_tail_survives_round_trip(self, tmp_path):
        out = tmp_path / "bd.csv"
        assert main(["boundary", "--beta-grid", "0.97", "--theta", "0.9",
                     "--eta", "0.2", "-o", str(out)]) == 0
        assert float(read_table(out)[1][2]) == math.inf


class TestPower:
    def test_grid_rows_and_critical_value(self, tmp_path):
        out = tmp_path / "pw.csv"
        code = main(["power", "--statistic", "hc", "--p", "500",
                     "--replications", "150", "--seed", "7",
                     "--range", "full", "--beta-grid", "0.7",
                     "--r-grid", "0,1.5", "--gamma", "0.05",
                     "-o", str(out)])
        assert code == 0
        rows = read_table(out)
        assert rows[0] == ["beta", "r", "rejection_rate"]
        assert [float(r[2]) for r in rows[1:]] == [0.08, 1.0]
        crit = [c for c in comment_block(out)
                if c.startswith("critical_value")]
        assert crit and float(crit[0].split("=")[1]) == pytest.approx(
            2.935601223158895, rel=1e-12)

    def test_low_replication_warning(self, tmp_path):
        out = tmp_path / "pw.csv"
        assert main(["power", "--statistic", "hc", "--p", "200",
                     "--replications", "40", "--seed", "7",
                     "--range", "full", "--beta-grid", "0.7",
                     "--r-grid", "0.5", "-o", str(out)]) == 0
        assert any(c.startswith("warning") for c in comment_block(out))

    def test_heatmap_written(self, tmp_path):
        out = tmp_path / "pw.csv"
        svg = tmp_path / "pw.svg"
        assert main(["power", "--statistic", "hc", "--p", "200",
                     "--replications", "40", "--seed", "7",
                     "--range", "full", "--beta-grid", "0.6,0.8",
                     "--r-grid", "0.2,0.8", "-o", str(out),
                     "--plot", str(svg)]) == 0
        assert svg.read_bytes().lstrip().startswith(b"<?xml")


class TestMdrCheck:
    def test_small_run_reports_max_error(self, tmp_path):
        out = tmp_path / "mdr.csv"
        code = main(["mdr-check", "--n", "200", "--df", "5", "--p", "10000",
                     "--replications", "40000", "--seed", "2",
                     "-o", str(out)])
        assert code == 0
        rows = read_table(out)
        assert rows[0] == ["lambda", "empirical_tail", "normal_tail",
                           "ratio_error"]
        errors = [float(r[3]) for r in rows[1:]]
        reported = [c for c in comment_block(out)
                    if c.startswith("max_ratio_error")]
        assert float(reported[0].split("=")[1]) == max(errors)
        # at these scales the tail ratio is already close to one
        assert max(errors) < 0.5

    def test_lambda_max_validation(self, capsys):
        assert main(["mdr-check", "--lambda-max", "nope"]) == 2
        assert main(["mdr-check", "--lambda-max", "-1"]) == 2


class TestVcCheck:
    def test_figure_and_quadruples(self, tmp_path):
        out = tmp_path / "vc.csv"
        code = main(["vc-check", "--seed", "0", "-o", str(out)])
        assert code == 0
        rows = read_table(out)
        assert rows[0] == ["case", "n_points", "n_subsets", "shattered"]
        by_case = {r[0]: r for r in rows[1:]}
        assert by_case["figure_triple"][2:] == ["8", "true"]
        assert by_case["figure_triple_plus_origin"][2:] == ["10", "false"]
        quad_rows = [r for r in rows[1:] if r[0].startswith("quadruple_")]
        assert len(quad_rows) == 500
        assert all(int(r[2]) < 16 for r in quad_rows)
        summary = comment_block(out)
        assert any(c == "all_quadruples_below_16 = true" for c in summary)


class TestPartialOutputCleanup:
    def test_csv_removed_when_plot_fails(self, tmp_path):
        out = tmp_path / "pw.csv"
        code = main(["power", "--statistic", "hc", "--p", "100",
                     "--replications", "20", "--seed", "1",
                     "--range", "full", "--beta-grid", "0.7",
                     "--r-grid", "0.5", "-o", str(out),
                     "--plot", "/no/such/dir/x.svg"])
        assert code == 2
        assert not out.exists()


class TestConfigFileFlow:
    def test_flags_override_file(self, tmp_path):
        ini = tmp_path / "exp.ini"
        ini.write_text(ExperimentConfig(p=100, replications=5,
                                        master_seed=1,
                                        range_mode="full").to_ini())
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["hc", "--config", str(ini), "-o", str(out1)]) == 0
        # same file, p overridden on the command line
        assert main(["hc", "--config", str(ini), "--p", "200",
                     "-o", str(out2)]) == 0
        assert any("p = 100" in c for c in comment_block(out1))
        assert any("p = 200" in c for c in comment_block(out2))
        assert out1.read_bytes() != out2.read_bytes()
