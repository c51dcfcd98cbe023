"""CLI tests: exit codes, file outputs, determinism, env overrides."""

import numpy as np
import pytest

from rpurn.cli import main
from rpurn.ingest import read_series

POSTS = """\
{"id": "a", "timestamp": 1, "sentiment_value": 0.5}
{"id": "b", "timestamp": 2, "sentiment_value": 0.2}
{"id": "c", "timestamp": 3, "sentiment_value": -0.4}
{"id": "d", "timestamp": 4, "sentiment_value": 0.36}
"""


@pytest.fixture()
def posts_file(tmp_path):
    path = tmp_path / "posts.jsonl"
    path.write_text(POSTS)
    return path


def run_cli(*args):
    return main([str(a) for a in args])


@pytest.fixture()
def small_series(tmp_path):
    out = tmp_path / "sim"
    code = run_cli("simulate", "--model", "complete", "--p0", "0.4",
                   "--gamma-star", "0.7", "--beta", "0.95", "--steps", "400",
                   "--seed", "5", "--output-dir", out)
    assert code == 0
    return out / "series.txt"


class TestIngest:
    def test_threshold_fixture(self, posts_file, tmp_path):
        out = tmp_path / "out"
        assert run_cli("ingest", "--input", posts_file, "--output-dir", out) == 0
        series = read_series(out / "series.txt")
        np.testing.assert_array_equal(series.values, [1, 0, 1])
        assert series.discarded_count == 1
        assert series.threshold == pytest.approx(0.35)
        assert (out / "descriptives.csv").read_text().startswith("metric,value")

    def test_empty_input_is_a_data_error(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        assert run_cli("ingest", "--input", empty,
                       "--output-dir", tmp_path / "o") == 3

    def test_missing_input_is_a_data_error(self, tmp_path):
        assert run_cli("ingest", "--input", tmp_path / "absent.jsonl",
                       "--output-dir", tmp_path / "o") == 3

    def test_bots_only_without_flags_is_a_config_error(self, posts_file, tmp_path):
        assert run_cli("ingest", "--input", posts_file, "--subset", "bots_only",
                       "--output-dir", tmp_path / "o") == 2

    def test_threshold_env_override(self, posts_file, tmp_path, monkeypatch):
        monkeypatch.setenv("RPURN_THRESHOLD", "0.45")
        out = tmp_path / "out"
        assert run_cli("ingest", "--input", posts_file, "--output-dir", out) == 0
        assert read_series(out / "series.txt").threshold == pytest.approx(0.45)

    def test_flag_beats_env(self, posts_file, tmp_path, monkeypatch):
        monkeypatch.setenv("RPURN_THRESHOLD", "0.45")
        out = tmp_path / "out"
        assert run_cli("ingest", "--input", posts_file, "--output-dir", out,
                       "--threshold", "0.35") == 0
        assert read_series(out / "series.txt").threshold == pytest.approx(0.35)


class TestSimulate:
    def test_certain_model_emits_ones(self, tmp_path):
        out = tmp_path / "sim"
        assert run_cli("simulate", "--model", "no_fashion", "--p0", "1.0",
                       "--steps", "100", "--output-dir", out) == 0
        series = read_series(out / "series.txt")
        assert (series.values == 1).all()
        assert series.source_count == 100

    def test_seeded_rerun_is_byte_identical(self, tmp_path):
        args = ("simulate", "--model", "only_fashion", "--beta", "0.9",
                "--steps", "500", "--seed", "7")
        a, b = tmp_path / "a", tmp_path / "b"
        assert run_cli(*args, "--output-dir", a) == 0
        assert run_cli(*args, "--output-dir", b) == 0
        assert (a / "series.txt").read_bytes() == (b / "series.txt").read_bytes()

    def test_exact_urn_generator(self, tmp_path):
        out = tmp_path / "rp"
        assert run_cli("simulate", "--model", "rp_exact", "--b0", "1,1",
                       "--b0-reinforced", "0,0", "--alpha", "1.0",
                       "--beta", "0.9", "--steps", "200", "--seed", "3",
                       "--output-dir", out) == 0
        assert len(read_series(out / "series.txt")) == 200

    def test_invalid_parameter_box_is_a_config_error(self, tmp_path):
        assert run_cli("simulate", "--model", "complete", "--beta", "1.5",
                       "--steps", "10", "--output-dir", tmp_path / "o") == 2

    def test_unknown_model_is_a_usage_error(self, tmp_path):
        assert run_cli("simulate", "--model", "nope", "--steps", "10",
                       "--output-dir", tmp_path / "o") == 2


class TestFitEval:
    def test_report_shape_and_determinism(self, small_series, tmp_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        args = ("fit-eval", "--input", small_series, "--slots", "4",
                "--models", "complete,only_fashion,no_fashion,polya",
                "--knots", "3,5", "--grid", "7")
        assert run_cli(*args, "--output-dir", out1) == 0
        report = (out1 / "report.csv").read_text()
        lines = report.strip().split("\n")
        assert lines[0] == "metric,complete,only_fashion,no_fashion,polya,theoretical"
        assert len(lines) == 1 + 1 + 3  # header, ss_rel, no_smooth + two knot rows
        assert {"params_complete.csv", "params_only_fashion.csv",
                "params_no_fashion.csv", "params_polya.csv"} <= {
            p.name for p in out1.iterdir()}
        assert run_cli(*args, "--output-dir", out2) == 0
        for name in ("report.csv", "report.json", "params_complete.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_params_csv_rows_cover_all_slots(self, small_series, tmp_path):
        out = tmp_path / "r"
        assert run_cli("fit-eval", "--input", small_series, "--slots", "5",
                       "--models", "no_fashion", "--knots", "3",
                       "--output-dir", out) == 0
        lines = (out / "params_no_fashion.csv").read_text().strip().split("\n")
        assert len(lines) == 1 + 4
        assert lines[0].startswith("slot,training_end,p0")

    def test_default_knots_give_seven_mse_rows(self, small_series, tmp_path):
        out = tmp_path / "r"
        assert run_cli("fit-eval", "--input", small_series, "--slots", "4",
                       "--grid", "5", "--output-dir", out) == 0
        lines = (out / "report.csv").read_text().strip().split("\n")
        mse_rows = [ln for ln in lines if ln.startswith("mse_")]
        assert len(mse_rows) == 7  # no-smooth plus the six default knot counts
        assert all(len(row.split(",")) == 6 for row in lines)  # 4 models + theo

    def test_in_sample_curves(self, small_series, tmp_path):
        out = tmp_path / "r"
        assert run_cli("fit-eval", "--input", small_series, "--slots", "4",
                       "--models", "no_fashion", "--knots", "3",
                       "--curves", "in_sample", "--output-dir", out) == 0
        lines = (out / "psi_no_fashion.csv").read_text().strip().split("\n")
        assert lines[1].split(",")[0] == "0"  # whole-series curve starts at 0
        assert len(lines) == 401

    def test_out_of_sample_curves(self, small_series, tmp_path):
        out = tmp_path / "r"
        assert run_cli("fit-eval", "--input", small_series, "--slots", "4",
                       "--models", "no_fashion", "--knots", "3",
                       "--curves", "out_of_sample", "--output-dir", out) == 0
        lines = (out / "psi_no_fashion.csv").read_text().strip().split("\n")
        assert lines[0] == "index,psi_hat"
        first_index = int(lines[1].split(",")[0])
        assert first_index == 100  # slot length for 400 observations in 4 slots

    def test_series_too_short_is_a_config_error(self, small_series, tmp_path):
        assert run_cli("fit-eval", "--input", small_series, "--slots", "300",
                       "--output-dir", tmp_path / "o") == 2

    def test_unknown_model_is_a_config_error(self, small_series, tmp_path):
        assert run_cli("fit-eval", "--input", small_series, "--slots", "4",
                       "--models", "bogus", "--output-dir", tmp_path / "o") == 2

    def test_bad_knots_is_a_config_error(self, small_series, tmp_path):
        assert run_cli("fit-eval", "--input", small_series, "--slots", "4",
                       "--knots", "2,5", "--output-dir", tmp_path / "o") == 2


class TestSmooth:
    def test_columns_match_requested_knots(self, small_series, tmp_path):
        out = tmp_path / "s"
        assert run_cli("smooth", "--input", small_series, "--knots", "3,5,10",
                       "--output-dir", out) == 0
        lines = (out / "smoothed.csv").read_text().strip().split("\n")
        assert lines[0] == "k3,k5,k10"
        assert len(lines[1].split(",")) == 3
        assert len(lines) == 401

    def test_constant_series_smooths_flat(self, tmp_path):
        src = tmp_path / "sim"
        assert run_cli("simulate", "--model", "no_fashion", "--p0", "1.0",
                       "--steps", "60", "--output-dir", src) == 0
        out = tmp_path / "s"
        assert run_cli("smooth", "--input", src / "series.txt", "--knots", "3,5",
                       "--output-dir", out) == 0
        data = np.loadtxt(out / "smoothed.csv", delimiter=",", skiprows=1)
        np.testing.assert_allclose(data, 1.0, atol=1e-9)

    def test_rougher_fit_has_larger_residual(self, small_series, tmp_path):
        out = tmp_path / "s"
        assert run_cli("smooth", "--input", small_series, "--knots", "3,50",
                       "--output-dir", out) == 0
        data = np.loadtxt(out / "smoothed.csv", delimiter=",", skiprows=1)
        bits = read_series(small_series).values.astype(float)
        rss3 = ((data[:, 0] - bits) ** 2).sum()
        rss50 = ((data[:, 1] - bits) ** 2).sum()
        assert rss3 >= rss50

    def test_too_short_series_is_a_config_error(self, tmp_path):
        src = tmp_path / "sim"
        assert run_cli("simulate", "--model", "no_fashion", "--steps", "10",
                       "--output-dir", src) == 0
        assert run_cli("smooth", "--input", src / "series.txt", "--knots", "50",
                       "--output-dir", tmp_path / "s") == 2


class TestParamsEvolution:
    def test_writes_per_model_files(self, small_series, tmp_path):
        out = tmp_path / "p"
        assert run_cli("params-evolution", "--input", small_series,
                       "--slots", "4", "--models", "no_fashion,polya",
                       "--output-dir", out) == 0
        assert (out / "params_no_fashion.csv").exists()
        assert (out / "params_polya.csv").exists()
        lines = (out / "params_polya.csv").read_text().strip().split("\n")
        assert len(lines) == 4
        # polya rows leave the approx columns empty and fill a1, a
        first = lines[1].split(",")
        assert first[2] == "" and first[5] != ""


class TestUsage:
    def test_no_command_is_a_usage_error(self):
        assert main([]) == 2

    def test_missing_required_flag_is_a_usage_error(self):
        assert main(["ingest"]) == 2

    def test_help_exits_clean(self):
        assert main(["--help"]) == 0
