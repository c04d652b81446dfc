import csv
import json

import pytest

import gatelab as gl
from gatelab.cli import dispatch


def run(tmp_path, *argv, config=None):
    args = list(argv)
    if config is not None:
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(config))
        args = ["--config", str(cfg_path)] + args
    return dispatch(args)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestDispatchBasics:
    def test_no_subcommand_is_usage_error(self, tmp_path, capsys):
        assert dispatch([]) == 1
        err = capsys.readouterr().err
        assert "usage" in err.lower()

    def test_unknown_subcommand(self, capsys):
        assert dispatch(["frobnicate"]) == 1

    def test_help_exits_zero(self, capsys):
        assert dispatch(["--help"]) == 0

    def test_unknown_config_key_is_hard_error(self, tmp_path, capsys):
        rc = run(tmp_path, "--out", str(tmp_path), "design",
                 config={"design": {"scale": 1, "sclae": 2}})
        assert rc == 1
        assert "sclae" in capsys.readouterr().err

    def test_unknown_top_level_key_is_hard_error(self, tmp_path):
        assert run(tmp_path, "--out", str(tmp_path), "design", config={"desing": {}}) == 1

    def test_invalid_json_config(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text("{not json")
        assert dispatch(["--config", str(cfg), "design"]) == 1

    def test_overwrite_needs_force(self, tmp_path):
        out = str(tmp_path)
        assert dispatch(["--out", out, "design", "--scale", "1"]) == 0
        assert dispatch(["--out", out, "design", "--scale", "1"]) == 1
        assert dispatch(["--out", out, "--force", "design", "--scale", "1"]) == 0


class TestDesign:
    def test_grid_csv_contents(self, tmp_path):
        assert dispatch(["--out", str(tmp_path), "design", "--scale", "1"]) == 0
        rows = read_rows(tmp_path / "design.csv")
        assert len(rows) == 33
        for row in rows:
            if row["position"] == "6":
                assert row["exp_time_A"] == row["exp_time_B"]
        assert {row["set_index"] for row in rows} == {"1", "2", "3"}

    def test_scale_two_doubles_anchors(self, tmp_path):
        assert dispatch(["--out", str(tmp_path), "design", "--scale", "2"]) == 0
        rows = read_rows(tmp_path / "design.csv")
        assert all(row["t_line_A"] == "40" for row in rows)


class TestPipeline:
    def test_simulate_fit_analyze_round_trip(self, tmp_path):
        out = str(tmp_path)
        config = {
            "simulate": {
                "scale": 1,
                "treatment": "context+no_transparency",
                "policy": {"kind": "logit", "theta": {
                    "c_line": 0.05, "c_agent": 0.03, "c_bot": 0.04,
                    "c_nt": 1.0, "beta_base": 1.5, "beta_nudge": 1.0,
                }},
                "n_subjects": 12,
            },
        }
        assert run(tmp_path, "--out", out, "--seed", "5", "simulate", config=config) == 0
        data = tmp_path / "simulate.csv"
        assert len(read_rows(data)) == 12 * 33

        rc = run(
            tmp_path, "--out", out, "--force", "analyze", "--data", str(data),
            config={"analyze": {"mu0": 5.5, "sidedness": "two",
                                "proportion": {"k": 49, "n": 100, "p0": 0.5}}},
        )
        assert rc == 0
        report = json.loads((tmp_path / "analyze.json").read_text())
        assert report["n_records"] == 12 * 33
        assert report["proportion_test"]["p"] == pytest.approx(0.920, abs=1e-3)
        assert len(report["holm_adjusted_p"]) == 2

    def test_fit_requires_identifiable_data(self, tmp_path, capsys):
        out = str(tmp_path)
        config = {"simulate": {"treatment": "context", "n_subjects": 4,
                               "policy": {"kind": "time_minimizer"}}}
        assert run(tmp_path, "--out", out, "simulate", config=config) == 0
        rc = dispatch(["--out", out, "fit", "--data", str(tmp_path / "simulate.csv"),
                       "--starts", "1"])
        assert rc == 2  # computation error: nudge/no-transparency records missing

    def test_fit_emits_report(self, tmp_path, recovery_small_csv):
        out = str(tmp_path)
        rc = run(
            tmp_path, "--out", out, "fit", "--data", str(recovery_small_csv),
            config={"fit": {"n_starts": 1, "max_iterations": 800, "tolerance": 1e-6,
                            "bootstrap_replicates": 3}},
        )
        assert rc == 0
        report = json.loads((tmp_path / "fit.json").read_text())
        assert set(report["theta_hat"]) == set(gl.PARAM_NAMES)
        assert report["log_likelihood"] < 0
        assert report["bootstrap"]["n_replicates"] + report["bootstrap"]["n_skipped"] == 3

    def test_missing_data_flag(self, tmp_path):
        assert dispatch(["--out", str(tmp_path), "fit"]) == 1
        assert dispatch(["--out", str(tmp_path), "analyze"]) == 1


class TestEquilibriumAndSweep:
    def test_equilibrium_report(self, tmp_path):
        rc = run(
            tmp_path, "--out", str(tmp_path), "equilibrium", "--t-bar", "20",
            config={"equilibrium": {"flags": {"priority": True}}},
        )
        assert rc == 0
        report = json.loads((tmp_path / "equilibrium.json").read_text())
        assert report["t_line_B"] == pytest.approx(0.9 * report["t_line_A"])
        assert report["utilization"] < 1.0

    def test_sweep_outputs(self, tmp_path):
        config = {"sweep": {"t_bar_grid": {"start": 1, "stop": 10, "step": 1},
                            "p_B_values": [0.5]}}
        assert run(tmp_path, "--out", str(tmp_path), "sweep", config=config) == 0
        rows = read_rows(tmp_path / "sweep.csv")
        assert len(rows) == 10 * 1 * 5
        summary = json.loads((tmp_path / "sweep.json").read_text())
        assert len(summary["summary"]) == 5

    def test_bad_scenario_value(self, tmp_path):
        config = {"sweep": {"scenarios": [{"priority": True, "turbo": True}]}}
        assert run(tmp_path, "--out", str(tmp_path), "sweep", config=config) == 1


class TestDes:
    def test_report_and_trace(self, tmp_path):
        config = {"des": {"rho_B": 0.5, "mu": 0.2, "n_arrivals": 500, "trace": True}}
        assert run(tmp_path, "--out", str(tmp_path), "--seed", "3", "des", config=config) == 0
        report = json.loads((tmp_path / "des.json").read_text())
        assert report["stats"]["n_served"] <= 500
        ref = report["analytical_reference"]
        assert ref["pk_mean_sojourn"] == pytest.approx(
            ref["pk_mean_queue_wait"] + 1.0 / 0.2
        )
        assert len(read_rows(tmp_path / "des_trace.csv")) == 500


class TestDeterminism:
    def rerun_bytes(self, tmp_path, name, *argv, config=None):
        first = tmp_path / "a"
        second = tmp_path / "b"
        for out in (first, second):
            assert run(tmp_path, "--out", str(out), *argv, config=config) == 0
        return (first / name).read_bytes(), (second / name).read_bytes()

    def test_design_bytes(self, tmp_path):
        a, b = self.rerun_bytes(tmp_path, "design.csv", "design", "--scale", "2")
        assert a == b

    def test_simulate_bytes(self, tmp_path):
        config = {"simulate": {"n_subjects": 10, "policy": {"kind": "time_minimizer"}}}
        a, b = self.rerun_bytes(tmp_path, "simulate.csv", "--seed", "11", "simulate",
                                config=config)
        assert a == b

    def test_des_bytes(self, tmp_path):
        config = {"des": {"rho_B": 0.4, "mu": 0.2, "n_arrivals": 2000}}
        a, b = self.rerun_bytes(tmp_path, "des.json", "--seed", "2", "des", config=config)
        assert a == b

    def test_sweep_bytes_across_thread_counts(self, tmp_path):
        config = {"sweep": {"t_bar_grid": {"start": 1, "stop": 15, "step": 1}}}
        outs = []
        for threads, sub in (("1", "t1"), ("4", "t4")):
            out = tmp_path / sub
            assert run(tmp_path, "--out", str(out), "--threads", threads, "sweep",
                       config=config) == 0
            outs.append((out / "sweep.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_threads_env_var_honored(self, tmp_path, monkeypatch):
        config = {"sweep": {"t_bar_grid": [5.0], "p_B_values": [0.5]}}
        monkeypatch.setenv("GATELAB_THREADS", "2")
        out_env = tmp_path / "env"
        assert run(tmp_path, "--out", str(out_env), "sweep", config=config) == 0
        monkeypatch.setenv("GATELAB_THREADS", "0")  # invalid unless overridden
        assert run(tmp_path, "--out", str(tmp_path / "x"), "sweep", config=config) == 1
        out_flag = tmp_path / "flag"
        assert run(tmp_path, "--out", str(out_flag), "--threads", "1", "sweep",
                   config=config) == 0
        assert (out_env / "sweep.csv").read_bytes() == (out_flag / "sweep.csv").read_bytes()


class TestColumnContracts:
    def test_grid_csv_column_order(self, tmp_path):
        assert dispatch(["--out", str(tmp_path), "design", "--scale", "1"]) == 0
        header = (tmp_path / "design.csv").read_text().splitlines()[0]
        assert header == (
            "scale,set_index,position,t_line_A,t_serve_A,"
            "t_serve1_B,p_B,t_line_B,t_serve2_B,exp_time_A,exp_time_B"
        )

    def test_sweep_csv_column_order(self, tmp_path):
        config = {"sweep": {"t_bar_grid": [5.0], "p_B_values": [0.5]}}
        assert run(tmp_path, "--out", str(tmp_path), "sweep", config=config) == 0
        header = (tmp_path / "sweep.csv").read_text().splitlines()[0]
        assert header == "t_bar_line,p_B,transparency,nudge,priority,rho_B,lambda_A,mu,cost,savings"

    def test_choices_csv_column_order(self, tmp_path):
        config = {"simulate": {"n_subjects": 1, "policy": {"kind": "time_minimizer"}}}
        assert run(tmp_path, "--out", str(tmp_path), "simulate", config=config) == 0
        header = (tmp_path / "simulate.csv").read_text().splitlines()[0]
        assert header == (
            "subject_id,scale,set_index,position,context,transparency,nudge,"
            "deterministic,chose_B"
        )


@pytest.fixture()
def recovery_small_csv(tmp_path_factory):
    from conftest import THETA_STAR, synthetic_records
    from gatelab.io import write_choices_csv

    path = tmp_path_factory.mktemp("data") / "choices.csv"
    write_choices_csv(path, synthetic_records(THETA_STAR, 8, seed=31, scales=(1,)))
    return path
