import json
import math
import subprocess
import sys

import pytest

from exspacings.cli import _dump_json, _fmt_float, parse_score
from exspacings.errors import ValidationError


def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "exspacings.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


class TestFormatting:
    def test_seventeen_digits(self):
        assert _fmt_float(1.0 / 3.0) == "0.33333333333333331"

    def test_specials(self):
        assert _fmt_float(math.inf) == "Infinity"
        assert _fmt_float(-math.inf) == "-Infinity"
        assert _fmt_float(math.nan) == "NaN"

    def test_dump_roundtrip(self):
        obj = {"a": 0.1, "b": [1, 2.5], "c": {"d": True, "e": None}}
        parsed = json.loads(_dump_json(obj))
        assert parsed == obj


class TestParseScore:
    def test_builtins(self):
        assert parse_score("jtilde").name == "jtilde"
        assert parse_score("box").trim == (0.2, 0.8)
        assert parse_score("box:0.1:0.9").trim == (0.1, 0.9)

    def test_unknown(self):
        with pytest.raises(ValidationError):
            parse_score("mystery")


class TestCheckCommand:
    def test_w3_report(self, tmp_path):
        res = run_cli(["check", "--weight", "w3", "--lambda", "1"], tmp_path)
        assert res.returncode == 0
        out = json.loads(res.stdout)
        r = out["result"]
        assert r["condition1"] is True
        assert r["condition2"] is True
        assert r["steep"] is False
        assert abs(r["boundary_slope"] - 1.0) < 1e-4

    def test_unbounded_ratio_still_reports(self, tmp_path):
        res = run_cli(["check", "--weight", "fgce:0.5"], tmp_path)
        assert res.returncode == 0
        r = json.loads(res.stdout)["result"]
        assert r["condition2"] is False
        assert r["steep"] is None


class TestRateCommand:
    def test_w2_boundary_row(self, tmp_path):
        res = run_cli(
            ["rate", "--weight", "w2", "--lambda", "1", "--theta", "1",
             "--y-grid", "1"],
            tmp_path,
        )
        assert res.returncode == 0
        lines = (tmp_path / "rate_theta.csv").read_text().splitlines()
        assert lines[0] == "theta,lambda_w,lambda_w_prime,lambda_w_second"
        value = float(lines[1].split(",")[1])
        assert abs(value - 1.0) < 1e-6

    def test_condition_failure_exit_code(self, tmp_path):
        res = run_cli(["rate", "--weight", "fgce:0.5", "--lambda", "1"], tmp_path)
        assert res.returncode == 3
        assert "unbounded" in res.stderr

    def test_validation_exit_code(self, tmp_path):
        res = run_cli(["rate", "--weight", "nope"], tmp_path)
        assert res.returncode == 2

    def test_missing_weight(self, tmp_path):
        res = run_cli(["rate"], tmp_path)
        assert res.returncode == 2


class TestSimulateCommand:
    def test_csv_layout(self, tmp_path):
        res = run_cli(
            ["simulate", "--weight", "w1", "--n", "5", "--replicates", "3",
             "--seed", "1"],
            tmp_path,
        )
        assert res.returncode == 0
        lines = (tmp_path / "simulate.csv").read_text().splitlines()
        assert lines[0] == "replicate,value,log_weight"
        assert len(lines) == 4
        assert lines[1].endswith(",")  # untilted: blank log_weight

    def test_tilted_has_log_weight(self, tmp_path):
        res = run_cli(
            ["simulate", "--weight", "w1", "--n", "5", "--replicates", "3",
             "--seed", "1", "--theta", "0.2"],
            tmp_path,
        )
        assert res.returncode == 0
        lines = (tmp_path / "simulate.csv").read_text().splitlines()
        assert not lines[1].endswith(",")

    def test_byte_identical_reruns(self, tmp_path):
        args = ["simulate", "--weight", "w2", "--n", "20", "--replicates", "50",
                "--seed", "9"]
        d1, d2 = tmp_path / "a", tmp_path / "b"
        d1.mkdir()
        d2.mkdir()
        assert run_cli(args, d1).returncode == 0
        assert run_cli(args, d2).returncode == 0
        assert (d1 / "simulate.csv").read_bytes() == (d2 / "simulate.csv").read_bytes()
        assert (d1 / "simulate.json").read_bytes() == (d2 / "simulate.json").read_bytes()


class TestConfigFile:
    def test_config_supplies_values(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"weight": "w1", "n": 4, "replicates": 2, "seed": 7}))
        res = run_cli(["simulate", "--config", str(cfg)], tmp_path)
        assert res.returncode == 0
        out = json.loads(res.stdout)
        assert out["config"]["n"] == 4

    def test_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"weight": "w1", "n": 4, "replicates": 2, "seed": 7}))
        res = run_cli(["simulate", "--config", str(cfg), "--n", "6"], tmp_path)
        assert res.returncode == 0
        assert json.loads(res.stdout)["config"]["n"] == 6

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"weight": "w1", "n": 4, "bogus": 1}))
        res = run_cli(["simulate", "--config", str(cfg)], tmp_path)
        assert res.returncode == 2
        assert "bogus" in res.stderr


class TestEntropyCommand:
    def test_plain_text_input(self, tmp_path):
        sample = tmp_path / "s.txt"
        sample.write_text("1.0\n2.0\n")
        res = run_cli(["entropy", "--input", str(sample), "--kind", "ce"], tmp_path)
        assert res.returncode == 0
        r = json.loads(res.stdout)["result"]
        assert abs(r["estimate"] - math.log(2) / 2) < 1e-12
        assert r["n"] == 2
        assert r["spec"] == "ce"

    def test_fgce_requires_alpha(self, tmp_path):
        sample = tmp_path / "s.txt"
        sample.write_text("1.0\n2.0\n")
        res = run_cli(["entropy", "--input", str(sample), "--kind", "fgce"], tmp_path)
        assert res.returncode == 2


class TestBridgeCommand:
    def test_jtilde_passes(self, tmp_path):
        res = run_cli(["bridge", "--score", "jtilde"], tmp_path)
        assert res.returncode == 0
        r = json.loads(res.stdout)["result"]
        assert r["pass"] is True
        assert r["max_abs_gap"] <= 1e-5


class TestVerifyCommands:
    def test_ldp_outputs(self, tmp_path):
        res = run_cli(
            ["verify-ldp", "--weight", "w1", "--y-grid", "2", "--n-list", "50",
             "--replicates", "2000", "--seed", "1"],
            tmp_path,
        )
        assert res.returncode == 0
        assert (tmp_path / "ldp.csv").exists()
        gap_lines = (tmp_path / "ldp_gap.tsv").read_text().splitlines()
        assert len(gap_lines) == 1
        assert "\t" in gap_lines[0]

    def test_mdp_outputs(self, tmp_path):
        res = run_cli(
            ["verify-mdp", "--weight", "w1", "--rho", "0.5", "--n-list", "100",
             "--y-grid", "0.5", "--replicates", "2000", "--seed", "1"],
            tmp_path,
        )
        assert res.returncode == 0
        assert (tmp_path / "mdp.csv").exists()

    def test_clt_output(self, tmp_path):
        res = run_cli(
            ["clt", "--weight", "w1", "--n", "200", "--replicates", "500",
             "--seed", "3"],
            tmp_path,
        )
        assert res.returncode == 0
        r = json.loads(res.stdout)["result"]
        assert abs(r["target_sigma2"] - 1.0) < 1e-8

    def test_clt_condition_gate(self, tmp_path):
        res = run_cli(
            ["clt", "--weight", "poly:0.6", "--n", "50", "--replicates", "10"],
            tmp_path,
        )
        assert res.returncode == 3


class TestThreadsFlag:
    def test_thread_count_does_not_change_output(self, tmp_path):
        base = ["simulate", "--weight", "w1", "--n", "50", "--replicates", "200",
                "--seed", "5"]
        outs = []
        for k in ("1", "2"):
            d = tmp_path / f"t{k}"
            d.mkdir()
            res = run_cli(base + ["--threads", k], d)
            assert res.returncode == 0
            outs.append((d / "simulate.csv").read_bytes())
        assert outs[0] == outs[1]
