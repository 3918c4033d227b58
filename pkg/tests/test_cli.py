import io
import json
import math
import sys

import numpy as np
import pytest

from pmean.cli import build_parser, parse_p, parse_vector, run
from pmean.numcore import DomainError


def run_capture(argv, capsys):
    code = run(argv)
    out = capsys.readouterr().out
    return code, out


def rebuild_argv(config: dict) -> list:
    """Reconstruct the command line from an echoed config block."""
    argv = [config["cmd"]]
    for key, val in config.items():
        if key == "cmd" or val is None:
            continue
        flag = "--" + {"lo": "from", "hi": "to"}.get(key, key)
        if isinstance(val, bool):
            if val:
                argv.append(flag)
        else:
            argv.extend([flag, str(val)])
    return argv


class TestParsing:
    def test_parse_p(self):
        assert parse_p("-inf") == -math.inf
        assert parse_p("inf") == math.inf
        assert parse_p("2.5") == 2.5

    def test_vector_literals(self):
        assert np.array_equal(parse_vector("1,0,0", 3), np.array([1.0, 0.0, 0.0]))
        assert np.array_equal(parse_vector("equalized:2", 3), np.full(3, 2.0))
        v = parse_vector("spike:1.5", 4)
        assert v[0] == 1.5 * 2.0 and np.all(v[1:] == 0.0)
        v = parse_vector("block:2:0.7", 4)
        assert np.array_equal(v, np.array([0.7, 0.7, 0.0, 0.0]))

    def test_vector_file(self, tmp_path):
        f = tmp_path / "vec.txt"
        f.write_text("1.0 2.0\n3.0\n")
        assert np.array_equal(parse_vector(str(f), 3), np.array([1.0, 2.0, 3.0]))

    def test_vector_dimension_mismatch(self):
        with pytest.raises(DomainError):
            parse_vector("1,2", 3)


class TestSubcommands:
    def test_version(self, capsys):
        code, out = run_capture(["version"], capsys)
        assert code == 0
        assert "version" in json.loads(out)["result"]

    def test_critval_json(self, capsys):
        code, out = run_capture(["critval", "--p", "2", "--d", "100", "--alpha", "0.05"],
                                capsys)
        assert code == 0
        doc = json.loads(out)
        assert abs(doc["result"]["critical_value"] - 1.11023305244) < 1e-9
        assert doc["config"]["cmd"] == "critval"

    def test_samplesize_unit_theta(self, capsys):
        # spike:0.1 at d=100 has ||theta||^2 = 1, the closed-form n = 47 case
        code, out = run_capture(
            ["samplesize", "--p", "2", "--d", "100", "--alpha", "0.05",
             "--beta", "0.95", "--theta", "spike:0.1"], capsys)
        assert code == 0
        assert json.loads(out)["result"]["n"] == 47

    def test_samplesize_infeasible_exit3(self, capsys):
        code, out = run_capture(
            ["samplesize", "--p", "-2", "--d", "100", "--alpha", "0.05",
             "--beta", "0.95", "--theta", "spike:1.0"], capsys)
        assert code == 3

    def test_feasible(self, capsys):
        # infeasible verdicts exit 3 (scripting contract) with the full result
        code, out = run_capture(
            ["feasible", "--p", "-2", "--d", "100", "--alpha", "0.05",
             "--beta", "0.95", "--u", "spike:1.0"], capsys)
        assert code == 3
        doc = json.loads(out)
        assert doc["result"]["feasible"] is False
        assert doc["result"]["d0"] == 99
        code, out = run_capture(
            ["feasible", "--p", "-2", "--d", "100", "--alpha", "0.05",
             "--beta", "0.95", "--u", "equalized:1.0"], capsys)
        assert code == 0
        assert json.loads(out)["result"]["feasible"] is True

    def test_negative_p_spellings(self, capsys):
        code, out = run_capture(
            ["critval", "--p", "-inf", "--d", "10000", "--alpha", "0.05"], capsys)
        assert code == 0
        assert abs(json.loads(out)["result"]["critical_value"] - 3.7546e-4) < 1e-7
        code, out = run_capture(
            ["critval", "--p=-0.5", "--d", "1000", "--alpha", "0.05"], capsys)
        assert code == 0

    def test_power(self, capsys):
        code, out = run_capture(
            ["power", "--p", "2", "--d", "100", "--alpha", "0.05",
             "--shift", "equalized:0"], capsys)
        assert code == 0
        assert abs(json.loads(out)["result"]["power"] - 0.05) < 1e-9

    def test_are_finite(self, capsys):
        code, out = run_capture(
            ["are-finite", "--p", "1", "--d", "2", "--u", "1,1",
             "--alpha", "0.05", "--beta", "0.95"], capsys)
        assert code == 0
        assert abs(json.loads(out)["result"]["are"] - 1.0317) < 2e-3

    def test_are_classifier(self, capsys):
        code, out = run_capture(
            ["are", "--p", "3", "--alpha", "0.05", "--beta", "0.95",
             "--useq", "spike", "--dims", "100,10000,1000000"], capsys)
        assert code == 0
        assert json.loads(out)["result"]["tag"] == "infinite"

    def test_ap_curve_contains_exact_values(self, capsys):
        code, out = run_capture(
            ["ap-curve", "--from", "-0.49", "--to", "8", "--step", "0.01", "--psi"],
            capsys)
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "p,a_p,psi_p,psi_a"
        rows = {ln.split(",")[0]: ln.split(",") for ln in lines[1:]}
        assert rows["2"][1] == "1"
        assert abs(float(rows["0"][1]) - 2 / math.pi) < 1e-11
        assert float(rows["0"][2]) == 0.0
        assert abs(float(rows["3"][1]) - 0.959246530077) < 1e-9

    def test_verify_ap(self, capsys):
        code, out = run_capture(
            ["verify-ap", "--from", "-0.4", "--to", "5", "--step", "0.01"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["result"]["ok"] is True
        assert doc["result"]["r_violations"] == 0

    def test_simulate_size(self, capsys):
        code, out = run_capture(
            ["simulate", "--p", "2", "--d", "50", "--alpha", "0.05",
             "--reps", "20000", "--seed", "7"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert abs(doc["result"]["estimate"] - 0.05) < 0.01

    def test_ks(self, capsys):
        code, out = run_capture(
            ["ks", "--p", "1", "--d", "500", "--nrep", "2000", "--seed", "3"], capsys)
        assert code == 0
        assert json.loads(out)["result"]["distance"] < 0.05

    def test_schur2(self, capsys):
        code, out = run_capture(
            ["schur2-check", "--p", "1", "--d", "2", "--c", "1.5", "--v", "1.41421356,0",
             "--w", "1,1", "--reps", "100000", "--seed", "5"], capsys)
        assert code == 0
        assert json.loads(out)["result"]["tag"] == "consistent-concave"


class TestContracts:
    def test_usage_exit_64(self, capsys):
        assert run(["no-such-command"]) == 64
        assert run(["critval", "--bogus-flag", "1"]) == 64

    def test_domain_exit_2(self, capsys):
        assert run(["critval", "--p", "2", "--d", "100", "--alpha", "1.5"]) == 2

    @pytest.mark.parametrize("argv", [
        ["critval", "--p", "0.5", "--d", "60", "--alpha", "0.05", "--method", "mc",
         "--reps", "4000", "--seed", "11"],
        ["simulate", "--p", "-2", "--d", "40", "--alpha", "0.05",
         "--reps", "5000", "--seed", "11", "--critval", "mc"],
        ["power", "--p", "3", "--d", "30", "--alpha", "0.05", "--shift", "equalized:0.3"],
        ["samplesize", "--p", "2", "--d", "30", "--alpha", "0.05", "--beta", "0.9",
         "--theta", "spike:0.2"],
        ["feasible", "--p", "1", "--d", "30", "--alpha", "0.05", "--beta", "0.9",
         "--u", "equalized:1"],
        ["are-finite", "--p", "inf", "--d", "2", "--u", "1,1", "--alpha", "0.1",
         "--beta", "0.8"],
        ["ks", "--p", "2", "--d", "100", "--nrep", "400", "--seed", "2"],
        ["schur2-check", "--p", "1", "--d", "2", "--c", "1.5", "--v", "2,0",
         "--w", "1.41421356237,1.41421356238", "--reps", "2000", "--seed", "5"],
        ["verify-ap", "--from", "-0.4", "--to", "3", "--step", "0.1"],
        ["are", "--p", "-3", "--alpha", "0.05", "--beta", "0.95", "--useq", "equalized"],
    ])
    def test_json_roundtrip_byte_identical(self, argv, capsys):
        code1, out1 = run_capture(argv, capsys)
        cfg = json.loads(out1)["config"]
        code2, out2 = run_capture(rebuild_argv(cfg), capsys)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_threads_do_not_change_output(self, capsys):
        base = ["simulate", "--p", "0", "--d", "64", "--alpha", "0.1",
                "--reps", "30000", "--seed", "3"]
        _, out1 = run_capture(base + ["--threads", "1"], capsys)
        _, out4 = run_capture(base + ["--threads", "4"], capsys)
        d1, d4 = json.loads(out1), json.loads(out4)
        assert d1["result"] == d4["result"]

    def test_env_threads_default(self, capsys, monkeypatch):
        monkeypatch.setenv("PMEAN_THREADS", "3")
        parser = build_parser()
        args = parser.parse_args(["critval", "--p", "2", "--d", "10", "--alpha", "0.05"])
        assert args.threads == 3
