import json

import pytest

from qcalc.cli import main


def run_cli(*argv):
    return main(list(argv))


class TestExitCodes:
    def test_usage_error_is_2(self, capsys):
        assert run_cli("bogus") == 2
        capsys.readouterr()

    def test_bad_config_is_2(self, capsys):
        assert run_cli("verify", "--suite", "all", "--tol", "1e-1") == 2
        assert "tol" in capsys.readouterr().err

    def test_malformed_angles_is_2(self, capsys):
        assert run_cli("bell", "correlations", "--angles", "0,90") == 2
        capsys.readouterr()

    def test_io_error_is_3(self, capsys, tmp_path):
        missing = tmp_path / "no" / "such" / "dir" / "out.json"
        code = run_cli("bell", "bound", "--rates", "0.1,0.1,0.1", "--json", str(missing))
        assert code == 3
        capsys.readouterr()

    def test_success_is_0(self, capsys):
        assert run_cli("bell", "bound", "--rates", "0.15,0.15,0.15") == 0
        capsys.readouterr()


class TestBellCommands:
    def test_bound_prints_paper_value(self, capsys):
        assert run_cli("bell", "bound", "--rates", "0.15,0.15,0.15") == 0
        out = capsys.readouterr().out
        assert "value=0.45" in out

    def test_correlations_json(self, capsys, tmp_path):
        path = tmp_path / "corr.json"
        assert (
            run_cli("bell", "correlations", "--angles", "0,90,45,-45", "--json", str(path))
            == 0
        )
        capsys.readouterr()
        data = json.loads(path.read_text())
        values = {row["name"]: row["value"] for row in data["results"]}
        assert values["same_rate[AJ]"] == pytest.approx(0.8535533905932737, abs=1e-12)
        assert values["same_rate[BK]"] == pytest.approx(0.14644660940672624, abs=1e-12)

    def test_table_and_json_values_match(self, capsys, tmp_path):
        path = tmp_path / "corr.json"
        run_cli("bell", "correlations", "--json", str(path))
        out = capsys.readouterr().out
        data = json.loads(path.read_text())
        for row in data["results"]:
            assert repr(row["value"]) in out

    def test_qq_verdict(self, capsys, tmp_path):
        path = tmp_path / "qq.json"
        assert (
            run_cli(
                "bell", "qq", "--favored", "0.85", "--epsilon", "0.01",
                "--json", str(path),
            )
            == 0
        )
        capsys.readouterr()
        data = json.loads(path.read_text())
        details = data["results"][0]["details"]
        assert details["empty"] is True
        assert details["certificate"]["inequality"] == "0.84 > 0.48"

    def test_tail_value(self, capsys, tmp_path):
        path = tmp_path / "tail.json"
        assert (
            run_cli(
                "bell", "tail", "--n", "100", "--p", "0.85",
                "--lo", "0.84", "--hi", "0.86", "--json", str(path),
            )
            == 0
        )
        capsys.readouterr()
        data = json.loads(path.read_text())
        assert data["results"][0]["name"] == "log10_tail"

    def test_tail_million_runs_band(self, capsys, tmp_path):
        path = tmp_path / "tail.json"
        assert (
            run_cli(
                "bell", "tail", "--n", "1000000", "--p", "0.85",
                "--lo", "0.84", "--hi", "0.86", "--json", str(path),
            )
            == 0
        )
        capsys.readouterr()
        value = json.loads(path.read_text())["results"][0]["value"]
        assert -175.0 <= value <= -160.0

    def test_simulate_reports_band(self, capsys, tmp_path):
        path = tmp_path / "sim.json"
        assert (
            run_cli(
                "bell", "simulate", "--pair", "AJ", "--n", "20000",
                "--seed", "7", "--json", str(path),
            )
            == 0
        )
        capsys.readouterr()
        data = json.loads(path.read_text())
        row = data["results"][0]
        assert row["details"]["n"] == 20000
        assert row["details"]["seed"] == 7
        assert abs(row["value"] - row["details"]["exact_same_rate"]) < 0.02


class TestVerifyCommand:
    def test_identities_suite_green(self, capsys):
        assert run_cli("verify", "--suite", "identities", "--random", "10") == 0
        out = capsys.readouterr().out
        assert "summary:" in out
        assert " failed" in out

    def test_chains_suite_green_with_expected_failures(self, capsys, tmp_path):
        path = tmp_path / "chains.json"
        assert run_cli("verify", "--suite", "chains", "--json", str(path)) == 0
        capsys.readouterr()
        data = json.loads(path.read_text())
        rows = {row["name"]: row for row in data["results"]}
        disturbed = rows["pointer_disturbing/chain"]
        assert disturbed["status"] == "fail"
        assert disturbed["expected"] == "fail"
        assert disturbed["outcome"] == "pass"
        assert data["summary"]["failed"] == 0

    def test_criteria_suite_green(self, capsys):
        assert run_cli("verify", "--suite", "criteria", "--random", "6") == 0
        capsys.readouterr()

    def test_negative_seed_accepted(self, capsys):
        # seeds are 64-bit values; signed input wraps deterministically
        assert run_cli("verify", "--suite", "chains", "--seed", "-3") == 0
        capsys.readouterr()

    def test_verification_failure_is_1(self, capsys):
        # thresholds below arithmetic noise force genuine failures
        code = run_cli(
            "verify", "--suite", "identities", "--random", "3",
            "--tol", "1e-18", "--fail-threshold", "1e-17",
        )
        assert code == 1
        capsys.readouterr()

    def test_json_deterministic_across_runs(self, capsys, tmp_path):
        path = tmp_path / "chains.json"
        run_cli("verify", "--suite", "chains", "--seed", "3", "--json", str(path))
        first = path.read_bytes()
        run_cli("verify", "--suite", "chains", "--seed", "3", "--json", str(path))
        capsys.readouterr()
        assert path.read_bytes() == first


class TestScenarioCommand:
    def test_list(self, capsys):
        assert run_cli("scenario", "list") == 0
        out = capsys.readouterr().out.split()
        assert "pointer_nondisturbing" in out
        assert len(out) == 5

    def test_run_pass_scenario(self, capsys):
        assert run_cli("scenario", "run", "memory_antenna") == 0
        capsys.readouterr()

    def test_run_fail_scenario_matches_expectation(self, capsys, tmp_path):
        path = tmp_path / "scen.json"
        assert (
            run_cli("scenario", "run", "pointer_disturbing", "--json", str(path)) == 0
        )
        capsys.readouterr()
        data = json.loads(path.read_text())
        assert data["summary"]["failed"] == 0
        statuses = {row["name"]: row["status"] for row in data["results"]}
        assert statuses["pointer_disturbing/transparency"] == "fail"

    def test_unknown_scenario_is_usage_error(self, capsys):
        assert run_cli("scenario", "run", "nope") == 2
        capsys.readouterr()
