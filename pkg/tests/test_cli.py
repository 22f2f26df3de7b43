import json
import subprocess
import sys

from germlab.germfile import corpus_file_path


def run_cli_here(*args, env_extra=None):
    import os

    env = dict(os.environ)
    env.pop("GERMLAB_CACHE_DIR", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "germlab.cli", *args],
        capture_output=True,
        text=True,
        env=env,
    )


class TestInvariantsCommand:
    def test_s1_report(self):
        proc = run_cli_here("invariants", corpus_file_path("s1"), "--seed", "7")
        assert proc.returncode == 0, proc.stdout + proc.stderr
        report = json.loads(proc.stdout)
        assert report["mu_I"] == 1
        assert report["mu_D"] == 1
        assert report["mu_alt"] == [0, 1, 0]

    def test_byte_identical_reruns(self):
        args = ("invariants", corpus_file_path("crosscap"), "--seed", "7")
        first = run_cli_here(*args)
        second = run_cli_here(*args)
        assert first.returncode == second.returncode == 0
        assert first.stdout == second.stdout

    def test_unrelated_seeds_same_values(self):
        a = json.loads(run_cli_here("invariants", corpus_file_path("s2"), "--seed", "5").stdout)
        b = json.loads(
            run_cli_here("invariants", corpus_file_path("s2"), "--seed", "424243").stdout
        )
        keys = ("mu_I", "mu_D", "mu_alt", "mu_I_star", "zero_stable", "d")
        assert all(a[k] == b[k] for k in keys)
        assert a["genericity"]["certified"] and b["genericity"]["certified"]

    def test_cache_on_off_identical(self, tmp_path):
        args = ("invariants", corpus_file_path("s1"), "--seed", "7")
        cached = run_cli_here(*args, env_extra={"GERMLAB_CACHE_DIR": str(tmp_path)})
        warm = run_cli_here(*args, env_extra={"GERMLAB_CACHE_DIR": str(tmp_path)})
        plain = run_cli_here(*args, "--no-cache")
        assert cached.stdout == warm.stdout == plain.stdout
        assert list(tmp_path.glob("*.json")), "cache directory stayed empty"

    def test_json_flag_writes_file(self, tmp_path):
        out = tmp_path / "report.json"
        proc = run_cli_here(
            "invariants", corpus_file_path("cusp_curve"), "--seed", "7", "--json", str(out)
        )
        assert proc.returncode == 0
        assert json.loads(out.read_text()) == json.loads(proc.stdout)


class TestCheckCommand:
    def test_crosscap(self):
        proc = run_cli_here("check", corpus_file_path("crosscap"), "--seed", "7")
        assert proc.returncode == 0
        report = json.loads(proc.stdout)
        assert report["a_finite_at_desk_scale"] is True
        assert report["d"] == 2

    def test_normal_form_violation_exit_1(self, tmp_path):
        bad = tmp_path / "broken.germ"
        bad.write_text(
            json.dumps(
                {
                    "name": "broken",
                    "source_dim": 2,
                    "params": [],
                    "branches": [{"point": "a", "components": ["y", "y^2", "x1*y"]}],
                }
            )
        )
        proc = run_cli_here("check", str(bad))
        assert proc.returncode == 1
        err = json.loads(proc.stdout)["error"]
        assert err["code"] == "NORMAL_FORM_VIOLATION"

    def test_missing_file_exit_1(self):
        proc = run_cli_here("check", "no_such_file.germ")
        assert proc.returncode == 1
        assert json.loads(proc.stdout)["error"]["code"] == "INPUT_ERROR"

    def test_schema_violation_exit_1(self, tmp_path):
        bad = tmp_path / "schema.germ"
        bad.write_text(json.dumps({"name": "x", "branches": []}))
        proc = run_cli_here("check", str(bad))
        assert proc.returncode == 1


class TestSliceCommand:
    def test_slice_emits_a_loadable_germ(self, tmp_path):
        proc = run_cli_here("slice", corpus_file_path("s1"), "--level", "1", "--seed", "7")
        assert proc.returncode == 0
        out = json.loads(proc.stdout)
        assert out["level"] == 1
        germ = out["germ"]
        assert germ["source_dim"] == 1
        sliced_file = tmp_path / "sliced.germ"
        sliced_file.write_text(json.dumps(germ))
        again = run_cli_here("invariants", str(sliced_file), "--seed", "7")
        assert again.returncode == 0
        assert json.loads(again.stdout)["mu_I"] == 1

    def test_level_out_of_range(self):
        proc = run_cli_here("slice", corpus_file_path("s1"), "--level", "5")
        assert proc.returncode == 1


class TestEquisingCommand:
    def test_rescaled_family(self):
        proc = run_cli_here(
            "equising", corpus_file_path("rescaled_s1"), "--samples", "2", "--seed", "7"
        )
        assert proc.returncode == 0
        out = json.loads(proc.stdout)
        assert out["verdict"] == "WHITNEY_EQUISINGULAR"
        assert len(out["members"]) == 3

    def test_germ_without_parameter_rejected(self):
        proc = run_cli_here("equising", corpus_file_path("s1"), "--samples", "2")
        assert proc.returncode == 1


class TestExitCodes:
    def test_mathematical_inconsistency_exits_2(self, capsys, monkeypatch):
        # drive the dispatch path for a consistency failure in-process
        from germlab import cli
        from germlab.errors import HoustonSumViolationError

        def boom(*args, **kwargs):
            raise HoustonSumViolationError("forced for the exit-code contract")

        monkeypatch.setattr(cli, "build_invariant_report", boom)
        status = cli.main(["invariants", corpus_file_path("s1"), "--seed", "7"])
        out = json.loads(capsys.readouterr().out)
        assert status == 2
        assert out["error"]["code"] == "HOUSTON_SUM_VIOLATION"

    def test_inconsistent_report_exits_2(self, capsys, monkeypatch):
        from germlab import cli

        def fake_report(*args, **kwargs):
            return {"consistency": "INCONSISTENT", "failure": {"code": "CHECK_FAILED"}}

        monkeypatch.setattr(cli, "build_invariant_report", fake_report)
        status = cli.main(["invariants", corpus_file_path("s1")])
        assert status == 2
