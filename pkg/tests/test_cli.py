from __future__ import annotations

import json
import os

import pytest

from toolgym.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def generated_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("bundles")
    code = main(["generate", "--scenario", "multi_hop", "--count", "5", "--seed", "7", "--out", str(out)])
    assert code == 0
    return out


class TestGenerate:
    def test_writes_requested_count(self, generated_dir):
        files = [f for f in os.listdir(generated_dir) if f.endswith(".json")]
        assert len(files) == 5

    def test_all_scenarios(self, tmp_path, capsys):
        code, out, _ = run_cli(capsys, "generate", "--scenario", "all", "--count", "1", "--seed", "1", "--out", str(tmp_path))
        assert code == 0
        assert "wrote 4 bundle(s)" in out

    def test_distractor_override(self, tmp_path, capsys):
        code, _, _ = run_cli(capsys, "generate", "--scenario", "single_hop", "--count", "1",
                             "--seed", "3", "--out", str(tmp_path), "--distractors", "2")
        assert code == 0
        path = os.path.join(tmp_path, os.listdir(tmp_path)[0])
        with open(path) as fh:
            data = json.load(fh)
        assert len(data["distractors"]) == 2


class TestValidate:
    def test_valid_directory(self, generated_dir, capsys):
        code, out, _ = run_cli(capsys, "validate", str(generated_dir))
        assert code == 0
        assert out.count("OK") == 5

    def test_corrupted_file_named_and_exit_1(self, generated_dir, tmp_path, capsys):
        bad = tmp_path / "broken.json"
        bad.write_text("{not json", encoding="utf-8")
        good = os.path.join(str(generated_dir), sorted(os.listdir(generated_dir))[0])
        code, out, _ = run_cli(capsys, "validate", good, str(bad))
        assert code == 1
        assert "broken.json" in out
        assert "FAIL" in out

    def test_semantically_invalid_bundle(self, generated_dir, tmp_path, capsys):
        src = os.path.join(str(generated_dir), sorted(os.listdir(generated_dir))[0])
        with open(src) as fh:
            data = json.load(fh)
        data["scenario"] = "single_hop"  # lies about the DAG shape
        bad = tmp_path / "mismatch.json"
        bad.write_text(json.dumps(data), encoding="utf-8")
        code, out, _ = run_cli(capsys, "validate", str(bad))
        assert code == 1
        assert "SCENARIO_MISMATCH" in out


class TestRunEpisode:
    def test_oracle_prints_perfect_f1(self, generated_dir, capsys):
        env = os.path.join(str(generated_dir), sorted(os.listdir(generated_dir))[0])
        code, out, _ = run_cli(capsys, "run-episode", "--env", env, "--agent", "oracle")
        assert code == 0
        assert "solve_f1: 1.0" in out
        assert "outcome: answered" in out

    def test_save_trajectory(self, generated_dir, tmp_path, capsys):
        env = os.path.join(str(generated_dir), sorted(os.listdir(generated_dir))[0])
        rollout = tmp_path / "epoch-0.jsonl"
        code, out, _ = run_cli(capsys, "run-episode", "--env", env, "--agent", "guesser", "--save", str(rollout))
        assert code == 0
        assert rollout.exists()
        record = json.loads(rollout.read_text().splitlines()[0])
        assert record["outcome"] == "answered"


class TestScore:
    @pytest.fixture()
    def rollout_file(self, generated_dir, tmp_path):
        rollout = tmp_path / "rollout.jsonl"
        for name in sorted(os.listdir(generated_dir))[:2]:
            env = os.path.join(str(generated_dir), name)
            assert main(["run-episode", "--env", env, "--agent", "oracle", "--save", str(rollout)]) == 0
        return rollout

    def test_solve_report(self, rollout_file, capsys):
        code, out, _ = run_cli(capsys, "score", "--trajectories", str(rollout_file), "--metric", "solve")
        assert code == 0
        report = json.loads(out)
        assert report["count"] == 2
        assert report["averages"]["solve_f1"] == 1.0

    def test_ac_report(self, rollout_file, capsys):
        code, out, _ = run_cli(capsys, "score", "--trajectories", str(rollout_file), "--metric", "ac")
        report = json.loads(out)
        assert code == 0
        assert report["averages"]["answer_correct"] == 1.0

    def test_pass1_report(self, rollout_file, capsys):
        code, out, _ = run_cli(capsys, "score", "--trajectories", str(rollout_file), "--metric", "pass1")
        report = json.loads(out)
        assert report["averages"]["pass_hat_1"] == 1.0

    def test_tspicf_needs_bundles(self, rollout_file, capsys):
        code, _, err = run_cli(capsys, "score", "--trajectories", str(rollout_file), "--metric", "tspicf")
        assert code == 2

    def test_tspicf_report(self, rollout_file, generated_dir, capsys):
        code, out, _ = run_cli(capsys, "score", "--trajectories", str(rollout_file),
                               "--metric", "tspicf", "--bundles", str(generated_dir))
        assert code == 0
        report = json.loads(out)
        assert report["averages"]["ts"] == 1.0
        assert report["averages"]["cf"] == 1.0

    def test_report_dir_renders_csv_and_figure(self, rollout_file, tmp_path, capsys):
        report_dir = tmp_path / "report"
        code, _, err = run_cli(capsys, "score", "--trajectories", str(rollout_file),
                               "--metric", "solve", "--report-dir", str(report_dir))
        assert code == 0
        names = sorted(os.listdir(report_dir))
        assert names == ["solve_report.csv", "solve_report.json", "solve_report.png"]
        csv_text = (report_dir / "solve_report.csv").read_text()
        assert csv_text.splitlines()[0] == "env_id,p,q,n,solve_p,solve_r,solve_f1"


class TestExport:
    def test_export_epoch(self, generated_dir, tmp_path, capsys):
        rollouts = tmp_path / "rollouts"
        rollouts.mkdir()
        env = os.path.join(str(generated_dir), sorted(os.listdir(generated_dir))[0])
        assert main(["run-episode", "--env", env, "--agent", "oracle", "--epoch", "2",
                     "--save", str(rollouts / "epoch-2.jsonl")]) == 0
        out_file = tmp_path / "exported.jsonl"
        code, _, err = run_cli(capsys, "export", "--epoch", "2", "--rollouts", str(rollouts),
                               "--out", str(out_file))
        assert code == 0
        assert len(out_file.read_text().splitlines()) == 1


class TestUsage:
    def test_usage_error_exit_2(self):
        with pytest.raises(SystemExit) as err:
            main(["generate", "--scenario", "bogus", "--out", "x"])
        assert err.value.code == 2

    def test_missing_subcommand_exit_2(self):
        with pytest.raises(SystemExit) as err:
            main([])
        assert err.value.code == 2
