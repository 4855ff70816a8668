"""Command-line interface: convert, train, eval, predict, viz."""

import json
import re
import shutil
import subprocess
import sys

import numpy as np
import pytest
from click.testing import CliRunner
from PIL import Image

from graspgen.cli import PREDICT_SCHEMA, main

ERROR_LINE = re.compile(r"^error category=[a-z-]+ message=.+$", re.MULTILINE)


@pytest.fixture()
def runner():
    return CliRunner()


def error_lines(result):
    return ERROR_LINE.findall(result.stderr)


class TestConvert:
    def test_summary_line(self, runner, raw_dir, tmp_path):
        result = runner.invoke(
            main, ["convert", "--data", str(raw_dir), "--out",
                   str(tmp_path / "cache"), "--shape", "240x320"])
        assert result.exit_code == 0, result.output
        assert "8 scenes, 24 positive, 16 negative" in result.stdout

    def test_rerun_is_idempotent(self, runner, raw_dir, tmp_path):
        out = tmp_path / "cache"
        args = ["convert", "--data", str(raw_dir), "--out", str(out),
                "--shape", "240x320"]
        first = runner.invoke(main, args)
        assert first.exit_code == 0
        before = sorted((p.name, p.read_bytes()) for p in out.rglob("*") if p.is_file())
        second = runner.invoke(main, args)
        assert second.exit_code == 0
        assert second.stdout == first.stdout
        after = sorted((p.name, p.read_bytes()) for p in out.rglob("*") if p.is_file())
        assert after == before

    def test_out_from_environment(self, runner, raw_dir, tmp_path):
        out = tmp_path / "envcache"
        result = runner.invoke(
            main, ["convert", "--data", str(raw_dir), "--shape", "240x320"],
            env={"GRASPGEN_CACHE": str(out)})
        assert result.exit_code == 0, result.output
        assert (out / "index.txt").exists() or any(out.iterdir())

    def test_malformed_shape(self, runner, raw_dir, tmp_path):
        result = runner.invoke(
            main, ["convert", "--data", str(raw_dir), "--out",
                   str(tmp_path / "c"), "--shape", "whatever"])
        assert result.exit_code == 1
        lines = error_lines(result)
        assert len(lines) == 1
        assert "category=invalid-config" in lines[0]
        assert "480x640" in lines[0]

    def test_empty_directory(self, runner, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        result = runner.invoke(
            main, ["convert", "--data", str(empty), "--out", str(tmp_path / "c")])
        assert result.exit_code == 1
        assert "error category=invalid-input message=no scenes found" in result.stderr

    def test_missing_companion_file(self, runner, raw_dir, tmp_path):
        broken = tmp_path / "broken"
        shutil.copytree(raw_dir, broken)
        victim = sorted(broken.rglob("*cpos.txt"))[0]
        victim.unlink()
        result = runner.invoke(
            main, ["convert", "--data", str(broken), "--out",
                   str(tmp_path / "c"), "--shape", "240x320"])
        assert result.exit_code == 1
        assert f"missing {victim}" in result.stderr
        assert "error category=parse-error message=1 missing files" in result.stderr

    def test_parse_error_names_file_and_line(self, runner, raw_dir, tmp_path):
        broken = tmp_path / "badrect"
        shutil.copytree(raw_dir, broken)
        victim = sorted(broken.rglob("*cpos.txt"))[0]
        victim.write_text("1 2\n3 4\n")  # not a multiple of four lines
        result = runner.invoke(
            main, ["convert", "--data", str(broken), "--out",
                   str(tmp_path / "c"), "--shape", "240x320"])
        assert result.exit_code == 1
        (line,) = error_lines(result)
        assert "category=parse-error" in line
        assert victim.name in line


@pytest.fixture(scope="module")
def train_dir(raw_dir, cache_dir, tmp_path_factory):
    """One tiny CLI training run shared by the eval/predict/viz tests."""
    out = tmp_path_factory.mktemp("cli-run")
    result = CliRunner().invoke(
        main,
        ["train", "--data", str(cache_dir), "--out", str(out),
         "--epochs", "1", "--batch-size", "4", "--multiplicity", "1",
         "--out-size", "96", "--test-fraction", "0.25", "--seed", "0"],
    )
    assert result.exit_code == 0, result.output
    return out, result


@pytest.mark.slow
class TestTrain:
    def test_outputs_and_summary(self, train_dir):
        out, result = train_dir
        assert (out / "best.pt").exists()
        assert (out / "last.pt").exists()
        assert (out / "metrics.jsonl").exists()
        assert result.stdout.startswith("config {")
        assert "best val accuracy" in result.stdout

    def test_config_line_is_json(self, train_dir):
        _, result = train_dir
        config_line = result.stdout.splitlines()[0]
        payload = json.loads(config_line[len("config "):])
        assert payload["model"] == "ginnet"
        assert payload["epochs"] == 1

    def test_requires_out(self, runner, cache_dir):
        result = runner.invoke(
            main, ["train", "--data", str(cache_dir), "--epochs", "1"])
        assert result.exit_code == 1
        (line,) = error_lines(result)
        assert "category=invalid-config" in line
        assert "--out" in line

    def test_requires_cache_location(self, runner, tmp_path):
        result = runner.invoke(
            main, ["train", "--out", str(tmp_path)],
            env={"GRASPGEN_CACHE": None})
        assert result.exit_code == 1
        (line,) = error_lines(result)
        assert "category=invalid-config" in line
        assert "GRASPGEN_CACHE" in line


@pytest.mark.slow
class TestEval:
    def test_reports_accuracy(self, runner, cache_dir, train_dir):
        out, _ = train_dir
        result = runner.invoke(
            main, ["eval", "--data", str(cache_dir), "--checkpoint",
                   str(out / "best.pt"), "--test-fraction", "0.25",
                   "--out-size", "96", "--seed", "0"])
        assert result.exit_code == 0, result.output
        assert re.search(r"accuracy \d\.\d{4} over 2 scenes", result.stdout)

    def test_writes_report(self, runner, cache_dir, train_dir, tmp_path):
        out, _ = train_dir
        report_path = tmp_path / "report.jsonl"
        result = runner.invoke(
            main, ["eval", "--data", str(cache_dir), "--checkpoint",
                   str(out / "best.pt"), "--test-fraction", "0.25",
                   "--out-size", "96", "--seed", "0",
                   "--out", str(report_path)])
        assert result.exit_code == 0, result.output
        assert "report written to" in result.stdout
        header = json.loads(report_path.read_text().splitlines()[0])
        assert header["schema"].startswith("graspgen-eval@")
        assert header["model"].startswith("ginnet:")


@pytest.mark.slow
class TestPredict:
    def test_json_lines(self, runner, raw_dir, train_dir, tmp_path):
        out, _ = train_dir
        image = sorted(raw_dir.rglob("*r.png"))[0]
        depth_path = tmp_path / "depth.npy"
        np.save(depth_path, np.full((240, 320), 0.8, dtype=np.float32))
        result = runner.invoke(
            main, ["predict", str(image), "--checkpoint", str(out / "best.pt"),
                   "--depth", str(depth_path), "--k", "2", "--out-size", "96"])
        assert result.exit_code == 0, result.output
        lines = result.stdout.splitlines()
        header = json.loads(lines[0])
        assert header["schema"] == PREDICT_SCHEMA
        assert header["kind"] == "ginnet"
        grasps = [json.loads(line) for line in lines[1:]]
        assert 1 <= len(grasps) <= 2
        for grasp in grasps:
            assert set(grasp) == {"center_row", "center_col", "angle_deg",
                                  "width_px", "quality"}
            assert 0.0 <= grasp["quality"] <= 1.0
            assert -90.0 <= grasp["angle_deg"] < 90.0

    def test_ginnet_needs_depth(self, runner, raw_dir, train_dir):
        out, _ = train_dir
        image = sorted(raw_dir.rglob("*r.png"))[0]
        result = runner.invoke(
            main, ["predict", str(image), "--checkpoint", str(out / "best.pt")])
        assert result.exit_code == 1
        (line,) = error_lines(result)
        assert "category=invalid-input" in line
        assert "--depth" in line


@pytest.mark.slow
class TestViz:
    def scene_id(self, cache_dir):
        from graspgen.dataset import read_cache_index

        return sorted(rec["id"] for rec in read_cache_index(cache_dir))[0]

    def test_ground_truth_panels(self, runner, cache_dir, tmp_path):
        scene = self.scene_id(cache_dir)
        result = runner.invoke(
            main, ["viz", "--data", str(cache_dir), "--scene", scene,
                   "--out", str(tmp_path), "--out-size", "96"])
        assert result.exit_code == 0, result.output
        printed = [line for line in result.stdout.splitlines() if line]
        assert len(printed) == 4
        for line in printed:
            path = tmp_path / line.split("/")[-1]
            assert path.exists()
            assert path.name.startswith(f"{scene}_truth_")

    def test_checkpoint_panels(self, runner, cache_dir, train_dir, tmp_path):
        out, _ = train_dir
        scene = self.scene_id(cache_dir)
        result = runner.invoke(
            main, ["viz", "--data", str(cache_dir), "--scene", scene,
                   "--checkpoint", str(out / "best.pt"),
                   "--out", str(tmp_path), "--out-size", "96"])
        assert result.exit_code == 0, result.output
        names = {line.split("/")[-1] for line in result.stdout.splitlines() if line}
        assert names == {f"{scene}_ginnet_{panel}.png"
                         for panel in ("overlay", "quality", "angle", "width")}

    def test_unknown_scene(self, runner, cache_dir, tmp_path):
        result = runner.invoke(
            main, ["viz", "--data", str(cache_dir), "--scene", "pcd9999",
                   "--out", str(tmp_path)])
        assert result.exit_code == 1
        (line,) = error_lines(result)
        assert "category=invalid-input" in line
        assert "pcd9999" in line


class TestSubprocess:
    def test_module_help(self):
        proc = subprocess.run(
            [sys.executable, "-m", "graspgen.cli", "--help"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        for command in ("convert", "train", "eval", "predict", "viz"):
            assert command in proc.stdout

    def test_console_script_help(self):
        script = shutil.which("graspgen")
        assert script is not None
        proc = subprocess.run([script, "--help"], capture_output=True, text=True)
        assert proc.returncode == 0

    def test_failure_exit_code_and_stderr_contract(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        proc = subprocess.run(
            [sys.executable, "-m", "graspgen.cli", "convert",
             "--data", str(empty), "--out", str(tmp_path / "c")],
            capture_output=True, text=True)
        assert proc.returncode == 1
        assert ERROR_LINE.search(proc.stderr)
