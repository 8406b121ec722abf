"""End-to-end tests of the pprl command line"""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from src.cli.main import EXIT_CONFIG, EXIT_RUNTIME, cli
from src.envs import synthetic_shape
from src.errors import InvalidArgumentError
from src.export import write_point_cloud
from src.models.cloud import PointCloud
from src.orchestrator import BenchRow, benchmark_kernel, rows_to_csv

TINY_RUN = """\
seed: 1
total_steps: 6
eval_interval: 6
eval_episodes: 1
env:
  horizon: 4
  floor_points: 30
  cluster_points: 10
encoder:
  num_centroids: 6
  patch_size: 4
  embed_dim: 12
  num_layers: 1
  decoder_layers: 1
  num_heads: 2
  mlp_ratio: 2
agent:
  batch_size: 2
  hidden_width: 16
  num_layers: 2
  learning_starts: 3
  precision: float64
"""


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def run_config(tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text(TINY_RUN, encoding="utf-8")
    return path


class TestTrainCommand:
    def test_train(self, runner, run_config, tmp_path):
        out = tmp_path / "run"
        result = runner.invoke(cli, ["train", "--config", str(run_config), "--output", str(out)])
        assert result.exit_code == 0, result.output
        assert (out / "metrics.csv").exists()
        assert json.loads((out / "summary.json").read_text())["steps"] == 6

    def test_config_error_exit_code(self, runner, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text(TINY_RUN.replace("horizon: 4", "horizn: 4"), encoding="utf-8")
        result = runner.invoke(cli, ["train", "--config", str(path)])
        assert result.exit_code == EXIT_CONFIG
        assert "env.horizn" in result.output

    def test_resume_from_other_config(self, runner, run_config, tmp_path):
        out = tmp_path / "run"
        assert runner.invoke(cli, ["train", "--config", str(run_config), "--output", str(out)]).exit_code == 0
        other = tmp_path / "other.yaml"
        other.write_text(TINY_RUN.replace("seed: 1", "seed: 2"), encoding="utf-8")
        result = runner.invoke(cli, [
            "train", "--config", str(other), "--output", str(tmp_path / "other"),
            "--resume", str(out / "checkpoints" / "latest.ckpt")
        ])
        assert result.exit_code == EXIT_RUNTIME

    def test_trained_run_evaluates(self, runner, run_config, tmp_path):
        out = tmp_path / "run"
        runner.invoke(cli, ["train", "--config", str(run_config), "--output", str(out)])
        result = runner.invoke(cli, ["eval", "--checkpoint", str(out / "checkpoints" / "latest.ckpt"), "--episodes", "2"])
        assert result.exit_code == 0, result.output
        assert "Success rate" in result.output


class TestEvalCommand:
    def test_scripted_stub(self, runner, tmp_path):
        stub = tmp_path / "oracle.ckpt"
        assert runner.invoke(cli, ["stub", "--out", str(stub)]).exit_code == 0
        report = tmp_path / "eval.json"
        result = runner.invoke(cli, ["eval", "--checkpoint", str(stub), "--episodes", "5", "--json", str(report)])
        assert result.exit_code == 0, result.output
        data = json.loads(report.read_text())
        assert data["success_rate"] == 1.0
        assert data["success_ci"] == [1.0, 1.0]
        assert len(data["outcomes"]) == 5

    def test_zero_episodes(self, runner, tmp_path):
        stub = tmp_path / "random.ckpt"
        runner.invoke(cli, ["stub", "--out", str(stub), "--policy", "random"])
        result = runner.invoke(cli, ["eval", "--checkpoint", str(stub), "--episodes", "0"])
        assert result.exit_code == EXIT_RUNTIME

    def test_corrupt_checkpoint(self, runner, tmp_path):
        path = tmp_path / "broken.ckpt"
        path.write_bytes(b"not a checkpoint")
        result = runner.invoke(cli, ["eval", "--checkpoint", str(path), "--episodes", "1"])
        assert result.exit_code == EXIT_RUNTIME


class TestReconstructCommand:
    @pytest.fixture
    def encoder_checkpoint(self, runner, run_config, tmp_path):
        out = tmp_path / "encoder.ckpt"
        result = runner.invoke(cli, [
            "pretrain-aux", "--config", str(run_config), "--shapes", "2", "--steps", "2", "--points", "64",
            "--out", str(out)
        ])
        assert result.exit_code == 0, result.output
        return out

    def test_reconstruct(self, runner, encoder_checkpoint, tmp_path):
        cloud = write_point_cloud(tmp_path / "box.xyz", synthetic_shape("box", 80, 0))
        out = tmp_path / "recon"
        result = runner.invoke(cli, [
            "reconstruct", "--checkpoint", str(encoder_checkpoint), "--cloud", str(cloud), "--out", str(out)
        ])
        assert result.exit_code == 0, result.output
        report = json.loads((out / "report.json").read_text())
        assert report["num_patches"] == 6
        assert len(report["chamfer"]) == 6
        assert (out / "predicted.xyz").exists()
        assert (out / "patches" / "truth_005.xyz").exists()

    def test_feature_width_mismatch(self, runner, encoder_checkpoint, tmp_path):
        colored = PointCloud(np.zeros((20, 3)) + np.arange(20)[:, None] * 0.01, np.full((20, 3), 0.5))
        cloud = write_point_cloud(tmp_path / "colored.xyz", colored)
        result = runner.invoke(cli, [
            "reconstruct", "--checkpoint", str(encoder_checkpoint), "--cloud", str(cloud), "--out", str(tmp_path / "r")
        ])
        assert result.exit_code == EXIT_RUNTIME

    def test_malformed_cloud(self, runner, encoder_checkpoint, tmp_path):
        cloud = tmp_path / "bad.xyz"
        cloud.write_text("0 0 0\n1 2\n", encoding="utf-8")
        result = runner.invoke(cli, [
            "reconstruct", "--checkpoint", str(encoder_checkpoint), "--cloud", str(cloud), "--out", str(tmp_path / "r")
        ])
        assert result.exit_code == EXIT_RUNTIME


class TestBenchCommand:
    def test_writes_csv(self, runner, tmp_path):
        out = tmp_path / "bench.csv"
        result = runner.invoke(cli, ["bench", "--kernel", "morton", "--sizes", "8,16", "--out", str(out)])
        assert result.exit_code == 0, result.output
        lines = out.read_text().splitlines()
        assert lines[0] == "kernel,size,repeats,median_seconds,min_seconds,max_seconds"
        assert [line.split(",")[1] for line in lines[1:]] == ["8", "16"]

    @pytest.mark.parametrize("args", [
        ["--kernel", "morton", "--sizes", "0"],
        ["--kernel", "morton", "--sizes", ""],
        ["--kernel", "sort", "--sizes", "8"],
    ])
    def test_bad_arguments(self, runner, args):
        assert runner.invoke(cli, ["bench", *args]).exit_code == 2


class TestBenchmarkKernel:
    @pytest.mark.parametrize("kernel", ["fps", "knn", "morton", "chamfer", "voxel"])
    def test_every_kernel_runs(self, kernel):
        rows = benchmark_kernel(kernel, [32], repeats=2)
        assert rows[0].kernel == kernel
        assert rows[0].min_seconds <= rows[0].median_seconds <= rows[0].max_seconds

    @pytest.mark.parametrize("kernel,sizes,repeats", [
        ("nope", [8], 1),
        ("fps", [], 1),
        ("fps", [0], 1),
        ("fps", [8], 0),
    ])
    def test_rejected(self, kernel, sizes, repeats):
        with pytest.raises(InvalidArgumentError):
            benchmark_kernel(kernel, sizes, repeats=repeats)

    def test_rows_to_csv(self):
        text = rows_to_csv([BenchRow("fps", 8, 7, 0.5, 0.25, 1.0)])
        assert text.splitlines()[1] == "fps,8,7,0.5,0.25,1.0"


def test_export_trace(runner, run_config, tmp_path):
    out = tmp_path / "trace"
    result = runner.invoke(cli, ["export-trace", "--config", str(run_config), "--episodes", "2", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert (out / "episode_001" / "step_000.xyz").exists()
