"""CLI contract: exit codes, output files, determinism."""

import json
from pathlib import Path

import numpy as np
import pytest

from coopfuse.cli import EXIT_CONFIG, EXIT_OK, main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"
QUICKSTART = str(CONFIG_DIR / "quickstart.yaml")

TINY = """
scenario:
  duration_s: 2.0
  tick_s: 0.5
  seed: 0
  object_count: 4
  spawn_x: [-10, 10]
  spawn_y: [-10, 10]
  speed_range: [0.5, 1.0]
  min_clearance: 3.0
agents:
  - {agent_id: 0, ego: true, sensor: {feature_dim: 8, max_range: 100, pos_noise_sigma: 0.2, confidence_near: 0.9, confidence_far: 0.9}}
  - {agent_id: 1, x: 15.0, y: 15.0, sensor: {feature_dim: 8, max_range: 100, pos_noise_sigma: 0.2, confidence_near: 0.9, confidence_far: 0.9}}
"""


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text(TINY)
    return str(path)


class TestValidateConfig:
    def test_ok(self, capsys):
        assert main(["validate-config", "--config", QUICKSTART]) == EXIT_OK
        assert "config ok" in capsys.readouterr().out

    def test_missing_file(self, capsys):
        assert main(["validate-config", "--config", "/no/such/file.yaml"]) == EXIT_CONFIG
        assert "config error" in capsys.readouterr().err

    def test_bad_key(self, tmp_path, capsys):
        path = tmp_path / "bad.yaml"
        path.write_text("scenario: {tick_speed: 1}\n")
        assert main(["validate-config", "--config", str(path)]) == EXIT_CONFIG
        assert "tick_speed" in capsys.readouterr().err


class TestRun:
    def test_writes_outputs(self, tiny_config, tmp_path):
        out = tmp_path / "out"
        assert main(["run", "--config", tiny_config, "--out", str(out)]) == EXIT_OK
        assert (out / "metrics.csv").exists()
        assert (out / "events.csv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["seed"] == 0
        assert manifest["command"] == "run"
        assert len(manifest["config_sha256"]) == 64

    def test_deterministic_metrics(self, tiny_config, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["run", "--config", tiny_config, "--out", str(out1)])
        main(["run", "--config", tiny_config, "--out", str(out2)])
        assert (out1 / "metrics.csv").read_bytes() == (out2 / "metrics.csv").read_bytes()
        assert (out1 / "events.csv").read_bytes() == (out2 / "events.csv").read_bytes()

    def test_seed_override_changes_output(self, tiny_config, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["run", "--config", tiny_config, "--out", str(out1)])
        main(["run", "--config", tiny_config, "--seed", "9", "--out", str(out2)])
        manifest = json.loads((out2 / "manifest.json").read_text())
        assert manifest["seed"] == 9
        assert (out1 / "metrics.csv").read_bytes() != (out2 / "metrics.csv").read_bytes()


class TestSweeps:
    def test_rint_single_value(self, tiny_config, tmp_path):
        out = tmp_path / "out"
        code = main(["sweep-rint", "--config", tiny_config, "--out", str(out),
                     "--r-int", "30"])
        assert code == EXIT_OK
        lines = (out / "rint_sweep.csv").read_text().splitlines()
        assert lines[0] == "r_int,ap,amota_like,duplicate_rate"
        assert len(lines) == 2

    def test_parallel_jobs_match_serial(self, tiny_config, tmp_path):
        serial, parallel = tmp_path / "s", tmp_path / "p"
        main(["sweep-rint", "--config", tiny_config, "--out", str(serial),
              "--r-int", "10,30"])
        main(["sweep-rint", "--config", tiny_config, "--out", str(parallel),
              "--r-int", "10,30", "--jobs", "2"])
        assert (serial / "rint_sweep.csv").read_bytes() == (parallel / "rint_sweep.csv").read_bytes()

    def test_latency_rows_both_settings(self, tiny_config, tmp_path):
        out = tmp_path / "out"
        code = main(["sweep-latency", "--config", tiny_config, "--out", str(out),
                     "--latency-ms", "0,100"])
        assert code == EXIT_OK
        lines = (out / "latency_sweep.csv").read_text().splitlines()
        assert lines[0] == "latency_ms,compensated,ap,rmse,coop_prefusion_err"
        assert len(lines) == 5  # two latencies x two compensation settings

    def test_no_compensation_flag(self, tiny_config, tmp_path):
        out = tmp_path / "out"
        main(["sweep-latency", "--config", tiny_config, "--out", str(out),
              "--latency-ms", "0", "--no-compensation"])
        rows = (out / "latency_sweep.csv").read_text().splitlines()[1:]
        assert len(rows) == 1
        assert rows[0].split(",")[1] == "0"


class TestRobustnessAndBandwidth:
    def test_robustness_csv(self, tiny_config, tmp_path):
        out = tmp_path / "out"
        code = main(["robustness", "--config", tiny_config, "--out", str(out),
                     "--alpha", "0,1", "--scenes", "10"])
        assert code == EXIT_OK
        lines = (out / "robustness.csv").read_text().splitlines()
        assert lines[0] == "alpha,mean_accuracy,mean_precision,mean_recall"
        assert len(lines) == 3

    def test_bandwidth_outputs(self, tiny_config, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["bench-bandwidth", "--config", tiny_config, "--out", str(out)]) == EXIT_OK
        band = (out / "bandwidth.csv").read_text().splitlines()
        assert band[0] == "k,bytes_per_packet,bps_sparse"
        assert len(band) == 51
        bev = (out / "bev_comparison.csv").read_text().splitlines()
        assert len(bev) == 3
        assert "B/s" in capsys.readouterr().out

    def test_bandwidth_affine_in_k(self, tiny_config, tmp_path):
        out = tmp_path / "out"
        main(["bench-bandwidth", "--config", tiny_config, "--out", str(out)])
        rows = [line.split(",") for line in (out / "bandwidth.csv").read_text().splitlines()[1:]]
        k = np.array([float(r[0]) for r in rows])
        bps = np.array([float(r[2]) for r in rows])
        slope, intercept = np.polyfit(k, bps, 1)
        residuals = bps - (slope * k + intercept)
        assert np.max(np.abs(residuals)) < 1e-6
