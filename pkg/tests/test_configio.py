"""Config loading: schema, key-path errors, round trips with the presets."""

from pathlib import Path

import pytest

from coopfuse.configio import ConfigError, dump_scenario, load_scenario, scenario_from_dict
from coopfuse.simulator import (
    constant_velocity_scenario,
    interaction_range_scenario,
    latency_study_scenario,
)

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

MINIMAL = """
scenario:
  duration_s: 2.0
  tick_s: 0.5
  seed: 7
  object_count: 3
agents:
  - {agent_id: 0, ego: true, sensor: {feature_dim: 8}}
"""


class TestLoadScenario:
    def test_minimal(self, tmp_path):
        path = tmp_path / "cfg.yaml"
        path.write_text(MINIMAL)
        cfg = load_scenario(path)
        assert cfg.seed == 7
        assert cfg.object_count == 3
        assert cfg.agents[0].ego

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_scenario(tmp_path / "nope.yaml")

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("scenario: [unclosed")
        with pytest.raises(ConfigError):
            load_scenario(path)

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="scenario.spped"):
            scenario_from_dict({"scenario": {"spped": 1}})

    def test_nested_unknown_key_named(self):
        with pytest.raises(ConfigError, match=r"agents\[0\].sensor.rage"):
            scenario_from_dict(
                {"scenario": {}, "agents": [{"agent_id": 0, "ego": True, "sensor": {"rage": 1}}]}
            )

    def test_bad_value_reports_section(self):
        with pytest.raises(ConfigError, match="channel"):
            scenario_from_dict({"channel": {"drop_prob": 1.5}})

    def test_bad_pair_shape(self):
        with pytest.raises(ConfigError, match="scenario.speed_range"):
            scenario_from_dict({"scenario": {"speed_range": [1, 2, 3]}})

    def test_unknown_aligner(self):
        with pytest.raises(ConfigError, match="feature_aligner"):
            scenario_from_dict(
                {"scenario": {}, "pipeline": {"alignment": {"feature_aligner": "magic"}}}
            )


class TestShippedConfigs:
    @pytest.mark.parametrize(
        "name,factory",
        [
            ("quickstart.yaml", constant_velocity_scenario),
            ("latency_study.yaml", latency_study_scenario),
            ("range_study.yaml", interaction_range_scenario),
        ],
    )
    def test_matches_preset(self, name, factory):
        assert load_scenario(CONFIG_DIR / name) == factory()


class TestRoundTrip:
    def test_dump_then_load_identity(self, tmp_path):
        for factory in (constant_velocity_scenario, latency_study_scenario,
                        interaction_range_scenario):
            cfg = factory(seed=13)
            path = tmp_path / "cfg.yaml"
            dump_scenario(cfg, path)
            assert load_scenario(path) == cfg
