"""Scenario configuration files: YAML in, validated dataclasses out.

The schema mirrors the config dataclasses section by section. Unknown or
ill-typed keys fail with the full key path in the message, so a config
error is always attributable to one line of the file.
"""

from __future__ import annotations

from dataclasses import asdict
from pathlib import Path
from typing import Any

import yaml

from .alignment import AlignmentConfig, FeatureAligner
from .association import MatchWeights, RoiSpec
from .fusion import FusionConfig
from .robustness import TransformNoiseParams
from .simulator import (
    AgentSpec,
    ChannelModel,
    PipelineConfig,
    ScenarioConfig,
    SensorModel,
)


class ConfigError(ValueError):
    """A configuration file problem, with the offending key in the message."""


def _require_mapping(value: Any, path: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(value).__name__}")
    return dict(value)


def _pair(value: Any, path: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{path}: expected a [low, high] pair")
    return float(value[0]), float(value[1])


def _build(cls, data: dict, path: str):
    known = set(cls.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}: unknown key")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _build_agent(data: Any, path: str) -> AgentSpec:
    data = _require_mapping(data, path)
    if "sensor" in data:
        data["sensor"] = _build(
            SensorModel, _require_mapping(data["sensor"], f"{path}.sensor"), f"{path}.sensor"
        )
    return _build(AgentSpec, data, path)


def _build_pipeline(data: Any, path: str) -> PipelineConfig:
    data = _require_mapping(data, path)
    nested = {
        "roi": RoiSpec,
        "weights": MatchWeights,
        "fusion": FusionConfig,
    }
    for key, cls in nested.items():
        if key in data:
            data[key] = _build(
                cls, _require_mapping(data[key], f"{path}.{key}"), f"{path}.{key}"
            )
    if "alignment" in data:
        align = _require_mapping(data["alignment"], f"{path}.alignment")
        if "feature_aligner" in align:
            name = str(align["feature_aligner"])
            try:
                align["feature_aligner"] = FeatureAligner(name)
            except ValueError:
                raise ConfigError(
                    f"{path}.alignment.feature_aligner: unknown aligner {name!r}"
                ) from None
        data["alignment"] = _build(AlignmentConfig, align, f"{path}.alignment")
    return _build(PipelineConfig, data, path)


def scenario_from_dict(raw: dict) -> ScenarioConfig:
    """Assemble a ScenarioConfig from a parsed YAML mapping."""
    raw = _require_mapping(raw, "config")
    unknown = set(raw) - {"scenario", "agents", "channel", "pipeline", "pose_noise"}
    if unknown:
        raise ConfigError(f"config.{sorted(unknown)[0]}: unknown key")

    fields = _require_mapping(raw.get("scenario", {}), "scenario")
    for key in ("spawn_x", "spawn_y", "spawn_z", "speed_range", "yaw_rate_range"):
        if key in fields:
            fields[key] = _pair(fields[key], f"scenario.{key}")

    agents_raw = raw.get("agents", [])
    if not isinstance(agents_raw, list):
        raise ConfigError("agents: expected a list of agent mappings")
    fields["agents"] = tuple(
        _build_agent(a, f"agents[{i}]") for i, a in enumerate(agents_raw)
    )
    fields["channel"] = _build(
        ChannelModel, _require_mapping(raw.get("channel", {}), "channel"), "channel"
    )
    fields["pipeline"] = _build_pipeline(raw.get("pipeline", {}), "pipeline")
    if raw.get("pose_noise") is not None:
        fields["pose_noise"] = _build(
            TransformNoiseParams, _require_mapping(raw["pose_noise"], "pose_noise"), "pose_noise"
        )
    return _build(ScenarioConfig, fields, "scenario")


def load_scenario(path) -> ScenarioConfig:
    """Load and validate a scenario YAML file.

    Raises:
        ConfigError: naming the missing file or offending key.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with path.open() as fh:
            raw = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc})") from exc
    if raw is None:
        raise ConfigError(f"{path}: empty config")
    return scenario_from_dict(raw)


def scenario_to_dict(cfg: ScenarioConfig) -> dict:
    """The YAML-ready mapping for a scenario (inverse of scenario_from_dict)."""
    scenario = {
        "duration_s": cfg.duration_s,
        "tick_s": cfg.tick_s,
        "seed": cfg.seed,
        "object_count": cfg.object_count,
        "spawn_x": list(cfg.spawn_x),
        "spawn_y": list(cfg.spawn_y),
        "spawn_z": list(cfg.spawn_z),
        "speed_range": list(cfg.speed_range),
        "yaw_rate_range": list(cfg.yaw_rate_range),
        "class_count": cfg.class_count,
        "min_clearance": cfg.min_clearance,
    }
    agents = [
        {
            "agent_id": a.agent_id,
            "x": a.x, "y": a.y, "z": a.z,
            "yaw_deg": a.yaw_deg, "vx": a.vx, "vy": a.vy,
            "ego": a.ego,
            "sensor": asdict(a.sensor),
        }
        for a in cfg.agents
    ]
    pipeline = {
        "r_int": cfg.pipeline.r_int,
        "compensate_latency": cfg.pipeline.compensate_latency,
        "transmit_top_k": cfg.pipeline.transmit_top_k,
        "transmit_confidence_min": cfg.pipeline.transmit_confidence_min,
        "roi": asdict(cfg.pipeline.roi),
        "weights": asdict(cfg.pipeline.weights),
        "fusion": asdict(cfg.pipeline.fusion),
        "alignment": {
            "feature_aligner": cfg.pipeline.alignment.feature_aligner.value,
            "max_compensation_horizon": cfg.pipeline.alignment.max_compensation_horizon,
        },
    }
    out = {
        "scenario": scenario,
        "agents": agents,
        "channel": asdict(cfg.channel),
        "pipeline": pipeline,
    }
    if cfg.pose_noise is not None:
        out["pose_noise"] = asdict(cfg.pose_noise)
    return out


def dump_scenario(cfg: ScenarioConfig, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        yaml.safe_dump(scenario_to_dict(cfg), fh, sort_keys=False)
