"""Synthetic multi-agent scenarios over a lossy, latent channel.

A world of constant-velocity (optionally constant-yaw-rate) objects is
observed by agents with parametric sensors. Remote agents serialize their
top detections into packets that cross a channel with latency, jitter, and
loss; the ego agent aligns, associates, fuses, and tracks. The event loop
is single-threaded and fully determined by the scenario seed.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .alignment import (
    AlignmentConfig,
    HorizonExceeded,
    align_instance,
    transform_state,
)
from .association import MatchWeights, RoiSpec, associate, filter_roi
from .core import (
    AgentPose,
    GroundTruthObject,
    Instance,
    RigidTransform,
    StateVector,
    Timestamp,
    invert,
    seconds_to_micros,
)
from .fusion import FusionConfig, TrackIdRegistry, TrackSet, assemble_output, coarse_fuse, refine_tracks
from .robustness import TransformNoiseParams, noisy_feature, perturb_transform
from .wire import InstancePacket, decode_packet, encode_packet

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# World


@dataclass(frozen=True)
class WorldObject:
    object_id: int
    class_id: int
    state: StateVector
    yaw_rate: float = 0.0  # rad/s


@dataclass(frozen=True)
class World:
    time_us: Timestamp
    objects: tuple[WorldObject, ...]


def step_world(world: World, dt: float) -> World:
    """Advance every object by ``dt`` seconds.

    Zero yaw rate means straight constant-velocity motion. A non-zero yaw
    rate turns the heading at that rate and keeps the speed along the
    heading, tracing the exact circular arc.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    advanced = []
    for obj in world.objects:
        s = obj.state
        if abs(obj.yaw_rate) < 1e-12:
            state = replace(
                s, x=s.x + s.vx * dt, y=s.y + s.vy * dt, z=s.z + s.vz * dt
            )
        else:
            speed = s.speed
            theta0 = s.yaw
            theta1 = theta0 + obj.yaw_rate * dt
            radius = speed / obj.yaw_rate
            state = replace(
                s,
                x=s.x + radius * (math.sin(theta1) - math.sin(theta0)),
                y=s.y - radius * (math.cos(theta1) - math.cos(theta0)),
                z=s.z + s.vz * dt,
                sin_yaw=math.sin(theta1),
                cos_yaw=math.cos(theta1),
                vx=speed * math.cos(theta1),
                vy=speed * math.sin(theta1),
            )
        advanced.append(replace(obj, state=state))
    return World(time_us=world.time_us + seconds_to_micros(dt), objects=tuple(advanced))


# ---------------------------------------------------------------------------
# Sensing


@dataclass(frozen=True)
class SensorModel:
    """Parametric detector: range/FoV gate, range-dependent quality.

    Planar position noise grows from ``pos_noise_sigma`` at zero range to
    ``pos_noise_far_factor`` times that at ``max_range``, following
    ``(r / max_range) ** pos_noise_range_power`` (power > 1 models
    camera-like depth degradation). Height stays at the near sigma: ground
    objects get their z from the ground plane, not from range.
    """

    max_range: float = 80.0
    fov_deg: float = 360.0
    detect_prob_near: float = 1.0
    detect_prob_far: float = 1.0
    pos_noise_sigma: float = 0.0
    pos_noise_far_factor: float = 1.0  # sigma multiplier reached at max_range
    pos_noise_range_power: float = 1.0
    vel_noise_sigma: float = 0.0
    dim_noise_sigma: float = 0.0
    feature_noise_sigma: float = 0.0
    confidence_near: float = 0.95
    confidence_far: float = 0.5
    feature_dim: int = 256
    track_gate: float = 4.0  # NN continuation radius, meters

    def __post_init__(self) -> None:
        if self.max_range <= 0:
            raise ValueError("max_range must be positive")
        for name in ("detect_prob_near", "detect_prob_far", "confidence_near", "confidence_far"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.feature_dim < 1:
            raise ValueError("feature_dim must be at least 1")
        if self.pos_noise_range_power <= 0:
            raise ValueError("pos_noise_range_power must be positive")

    def _mix(self, near: float, far: float, r: float, power: float = 1.0) -> float:
        frac = min(r / self.max_range, 1.0) ** power
        return near + (far - near) * frac


@dataclass(frozen=True)
class AgentSpec:
    """An agent's identity, linear pose trajectory, and sensor."""

    agent_id: int
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    yaw_deg: float = 0.0
    vx: float = 0.0
    vy: float = 0.0
    ego: bool = False
    sensor: SensorModel = field(default_factory=SensorModel)

    def pose_at(self, t: Timestamp) -> AgentPose:
        t_s = t / 1e6
        pose = RigidTransform.from_yaw(
            math.radians(self.yaw_deg),
            (self.x + self.vx * t_s, self.y + self.vy * t_s, self.z),
        )
        return AgentPose(agent_id=self.agent_id, stamped_at=t, pose=pose)


class _TrackedDetection(NamedTuple):
    track_id: int
    class_id: int
    position: np.ndarray  # global frame
    velocity: np.ndarray


class Agent:
    """Runtime sensing state: spec plus the persistent track continuation."""

    def __init__(self, spec: AgentSpec, rng: np.random.Generator) -> None:
        self.spec = spec
        self.rng = rng
        self._prev: list[_TrackedDetection] = []
        self._prev_t: Optional[Timestamp] = None
        self._next_track_id = 1


def sense(agent: Agent, world: World, rng: np.random.Generator) -> list[Instance]:
    """One sensing pass: detect, noise, and continue track identities.

    Detections are produced in the agent frame. Persistent per-agent track
    IDs come from nearest-neighbor continuation against the previous pass,
    predicted forward by the stored velocity.
    """
    spec = agent.spec
    sensor = spec.sensor
    t = world.time_us
    pose = spec.pose_at(t)
    to_agent = invert(pose.pose)
    half_fov = math.radians(sensor.fov_deg) / 2.0

    raw: list[tuple[Instance, np.ndarray, np.ndarray]] = []
    for obj in world.objects:
        local = transform_state(obj.state, to_agent)
        r = math.hypot(local.x, local.y)
        if r > sensor.max_range:
            continue
        if sensor.fov_deg < 360.0 and abs(math.atan2(local.y, local.x)) > half_fov:
            continue
        if rng.random() >= sensor._mix(sensor.detect_prob_near, sensor.detect_prob_far, r):
            continue
        sigma = sensor.pos_noise_sigma * sensor._mix(
            1.0, sensor.pos_noise_far_factor, r, sensor.pos_noise_range_power
        )
        pos = local.position
        if sensor.pos_noise_sigma > 0:
            planar = rng.normal(0.0, sigma, 2)
            height = rng.normal(0.0, sensor.pos_noise_sigma)
            pos = pos + np.array([planar[0], planar[1], height])
        dims = np.array([local.l, local.w, local.h])
        if sensor.dim_noise_sigma > 0:
            dims = np.maximum(dims + rng.normal(0.0, sensor.dim_noise_sigma, 3), 0.01)
        vel = local.velocity
        if sensor.vel_noise_sigma > 0:
            vel = vel + rng.normal(0.0, sensor.vel_noise_sigma, 3)
        confidence = min(max(sensor._mix(sensor.confidence_near, sensor.confidence_far, r), 0.0), 1.0)
        state = StateVector(
            x=float(pos[0]), y=float(pos[1]), z=float(pos[2]),
            l=float(dims[0]), w=float(dims[1]), h=float(dims[2]),
            sin_yaw=local.sin_yaw, cos_yaw=local.cos_yaw,
            vx=float(vel[0]), vy=float(vel[1]), vz=float(vel[2]),
        )
        inst = Instance(
            state=state,
            feature=noisy_feature(obj.object_id, sensor.feature_dim, sensor.feature_noise_sigma, rng),
            confidence=confidence,
            class_id=obj.class_id,
            track_id=None,  # assigned by continuation below
            source_agent=spec.agent_id,
            observed_at=t,
        )
        global_state = transform_state(state, pose.pose)
        raw.append((inst, global_state.position, global_state.velocity))

    dt = 0.0 if agent._prev_t is None else (t - agent._prev_t) / 1e6
    predicted = [
        (trk, trk.position + trk.velocity * dt) for trk in agent._prev
    ]
    available = set(range(len(predicted)))
    out: list[Instance] = []
    continued: list[_TrackedDetection] = []
    for inst, gpos, gvel in raw:
        best_k, best_d = None, sensor.track_gate
        for k in available:
            trk, ppos = predicted[k]
            if trk.class_id != inst.class_id:
                continue
            d = math.hypot(gpos[0] - ppos[0], gpos[1] - ppos[1])
            if d <= best_d:
                best_k, best_d = k, d
        if best_k is not None:
            available.discard(best_k)
            tid = predicted[best_k][0].track_id
        else:
            tid = agent._next_track_id
            agent._next_track_id += 1
        out.append(replace(inst, track_id=tid))
        continued.append(_TrackedDetection(tid, inst.class_id, gpos, gvel))
    agent._prev = continued
    agent._prev_t = t
    return out


# ---------------------------------------------------------------------------
# Channel


@dataclass(frozen=True)
class ChannelModel:
    """One-way channel: fixed latency plus uniform jitter, Bernoulli loss.

    ``accounting_window_s`` sets the tumbling-window length for burst-rate
    byte accounting (see RunResult.peak_bps_sent); 0 means whole-run
    averages only.
    """

    latency_ms: float = 0.0
    jitter_ms: float = 0.0
    drop_prob: float = 0.0
    accounting_window_s: float = 0.0

    def __post_init__(self) -> None:
        if self.latency_ms < 0 or self.jitter_ms < 0:
            raise ValueError("latency and jitter must be non-negative")
        if not 0.0 <= self.drop_prob <= 1.0:
            raise ValueError("drop_prob must lie in [0, 1]")
        if self.accounting_window_s < 0:
            raise ValueError("accounting_window_s must be non-negative")


def transmit(
    packet_bytes: bytes,
    channel: ChannelModel,
    rng: np.random.Generator,
    t_send: Timestamp,
) -> Optional[tuple[Timestamp, bytes]]:
    """Send bytes through the channel; None means the packet was lost.

    Senders account for the bytes regardless of loss: the cost is incurred
    at transmission, not delivery.
    """
    if rng.random() < channel.drop_prob:
        return None
    latency_s = channel.latency_ms / 1e3
    if channel.jitter_ms > 0:
        latency_s += rng.uniform(0.0, channel.jitter_ms) / 1e3
    return t_send + seconds_to_micros(latency_s), packet_bytes


def bev_baseline_cost(
    range_m: float, cell_m: float, channels: int, bytes_per_elem: int, rate_hz: float
) -> float:
    """Bytes/second for shipping a dense top-down grid of the same coverage.

    A square grid of side 2 * range / cell holds the scene; the cost is
    quadratic in range, which is the scaling the sparse format avoids.
    """
    if range_m <= 0 or cell_m <= 0 or bytes_per_elem < 0 or rate_hz < 0 or channels < 0:
        raise ValueError("grid parameters must be positive (counts non-negative)")
    side = 2.0 * range_m / cell_m
    return side * side * channels * bytes_per_elem * rate_hz


# ---------------------------------------------------------------------------
# Scenario configuration


@dataclass(frozen=True)
class PipelineConfig:
    """Everything the ego does with instances once they exist."""

    roi: RoiSpec = field(default_factory=RoiSpec)
    r_int: float = 30.0
    weights: MatchWeights = field(default_factory=MatchWeights)
    fusion: FusionConfig = field(default_factory=FusionConfig)
    alignment: AlignmentConfig = field(default_factory=AlignmentConfig)
    compensate_latency: bool = True
    transmit_top_k: int = 15
    transmit_confidence_min: float = 0.3

    def __post_init__(self) -> None:
        if self.r_int <= 0:
            raise ValueError("r_int must be positive")
        if self.transmit_top_k < 1:
            raise ValueError("transmit_top_k must be at least 1")
        if not 0.0 <= self.transmit_confidence_min <= 1.0:
            raise ValueError("transmit_confidence_min must lie in [0, 1]")


@dataclass(frozen=True)
class ScenarioConfig:
    """A complete, seeded scenario: world, agents, channel, pipeline."""

    duration_s: float = 10.0
    tick_s: float = 0.5
    seed: int = 0
    object_count: int = 12
    spawn_x: tuple[float, float] = (-40.0, 40.0)
    spawn_y: tuple[float, float] = (-40.0, 40.0)
    spawn_z: tuple[float, float] = (0.0, 0.0)
    speed_range: tuple[float, float] = (5.0, 10.0)
    yaw_rate_range: tuple[float, float] = (0.0, 0.0)
    class_count: int = 2
    min_clearance: float = 4.0  # kept over the whole run; 0 disables
    agents: tuple[AgentSpec, ...] = ()
    channel: ChannelModel = field(default_factory=ChannelModel)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    pose_noise: Optional[TransformNoiseParams] = None  # sender localization error

    def __post_init__(self) -> None:
        if self.tick_s <= 0:
            raise ValueError("tick_s must be positive")
        if self.duration_s < self.tick_s:
            raise ValueError("duration_s must be at least one tick")
        if self.speed_range[0] < 0 or self.speed_range[1] < self.speed_range[0]:
            raise ValueError("speed_range must be non-negative and ordered")
        if self.object_count < 1:
            raise ValueError("object_count must be at least 1")
        egos = [a for a in self.agents if a.ego]
        if self.agents and len(egos) != 1:
            raise ValueError("exactly one agent must be marked ego")
        dims = {a.sensor.feature_dim for a in self.agents}
        if len(dims) > 1:
            raise ValueError("all agents must share one feature_dim")

    @property
    def frame_count(self) -> int:
        return max(1, round(self.duration_s / self.tick_s))

    @property
    def ego_spec(self) -> AgentSpec:
        for a in self.agents:
            if a.ego:
                return a
        raise ValueError("scenario has no ego agent")


def _min_separation_over_run(
    a_pos: np.ndarray, a_vel: np.ndarray, b_pos: np.ndarray, b_vel: np.ndarray, duration: float
) -> float:
    # Closest planar approach of two linear trajectories on [0, duration].
    dp = (a_pos - b_pos)[:2]
    dv = (a_vel - b_vel)[:2]
    speed2 = float(dv @ dv)
    t_star = 0.0 if speed2 < 1e-12 else min(max(-float(dp @ dv) / speed2, 0.0), duration)
    closest = dp + dv * t_star
    return float(np.hypot(closest[0], closest[1]))


def build_world(cfg: ScenarioConfig, rng: np.random.Generator) -> World:
    """Spawn objects, rejecting placements that would violate clearance."""
    objects: list[WorldObject] = []
    placed: list[tuple[np.ndarray, np.ndarray]] = []
    for object_id in range(cfg.object_count):
        for _ in range(200):
            pos = np.array(
                [
                    rng.uniform(*cfg.spawn_x),
                    rng.uniform(*cfg.spawn_y),
                    rng.uniform(*cfg.spawn_z),
                ]
            )
            speed = rng.uniform(*cfg.speed_range)
            theta = rng.uniform(-math.pi, math.pi)
            vel = np.array([speed * math.cos(theta), speed * math.sin(theta), 0.0])
            ok = all(
                _min_separation_over_run(pos, vel, p, v, cfg.duration_s) >= cfg.min_clearance
                for p, v in placed
            )
            if ok or cfg.min_clearance <= 0:
                break
        else:
            log.warning("object %d placed without clearance after 200 attempts", object_id)
        placed.append((pos, vel))
        yaw_rate = rng.uniform(*cfg.yaw_rate_range)
        state = StateVector(
            x=float(pos[0]), y=float(pos[1]), z=float(pos[2]),
            l=float(rng.uniform(3.8, 5.0)),
            w=float(rng.uniform(1.7, 2.1)),
            h=float(rng.uniform(1.4, 1.8)),
            sin_yaw=math.sin(theta), cos_yaw=math.cos(theta),
            vx=float(vel[0]), vy=float(vel[1]), vz=0.0,
        )
        objects.append(
            WorldObject(
                object_id=object_id,
                class_id=int(rng.integers(cfg.class_count)),
                state=state,
                yaw_rate=float(yaw_rate),
            )
        )
    return World(time_us=0, objects=tuple(objects))


# ---------------------------------------------------------------------------
# Event loop


class SimEvent(NamedTuple):
    """One log line: sends (with arrival time or -1 when lost) and consumes."""

    t_us: Timestamp
    kind: str  # "send" | "drop" | "consume"
    agent_id: int
    size_bytes: int
    detail_us: int


@dataclass
class FrameRecord:
    """Everything the evaluation needs from one ego frame."""

    t_us: Timestamp
    tracks: TrackSet
    ground_truth: tuple[GroundTruthObject, ...]
    coop_consumed: int = 0
    coop_prefusion_err: float = math.nan
    stale_dropped: int = 0


@dataclass
class RunResult:
    config: ScenarioConfig
    frames: list[FrameRecord]
    events: list[SimEvent]
    bytes_sent: int
    bytes_received: int

    @property
    def bps_sent(self) -> float:
        return self.bytes_sent / self.config.duration_s

    @property
    def bps_received(self) -> float:
        return self.bytes_received / self.config.duration_s

    def peak_bps_sent(self, window_s: Optional[float] = None) -> float:
        """Highest tumbling-window send rate; the burstiness complement to
        the whole-run average. Window defaults to the channel's accounting
        window, falling back to the full duration."""
        window = window_s if window_s is not None else self.config.channel.accounting_window_s
        if window <= 0:
            return self.bps_sent
        window_us = seconds_to_micros(window)
        totals: dict[int, int] = {}
        for e in self.events:
            if e.kind in ("send", "drop"):
                totals[e.t_us // window_us] = totals.get(e.t_us // window_us, 0) + e.size_bytes
        return max(totals.values()) / window if totals else 0.0


def _frame_ground_truth(
    world: World, ego_pose: AgentPose, roi: Optional[RoiSpec]
) -> tuple[GroundTruthObject, ...]:
    to_ego = invert(ego_pose.pose)
    out = []
    for obj in world.objects:
        local = transform_state(obj.state, to_ego)
        if roi is None or roi.contains(local):
            out.append(GroundTruthObject(obj.object_id, obj.class_id, local))
    return tuple(out)


def _prefusion_error(
    aligned: Sequence[Instance], gt: Sequence[GroundTruthObject]
) -> float:
    # Nearest same-class reference distance; a proxy for true position error
    # that needs no oracle plumbed through the honest pipeline. Valid while
    # object clearance exceeds the alignment error.
    errors = []
    for inst in aligned:
        dists = [
            math.hypot(inst.state.x - g.state.x, inst.state.y - g.state.y)
            for g in gt
            if g.class_id == inst.class_id
        ]
        if dists:
            errors.append(min(dists))
    return float(np.mean(errors)) if errors else math.nan


def run_scenario(cfg: ScenarioConfig, seed: Optional[int] = None) -> RunResult:
    """Execute one scenario end to end, fully determined by the seed."""
    if not cfg.agents:
        raise ValueError("scenario needs at least one (ego) agent")
    run_seed = cfg.seed if seed is None else seed
    root = np.random.SeedSequence(run_seed)
    world_seq, channel_seq, *agent_seqs = root.spawn(2 + len(cfg.agents))
    channel_rng = np.random.default_rng(channel_seq)

    world = build_world(cfg, np.random.default_rng(world_seq))
    agents = [
        Agent(spec, np.random.default_rng(seq))
        for spec, seq in zip(cfg.agents, agent_seqs)
    ]
    ego = next(a for a in agents if a.spec.ego)
    coop_agents = [a for a in agents if not a.spec.ego]

    pipe = cfg.pipeline
    registry = TrackIdRegistry()
    prev_tracks = TrackSet(timestamp=0, instances=())
    inbox: list[tuple[Timestamp, int, int, bytes]] = []
    seq_counter = 0
    events: list[SimEvent] = []
    frames: list[FrameRecord] = []
    bytes_sent = 0
    bytes_received = 0
    tick_us = seconds_to_micros(cfg.tick_s)

    for k in range(cfg.frame_count):
        t = k * tick_us
        if k > 0:
            world = step_world(world, cfg.tick_s)

        # Remote agents sense and transmit.
        for agent in coop_agents:
            detections = sense(agent, world, agent.rng)
            eligible = [
                d for d in detections if d.confidence >= pipe.transmit_confidence_min
            ]
            eligible.sort(key=lambda d: -d.confidence)
            payload = eligible[: pipe.transmit_top_k]
            sent_pose = agent.spec.pose_at(t).pose
            if cfg.pose_noise is not None:
                sent_pose = perturb_transform(sent_pose, channel_rng, cfg.pose_noise)
            packet = encode_packet(payload, sent_pose, t, agent.spec.agent_id)
            bytes_sent += len(packet)
            delivery = transmit(packet, cfg.channel, channel_rng, t)
            if delivery is None:
                events.append(SimEvent(t, "drop", agent.spec.agent_id, len(packet), -1))
                continue
            t_arrive, data = delivery
            seq_counter += 1
            heapq.heappush(inbox, (t_arrive, seq_counter, agent.spec.agent_id, data))
            events.append(SimEvent(t, "send", agent.spec.agent_id, len(packet), t_arrive))

        # Ego consumes whatever has arrived, newest packet per sender.
        ego_pose = ego.spec.pose_at(t)
        newest: dict[int, InstancePacket] = {}
        while inbox and inbox[0][0] <= t:
            t_arrive, seq, sender, data = heapq.heappop(inbox)
            bytes_received += len(data)
            events.append(SimEvent(t, "consume", sender, len(data), t_arrive))
            packet = decode_packet(data)
            prior = newest.get(sender)
            if prior is None or packet.send_timestamp >= prior.send_timestamp:
                newest[sender] = packet

        coop_aligned: list[Instance] = []
        stale = 0
        for sender in sorted(newest):
            packet = newest[sender]
            coop_pose = AgentPose(
                agent_id=packet.sender_id,
                stamped_at=max(packet.send_timestamp, 0),
                pose=packet.sender_pose(),
            )
            for inst in packet.to_instances():
                if not pipe.compensate_latency:
                    inst = replace(inst, observed_at=t)
                try:
                    coop_aligned.append(
                        align_instance(inst, coop_pose, ego_pose, t, pipe.alignment)
                    )
                except HorizonExceeded:
                    stale += 1

        # Ego senses and fuses.
        ego_dets = filter_roi(sense(ego, world, ego.rng), pipe.roi)
        gt = _frame_ground_truth(world, ego_pose, pipe.roi)
        # The error diagnostic compares against the whole world so that
        # objects straddling the ROI edge don't get scored against a
        # distant stranger.
        gt_all = _frame_ground_truth(world, ego_pose, None)
        coop_in_roi = filter_roi(coop_aligned, pipe.roi)
        result = associate(ego_dets, coop_aligned, pipe.roi, pipe.r_int, pipe.weights)
        fused = []
        for ego_inst, coop_inst, _cost in result.matched:
            registry.record_match(coop_inst.source_agent, coop_inst.track_id, ego_inst.track_id)
            fused.append(coarse_fuse(ego_inst, coop_inst, pipe.fusion.confidence_fusion))
        assembled = assemble_output(
            fused,
            result.unmatched_ego,
            result.unmatched_coop_near,
            result.coop_far,
            pipe.fusion,
            registry,
            t,
        )
        tracks = refine_tracks(assembled, prev_tracks, cfg.tick_s, pipe.fusion)
        prev_tracks = tracks
        frames.append(
            FrameRecord(
                t_us=t,
                tracks=tracks,
                ground_truth=gt,
                coop_consumed=len(coop_in_roi),
                coop_prefusion_err=_prefusion_error(coop_in_roi, gt_all),
                stale_dropped=stale,
            )
        )

    return RunResult(
        config=cfg,
        frames=frames,
        events=events,
        bytes_sent=bytes_sent,
        bytes_received=bytes_received,
    )


# ---------------------------------------------------------------------------
# Reference scenarios


def constant_velocity_scenario(seed: int = 0) -> ScenarioConfig:
    """Noise-free straight-line world with two flawless agents.

    Useful as a fixture: tracking must be perfect here, and anything
    nondeterministic shows up as an immediate diff.
    """
    perfect = SensorModel(
        max_range=200.0,
        detect_prob_near=1.0,
        detect_prob_far=1.0,
        pos_noise_sigma=0.0,
        feature_noise_sigma=0.0,
        confidence_near=0.9,
        confidence_far=0.9,
        feature_dim=32,
    )
    return ScenarioConfig(
        duration_s=12.0,
        tick_s=0.5,
        seed=seed,
        object_count=10,
        spawn_x=(-15.0, 15.0),
        spawn_y=(-15.0, 15.0),
        speed_range=(0.3, 1.2),
        min_clearance=6.0,
        agents=(
            AgentSpec(agent_id=0, ego=True, sensor=perfect),
            AgentSpec(agent_id=1, x=20.0, y=20.0, yaw_deg=-135.0, sensor=perfect),
        ),
        channel=ChannelModel(),
        pipeline=PipelineConfig(),
    )


def latency_study_scenario(seed: int = 0) -> ScenarioConfig:
    """Fast objects, short-range ego, wide-coverage remote: latency bites.

    The remote agent covers far more of the scene than the ego sensor, so
    whatever error latency induces in the shared instances lands directly
    on the output. Objects are fast (>= 10 m/s) to make the stakes visible.
    """
    ego_sensor = SensorModel(
        max_range=40.0,
        detect_prob_near=0.95,
        detect_prob_far=0.85,
        pos_noise_sigma=0.2,
        vel_noise_sigma=0.05,
        feature_noise_sigma=0.25,
        confidence_near=0.95,
        confidence_far=0.6,
        feature_dim=64,
    )
    coop_sensor = SensorModel(
        max_range=140.0,
        detect_prob_near=0.98,
        detect_prob_far=0.92,
        pos_noise_sigma=0.2,
        vel_noise_sigma=0.05,
        feature_noise_sigma=0.25,
        confidence_near=0.9,
        confidence_far=0.75,
        feature_dim=64,
    )
    return ScenarioConfig(
        duration_s=8.0,
        tick_s=0.1,
        seed=seed,
        object_count=12,
        spawn_x=(-45.0, 45.0),
        spawn_y=(-45.0, 45.0),
        speed_range=(10.5, 15.0),
        min_clearance=8.0,
        agents=(
            AgentSpec(agent_id=0, ego=True, sensor=ego_sensor),
            AgentSpec(agent_id=1, x=30.0, y=30.0, yaw_deg=135.0, sensor=coop_sensor),
        ),
        channel=ChannelModel(latency_ms=0.0),
        pipeline=PipelineConfig(transmit_top_k=15),
    )


def interaction_range_scenario(seed: int = 0) -> ScenarioConfig:
    """Degraded far-field ego sensing against a uniformly good remote.

    Near the ego both views are solid, and fusing them suppresses the
    duplicates that sender-pose error would otherwise leave behind. Far
    away the ego estimate is camera-like junk: too weak to publish on its
    own, but blended into a good remote estimate it drags it off target
    and churns its identity. Sweeping the interaction range trades those
    failure modes against each other.
    """
    ego_sensor = SensorModel(
        max_range=45.0,
        detect_prob_near=1.0,
        detect_prob_far=0.8,
        pos_noise_sigma=0.25,
        pos_noise_far_factor=20.0,
        pos_noise_range_power=3.0,
        vel_noise_sigma=0.1,
        feature_noise_sigma=0.3,
        confidence_near=0.95,
        confidence_far=0.45,
        feature_dim=64,
        track_gate=8.0,
    )
    coop_sensor = SensorModel(
        max_range=140.0,
        detect_prob_near=0.98,
        detect_prob_far=0.9,
        pos_noise_sigma=0.2,
        vel_noise_sigma=0.05,
        feature_noise_sigma=0.3,
        confidence_near=0.85,
        confidence_far=0.8,
        feature_dim=64,
    )
    return ScenarioConfig(
        duration_s=24.0,
        tick_s=0.5,
        seed=seed,
        object_count=20,
        spawn_x=(-42.0, 42.0),
        spawn_y=(-42.0, 42.0),
        speed_range=(3.0, 8.0),
        min_clearance=8.0,
        agents=(
            AgentSpec(agent_id=0, ego=True, sensor=ego_sensor),
            AgentSpec(agent_id=1, x=35.0, y=35.0, yaw_deg=-135.0, sensor=coop_sensor),
        ),
        channel=ChannelModel(latency_ms=100.0),
        pose_noise=TransformNoiseParams(trans_sigma=1.0, rot_sigma_deg=0.5),
        pipeline=PipelineConfig(
            weights=MatchWeights(cost_threshold=6.5),
            fusion=FusionConfig(dedup_radius=0.8, output_confidence_threshold=0.5),
            transmit_top_k=25,
        ),
    )
