"""Spatio-temporal alignment of remote instances into the ego frame.

Alignment is two steps, in a fixed order: (a) latency compensation with a
constant-velocity motion model, performed in the sender's frame, then
(b) projection through the relative rigid transform. The two steps only
commute for pure translations, so the order matters.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .core import (
    AgentPose,
    DegenerateHeading,
    Instance,
    RigidTransform,
    StateVector,
    Timestamp,
    micros_to_seconds,
    normalize_feature,
    relative_transform,
)

DEFAULT_COMPENSATION_HORIZON = 2.0


class HorizonExceeded(ValueError):
    """Data is older than the trusted extrapolation horizon; drop, don't guess."""


class FeatureAligner(enum.Enum):
    """How appearance features respond to a change of viewpoint.

    IDENTITY passes features through untouched (they are treated as
    viewpoint-invariant). YAW_CONDITIONED rotates consecutive coordinate
    pairs of the feature by the relative yaw, a parameter-free stand-in
    for a learned rotation-conditioned encoder with the same interface.
    """

    IDENTITY = "identity"
    YAW_CONDITIONED = "yaw_conditioned"


@dataclass(frozen=True)
class AlignmentConfig:
    feature_aligner: FeatureAligner = FeatureAligner.IDENTITY
    max_compensation_horizon: float = DEFAULT_COMPENSATION_HORIZON

    def __post_init__(self) -> None:
        if self.max_compensation_horizon <= 0:
            raise ValueError("max_compensation_horizon must be positive")


def compensate_latency(
    state: StateVector,
    dt: float,
    max_horizon: float = DEFAULT_COMPENSATION_HORIZON,
) -> StateVector:
    """Predict the state ``dt`` seconds ahead under constant velocity.

    Position advances by velocity * dt; dimensions, heading, and velocity
    are unchanged.

    Raises:
        HorizonExceeded: if dt exceeds ``max_horizon``.
        ValueError: if dt is negative.
    """
    if dt < 0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    if dt > max_horizon:
        raise HorizonExceeded(f"dt {dt:.3f}s exceeds horizon {max_horizon:.3f}s")
    if dt == 0.0:
        return state
    return replace(
        state,
        x=state.x + state.vx * dt,
        y=state.y + state.vy * dt,
        z=state.z + state.vz * dt,
    )


def transform_state(state: StateVector, t: RigidTransform) -> StateVector:
    """Express a state in the frame the transform maps into.

    Position is rotated and translated; velocity is rotated only (it is a
    frame-local direction, not a point); the heading is carried by rotating
    the planar direction vector (cos, sin, 0) and renormalizing its xy
    projection. Dimensions are frame-independent.

    Raises:
        DegenerateHeading: if the rotated heading has no xy projection left
            (only possible for rotations that tip the plane on its side).
    """
    rot = t.rotation
    px, py, pz = rot @ (state.x, state.y, state.z) + t.translation
    vx, vy, vz = rot @ (state.vx, state.vy, state.vz)
    hx, hy, _hz = rot @ (state.cos_yaw, state.sin_yaw, 0.0)
    norm = math.hypot(hx, hy)
    if norm < 1e-9:
        raise DegenerateHeading("rotation leaves no planar heading component")
    return StateVector(
        x=px, y=py, z=pz,
        l=state.l, w=state.w, h=state.h,
        sin_yaw=hy / norm, cos_yaw=hx / norm,
        vx=vx, vy=vy, vz=vz,
    )


def rotate_feature_pairs(feature: np.ndarray, yaw: float) -> np.ndarray:
    """Rotate consecutive feature coordinate pairs by ``yaw``, renormalized.

    Odd trailing coordinate (if any) is left untouched. At yaw = 0 this is
    the identity.
    """
    if yaw == 0.0:
        return np.array(feature, dtype=np.float64)
    out = np.array(feature, dtype=np.float64)
    pair_count = out.shape[0] // 2
    if pair_count:
        c, s = math.cos(yaw), math.sin(yaw)
        pairs = out[: 2 * pair_count].reshape(pair_count, 2)
        rotated = pairs @ np.array([[c, s], [-s, c]])
        out[: 2 * pair_count] = rotated.reshape(-1)
    return normalize_feature(out)


def align_instance(
    inst: Instance,
    coop_pose: AgentPose,
    ego_pose: AgentPose,
    t_ego: Timestamp,
    cfg: AlignmentConfig,
) -> Instance:
    """Bring a remote instance into the ego frame at the ego timestamp.

    Latency compensation runs first in the sender's frame, then the state
    is projected through the relative transform built from the two poses
    (each at its own stamp). The feature passes through the configured
    aligner. The result is stamped ``t_ego``; identity fields are kept.

    Raises:
        HorizonExceeded, DegenerateHeading: propagated from the two steps.
        ValueError: if the instance is from the future (observed_at > t_ego).
    """
    if inst.observed_at > t_ego:
        raise ValueError("instance observed after the ego timestamp")
    dt = micros_to_seconds(t_ego - inst.observed_at)
    state = compensate_latency(inst.state, dt, cfg.max_compensation_horizon)
    rel = relative_transform(ego_pose, coop_pose)
    state = transform_state(state, rel)
    if cfg.feature_aligner is FeatureAligner.YAW_CONDITIONED:
        feature = rotate_feature_pairs(inst.feature, rel.yaw)
    else:
        feature = inst.feature
    return Instance(
        state=state,
        feature=feature,
        confidence=inst.confidence,
        class_id=inst.class_id,
        track_id=inst.track_id,
        source_agent=inst.source_agent,
        observed_at=t_ego,
    )
