"""Core value types: kinematic state vectors, instances, rigid transforms, poses.

Everything here is an immutable value; functions return new objects. Angles
are carried redundantly as (sin, cos) pairs so that the in-memory layout,
the wire layout, and the arithmetic all use the same encoding. Timestamps
are integer microseconds since the scenario epoch so latency arithmetic is
exact; conversion to float seconds happens only at the kinematics boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

MICROS_PER_SECOND = 1_000_000

# Microseconds since the scenario epoch (signed 64-bit on the wire).
Timestamp = int

HEADING_UNIT_TOL = 1e-6
FEATURE_UNIT_TOL = 1e-6
ROTATION_TOL = 1e-9
DEGENERATE_TOL = 1e-12


class DegenerateHeading(ValueError):
    """A heading vector collapsed below the resolvable tolerance."""


def seconds_to_micros(seconds: float) -> Timestamp:
    return round(seconds * MICROS_PER_SECOND)


def micros_to_seconds(micros: Timestamp) -> float:
    return micros / MICROS_PER_SECOND


def normalize_heading(sin_raw: float, cos_raw: float) -> tuple[float, float]:
    """Rescale a raw (sin, cos) pair to unit norm, preserving direction.

    Pairs already within 1e-12 of unit norm pass through untouched, which
    makes repeated normalization an exact no-op.

    Raises:
        DegenerateHeading: if both components are below 1e-12.
    """
    norm = math.hypot(sin_raw, cos_raw)
    if norm < DEGENERATE_TOL:
        raise DegenerateHeading(
            f"heading ({sin_raw!r}, {cos_raw!r}) has no resolvable direction"
        )
    if abs(norm - 1.0) <= DEGENERATE_TOL:
        return float(sin_raw), float(cos_raw)
    return sin_raw / norm, cos_raw / norm


@dataclass(frozen=True, slots=True)
class StateVector:
    """Explicit 11-component kinematic state of one object.

    Components: center position (x, y, z) in meters, box dimensions
    (l, w, h) in meters, heading encoded as (sin_yaw, cos_yaw), and
    velocity (vx, vy, vz) in meters/second expressed in the same frame
    as the position.
    """

    x: float
    y: float
    z: float
    l: float
    w: float
    h: float
    sin_yaw: float
    cos_yaw: float
    vx: float
    vy: float
    vz: float

    def __post_init__(self) -> None:
        for name in self.__slots__:
            value = getattr(self, name)
            if not isinstance(value, float):
                object.__setattr__(self, name, float(value))
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"state component {name} is not finite")
        if self.l <= 0 or self.w <= 0 or self.h <= 0:
            raise ValueError(
                f"dimensions must be positive, got ({self.l}, {self.w}, {self.h})"
            )
        unit_err = abs(self.sin_yaw**2 + self.cos_yaw**2 - 1.0)
        if unit_err > HEADING_UNIT_TOL:
            raise ValueError(
                f"heading (sin, cos) must be unit norm, off by {unit_err:.3e}"
            )

    def as_array(self) -> np.ndarray:
        """The 11 components as a float64 array, in declaration order."""
        return np.array(
            [self.x, self.y, self.z, self.l, self.w, self.h,
             self.sin_yaw, self.cos_yaw, self.vx, self.vy, self.vz]
        )

    @classmethod
    def from_array(cls, values: np.ndarray) -> "StateVector":
        if len(values) != 11:
            raise ValueError(f"expected 11 components, got {len(values)}")
        return cls(*(float(v) for v in values))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def velocity(self) -> np.ndarray:
        return np.array([self.vx, self.vy, self.vz])

    @property
    def yaw(self) -> float:
        return math.atan2(self.sin_yaw, self.cos_yaw)

    @property
    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)


def normalize_feature(values: np.ndarray) -> np.ndarray:
    """Scale a feature vector to unit Euclidean norm."""
    arr = np.asarray(values, dtype=np.float64)
    norm = float(np.linalg.norm(arr))
    if norm < DEGENERATE_TOL:
        raise ValueError("cannot normalize a zero feature vector")
    return arr / norm


@dataclass(frozen=True, eq=False)
class Instance:
    """One perceived object: kinematic state plus appearance feature.

    The feature is a unit-norm vector of configurable dimension; confidence
    lives in [0, 1]. ``track_id`` is the producing agent's persistent
    identifier (None when the producer does not track), ``source_agent``
    identifies the producer, and ``observed_at`` is the sensing timestamp.
    """

    state: StateVector
    feature: np.ndarray
    confidence: float
    class_id: int
    track_id: Optional[int]
    source_agent: int
    observed_at: Timestamp

    def __post_init__(self) -> None:
        feature = np.array(self.feature, dtype=np.float64)
        feature.setflags(write=False)
        object.__setattr__(self, "feature", feature)
        norm_err = abs(float(np.linalg.norm(feature)) - 1.0)
        if norm_err > FEATURE_UNIT_TOL:
            raise ValueError(f"feature must be unit norm, off by {norm_err:.3e}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        if self.observed_at < 0:
            raise ValueError("observed_at must be non-negative")


def _orthonormalized(matrix: np.ndarray) -> np.ndarray:
    # Gram-Schmidt on the first two columns; the third comes from the cross
    # product, which also pins the determinant to +1.
    c0 = matrix[:, 0] / np.linalg.norm(matrix[:, 0])
    c1 = matrix[:, 1] - np.dot(matrix[:, 1], c0) * c0
    c1 /= np.linalg.norm(c1)
    c2 = np.cross(c0, c1)
    return np.column_stack([c0, c1, c2])


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """A proper rigid motion: orthonormal 3x3 rotation plus translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self) -> None:
        rotation = np.array(self.rotation, dtype=np.float64)
        translation = np.array(self.translation, dtype=np.float64)
        if rotation.shape != (3, 3):
            raise ValueError(f"rotation must be 3x3, got {rotation.shape}")
        if translation.shape != (3,):
            raise ValueError(f"translation must be a 3-vector, got {translation.shape}")
        drift = np.max(np.abs(rotation @ rotation.T - np.eye(3)))
        if drift > ROTATION_TOL:
            raise ValueError(f"rotation is not orthonormal, drift {drift:.3e}")
        if abs(np.linalg.det(rotation) - 1.0) > ROTATION_TOL:
            raise ValueError("rotation must have determinant +1")
        rotation.setflags(write=False)
        translation.setflags(write=False)
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_yaw(cls, yaw: float, translation=(0.0, 0.0, 0.0)) -> "RigidTransform":
        """Rotation about +z by ``yaw`` radians, then translate."""
        c, s = math.cos(yaw), math.sin(yaw)
        rotation = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        return cls(rotation, np.asarray(translation, dtype=np.float64))

    def flat_rotation(self) -> tuple[float, ...]:
        """The 9 rotation entries in row-major order (the wire layout)."""
        return tuple(float(v) for v in self.rotation.reshape(-1))

    def apply_point(self, point: np.ndarray) -> np.ndarray:
        return self.rotation @ np.asarray(point, dtype=np.float64) + self.translation

    @property
    def yaw(self) -> float:
        """Rotation angle about +z implied by the first column."""
        return math.atan2(self.rotation[1, 0], self.rotation[0, 0])


def compose(a: RigidTransform, b: RigidTransform) -> RigidTransform:
    """The transform applying ``b`` first, then ``a``."""
    rotation = a.rotation @ b.rotation
    translation = a.rotation @ b.translation + a.translation
    drift = np.max(np.abs(rotation @ rotation.T - np.eye(3)))
    if drift > ROTATION_TOL:
        rotation = _orthonormalized(rotation)
    return RigidTransform(rotation, translation)


def invert(t: RigidTransform) -> RigidTransform:
    """The inverse motion: R^T, -R^T t."""
    rt = t.rotation.T
    return RigidTransform(rt, -(rt @ t.translation))


@dataclass(frozen=True)
class AgentPose:
    """An agent's pose (agent frame -> global frame) at a point in time."""

    agent_id: int
    stamped_at: Timestamp
    pose: RigidTransform

    def __post_init__(self) -> None:
        if self.stamped_at < 0:
            raise ValueError("stamped_at must be non-negative")


def relative_transform(ego: AgentPose, coop: AgentPose) -> RigidTransform:
    """Transform mapping coop-frame coordinates into the ego frame.

    The two poses may carry different timestamps; each agent's pose is
    taken at its own stamp, which is exactly what a latency-compensated
    pipeline needs.
    """
    return compose(invert(ego.pose), coop.pose)


class GroundTruthObject(NamedTuple):
    """A reference object used by scene generation and evaluation."""

    object_id: int
    class_id: int
    state: StateVector
