"""Binary packet format for instance exchange.

Layout (all little-endian, no padding):

    header:  magic u32 = 0x4B475121, version u16, sender_id u16,
             send_timestamp i64 (microseconds), sender pose as 9 x f32
             rotation (row-major) + 3 x f32 translation, count u16,
             feature_dim u16                                  -> 68 bytes
    record:  track_id u64 (0xFFFF...FF means untracked), class u8,
             confidence f32, state 11 x f32, feature D x f32  -> 57 + 4D bytes

Packets are value objects over exactly the f32-representable numbers that
live on the wire, so encode/decode round-trips are bit-exact. Conversion
to and from ``Instance`` (which is float64 and validated) happens at the
edges: headings and features are renormalized on the way in.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    Instance,
    RigidTransform,
    StateVector,
    Timestamp,
    _orthonormalized,
    normalize_feature,
    normalize_heading,
)

MAGIC = 0x4B475121
VERSION = 1
NO_TRACK_ID = 0xFFFF_FFFF_FFFF_FFFF

_HEADER = struct.Struct("<IHHq9f3fHH")
HEADER_SIZE = _HEADER.size  # 68
_RECORD_FIXED = struct.Struct("<QBf11f")


class MalformedPacket(ValueError):
    """The byte stream is not a well-formed instance packet."""


def record_size(feature_dim: int) -> int:
    """Bytes per instance record for a given feature dimension."""
    return _RECORD_FIXED.size + 4 * feature_dim


def packet_size(count: int, feature_dim: int) -> int:
    return HEADER_SIZE + count * record_size(feature_dim)


def _f32(value: float) -> float:
    return float(np.float32(value))


@dataclass(frozen=True)
class PacketRecord:
    """One instance as it appears on the wire (f32-exact values)."""

    track_id: Optional[int]
    class_id: int
    confidence: float
    state: tuple[float, ...]
    feature: tuple[float, ...]

    def to_instance(self, sender_id: int, send_timestamp: Timestamp) -> Instance:
        """Validated Instance; renormalizes heading and feature after f32."""
        values = list(self.state)
        values[6], values[7] = normalize_heading(values[6], values[7])
        return Instance(
            state=StateVector.from_array(np.array(values)),
            feature=normalize_feature(np.array(self.feature)),
            confidence=min(max(self.confidence, 0.0), 1.0),
            class_id=self.class_id,
            track_id=self.track_id,
            source_agent=sender_id,
            observed_at=send_timestamp,
        )

    @classmethod
    def from_instance(cls, inst: Instance) -> "PacketRecord":
        tid = inst.track_id
        if tid is not None and not 0 <= tid < NO_TRACK_ID:
            raise ValueError(f"track_id {tid} does not fit the wire format")
        return cls(
            track_id=tid,
            class_id=inst.class_id,
            confidence=_f32(inst.confidence),
            state=tuple(_f32(v) for v in inst.state.as_array()),
            feature=tuple(_f32(v) for v in inst.feature),
        )


@dataclass(frozen=True)
class InstancePacket:
    """A decoded packet: header fields plus per-instance records."""

    version: int
    sender_id: int
    send_timestamp: Timestamp
    rotation: tuple[float, ...]  # 9 entries, row-major
    translation: tuple[float, ...]
    feature_dim: int
    records: tuple[PacketRecord, ...]

    @property
    def count(self) -> int:
        return len(self.records)

    def sender_pose(self) -> RigidTransform:
        """The sender pose, re-orthonormalized after f32 quantization."""
        rot = np.array(self.rotation).reshape(3, 3)
        return RigidTransform(_orthonormalized(rot), np.array(self.translation))

    def to_instances(self) -> list[Instance]:
        return [r.to_instance(self.sender_id, self.send_timestamp) for r in self.records]


def build_packet(
    instances: Sequence[Instance],
    pose: RigidTransform,
    t: Timestamp,
    sender_id: int,
) -> InstancePacket:
    """Quantize instances and pose into a wire-value packet."""
    dims = {len(inst.feature) for inst in instances}
    if len(dims) > 1:
        raise ValueError(f"instances carry mixed feature dimensions: {sorted(dims)}")
    feature_dim = dims.pop() if dims else 0
    return InstancePacket(
        version=VERSION,
        sender_id=sender_id,
        send_timestamp=t,
        rotation=tuple(_f32(v) for v in pose.flat_rotation()),
        translation=tuple(_f32(v) for v in pose.translation),
        feature_dim=feature_dim,
        records=tuple(PacketRecord.from_instance(inst) for inst in instances),
    )


def serialize_packet(packet: InstancePacket) -> bytes:
    parts = [
        _HEADER.pack(
            MAGIC,
            packet.version,
            packet.sender_id,
            packet.send_timestamp,
            *packet.rotation,
            *packet.translation,
            packet.count,
            packet.feature_dim,
        )
    ]
    record_fmt = struct.Struct(f"<QBf11f{packet.feature_dim}f")
    for rec in packet.records:
        if len(rec.feature) != packet.feature_dim:
            raise ValueError("record feature length disagrees with packet feature_dim")
        tid = NO_TRACK_ID if rec.track_id is None else rec.track_id
        parts.append(
            record_fmt.pack(tid, rec.class_id, rec.confidence, *rec.state, *rec.feature)
        )
    return b"".join(parts)


def encode_packet(
    instances: Sequence[Instance],
    pose: RigidTransform,
    t: Timestamp,
    sender_id: int = 0,
) -> bytes:
    """Serialize a batch of instances plus the sender pose and timestamp."""
    return serialize_packet(build_packet(instances, pose, t, sender_id))


def decode_packet(buf: bytes) -> InstancePacket:
    """Parse bytes into an InstancePacket.

    Raises:
        MalformedPacket: on bad magic, unsupported version, or any length
            disagreement between the header and the byte count.
    """
    if len(buf) < HEADER_SIZE:
        raise MalformedPacket(f"truncated header: {len(buf)} bytes")
    (magic, version, sender_id, send_ts, *pose_fields) = _HEADER.unpack_from(buf, 0)
    count, feature_dim = pose_fields[-2], pose_fields[-1]
    rotation = tuple(pose_fields[:9])
    translation = tuple(pose_fields[9:12])
    if magic != MAGIC:
        raise MalformedPacket(f"bad magic 0x{magic:08X}")
    if version != VERSION:
        raise MalformedPacket(f"unsupported version {version}")
    expected = packet_size(count, feature_dim)
    if len(buf) != expected:
        raise MalformedPacket(f"length {len(buf)} != declared {expected}")
    record_fmt = struct.Struct(f"<QBf11f{feature_dim}f")
    records = []
    offset = HEADER_SIZE
    for _ in range(count):
        fields = record_fmt.unpack_from(buf, offset)
        offset += record_fmt.size
        tid = None if fields[0] == NO_TRACK_ID else fields[0]
        records.append(
            PacketRecord(
                track_id=tid,
                class_id=fields[1],
                confidence=fields[2],
                state=tuple(fields[3:14]),
                feature=tuple(fields[14:]),
            )
        )
    return InstancePacket(
        version=version,
        sender_id=sender_id,
        send_timestamp=send_ts,
        rotation=rotation,
        translation=translation,
        feature_dim=feature_dim,
        records=tuple(records),
    )
