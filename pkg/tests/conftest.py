import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from coopfuse.core import Instance, StateVector
from coopfuse.robustness import identity_embedding


def make_state(
    x=0.0, y=0.0, z=0.0, l=4.5, w=1.9, h=1.6,
    yaw=0.0, vx=0.0, vy=0.0, vz=0.0,
) -> StateVector:
    return StateVector(
        x=x, y=y, z=z, l=l, w=w, h=h,
        sin_yaw=math.sin(yaw), cos_yaw=math.cos(yaw),
        vx=vx, vy=vy, vz=vz,
    )


def make_instance(
    x=0.0, y=0.0, z=0.0, yaw=0.0, vx=0.0, vy=0.0,
    confidence=0.9, class_id=0, track_id=1, source_agent=0,
    observed_at=0, feature_seed=0, dim=8, feature=None,
) -> Instance:
    if feature is None:
        feature = identity_embedding(feature_seed, dim)
    return Instance(
        state=make_state(x=x, y=y, z=z, yaw=yaw, vx=vx, vy=vy),
        feature=feature,
        confidence=confidence,
        class_id=class_id,
        track_id=track_id,
        source_agent=source_agent,
        observed_at=observed_at,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
