"""Stress-testing association with known-correspondence scenes.

Reference objects are duplicated into two views, each independently
perturbed (hard-bounded uniform observation noise), and the transform
between the views is itself corrupted (Gaussian translation and yaw).
Because both views inherit the reference IDs, association quality is
measured exactly. Sweeping the appearance weight shows what the feature
term buys when geometry alone is ambiguous.
"""

import numpy as np

from coopfuse import ObservationNoiseParams, TransformNoiseParams
from coopfuse.robustness import alpha_sweep_rows, make_cluttered_objects

objects = make_cluttered_objects(12, spacing=3.0, rng=np.random.default_rng(0))
near = min(
    np.hypot(a.state.x - b.state.x, a.state.y - b.state.y)
    for i, a in enumerate(objects) for b in objects[i + 1:]
)
print(f"cluttered scene: {len(objects)} objects, nearest pair {near:.2f} m apart")
print(f"observation noise: +-{ObservationNoiseParams().pos_range} m per axis (hard bound)")
print(f"transform noise:   sigma {TransformNoiseParams().trans_sigma} m translation, "
      f"{TransformNoiseParams().rot_sigma_deg} deg yaw\n")

rows = alpha_sweep_rows(alphas=[0.0, 0.25, 0.5, 1.0, 2.0, 4.0], scenes=200, seed=0)
print(f"{'alpha':>6s} {'accuracy':>9s} {'precision':>10s} {'recall':>7s}")
for row in rows:
    print(f"{row['alpha']:6.2f} {row['mean_accuracy']:9.4f} "
          f"{row['mean_precision']:10.4f} {row['mean_recall']:7.4f}")
print("\nGeometry alone already does well; the appearance term consistently "
      "buys the remaining swaps back in clutter.")
