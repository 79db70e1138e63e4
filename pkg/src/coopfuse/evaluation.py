"""Detection/tracking/bandwidth metrics and the two sweep studies.

Metrics are deliberately simplified relative to full benchmark suites:
center-distance greedy matching, 11-point interpolated average precision
over a set of distance thresholds, and a tracking accuracy score swept
over an 11-point recall grid. The claims these support are trends and
properties, not leaderboard numbers, and every output is deterministic
given the scenario seed.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import GroundTruthObject, Instance, Timestamp
from .fusion import TrackSet
from .simulator import RunResult, ScenarioConfig, run_scenario

DETECTION_THRESHOLDS = (0.5, 1.0, 2.0, 4.0)
TRACKING_THRESHOLD = 2.0
RECALL_GRID = tuple(np.linspace(0.0, 1.0, 11))

DEFAULT_RANGE_SWEEP = (5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0)
DEFAULT_LATENCY_SWEEP_MS = (0.0, 100.0, 200.0, 300.0, 400.0, 500.0)

RANGE_SWEEP_COLUMNS = ("r_int", "ap", "amota_like", "duplicate_rate")
LATENCY_SWEEP_COLUMNS = ("latency_ms", "compensated", "ap", "rmse", "coop_prefusion_err")
METRICS_COLUMNS = (
    "ap", "mota_like", "amota_like", "id_switches", "duplicate_rate",
    "rmse_pos", "bps_sent", "bps_received",
)


@dataclass(frozen=True)
class FrameGroundTruth:
    """Reference objects inside the ROI for one ego frame."""

    timestamp: Timestamp
    objects: tuple[GroundTruthObject, ...]

    def __post_init__(self) -> None:
        ids = [obj.object_id for obj in self.objects]
        if len(set(ids)) != len(ids):
            raise ValueError("ground-truth object ids must be unique per frame")


@dataclass
class MetricsReport:
    ap: float
    ap_per_threshold: dict[float, float]
    pr_curves: dict[float, tuple[tuple[float, ...], tuple[float, ...]]]
    mota_like: float
    amota_like: float
    id_switches: int
    duplicate_rate: float
    rmse_pos: float
    bps_sent: float
    bps_received: float
    coop_prefusion_err: float = math.nan


Frame = tuple[TrackSet, FrameGroundTruth]


def _greedy_match(
    preds: Sequence[Instance],
    gt_objects: Sequence[GroundTruthObject],
    dist_threshold: float,
) -> tuple[list[tuple[Instance, GroundTruthObject, float]], list[Instance], list[GroundTruthObject]]:
    available = list(range(len(gt_objects)))
    tp, fp = [], []
    for pred in sorted(preds, key=lambda p: -p.confidence):
        best_k, best_d = None, dist_threshold
        for k in available:
            g = gt_objects[k]
            if g.class_id != pred.class_id:
                continue
            d = math.hypot(pred.state.x - g.state.x, pred.state.y - g.state.y)
            if d <= best_d:
                best_k, best_d = k, d
        if best_k is None:
            fp.append(pred)
        else:
            available.remove(best_k)
            tp.append((pred, gt_objects[best_k], best_d))
    fn = [gt_objects[k] for k in available]
    return tp, fp, fn


def match_to_gt(
    tracks: TrackSet, gt: FrameGroundTruth, dist_threshold: float
) -> tuple[list[tuple[Instance, GroundTruthObject, float]], list[Instance], list[GroundTruthObject]]:
    """Greedy confidence-ordered one-to-one matching by planar distance."""
    if tracks.timestamp != gt.timestamp:
        raise ValueError("track set and ground truth are from different frames")
    return _greedy_match(tracks.instances, gt.objects, dist_threshold)


def _pr_curve(frames: Sequence[Frame], dist_threshold: float):
    scored: list[tuple[float, bool]] = []
    total_gt = 0
    for tracks, gt in frames:
        total_gt += len(gt.objects)
        tp, fp, _ = match_to_gt(tracks, gt, dist_threshold)
        scored.extend((pred.confidence, True) for pred, _, _ in tp)
        scored.extend((pred.confidence, False) for pred in fp)
    scored.sort(key=lambda item: -item[0])
    recalls, precisions = [], []
    tp_cum = 0
    for rank, (_conf, is_tp) in enumerate(scored, start=1):
        tp_cum += is_tp
        precisions.append(tp_cum / rank)
        recalls.append(tp_cum / total_gt if total_gt else 0.0)
    return recalls, precisions


def _interpolated_ap(recalls: Sequence[float], precisions: Sequence[float]) -> float:
    if not recalls:
        return 0.0
    recalls = np.asarray(recalls)
    precisions = np.asarray(precisions)
    total = 0.0
    for r in RECALL_GRID:
        mask = recalls >= r - 1e-12
        total += float(precisions[mask].max()) if mask.any() else 0.0
    return total / len(RECALL_GRID)


def compute_ap(
    frames: Sequence[Frame], thresholds: Sequence[float] = DETECTION_THRESHOLDS
) -> float:
    """Average precision: 11-point interpolation, averaged over thresholds."""
    if not frames:
        raise ValueError("need at least one frame")
    return float(
        np.mean([_interpolated_ap(*_pr_curve(frames, thr)) for thr in thresholds])
    )


def _tracking_pass(
    frames: Sequence[Frame],
    dist_threshold: float,
    conf_min: Optional[float] = None,
) -> tuple[int, int, int, int, int, list[float]]:
    fp_count = fn_count = switches = total_gt = tp_count = 0
    last_track: dict[int, int] = {}
    tp_dists: list[float] = []
    for tracks, gt in frames:
        preds = [
            inst
            for inst in tracks.instances
            if conf_min is None or inst.confidence >= conf_min
        ]
        tp, fp, fn = _greedy_match(preds, gt.objects, dist_threshold)
        fp_count += len(fp)
        fn_count += len(fn)
        total_gt += len(gt.objects)
        tp_count += len(tp)
        for pred, g, d in tp:
            tp_dists.append(d)
            prev = last_track.get(g.object_id)
            if prev is not None and prev != pred.track_id:
                switches += 1
            last_track[g.object_id] = pred.track_id
    return fp_count, fn_count, switches, total_gt, tp_count, tp_dists


def _mota(fp: int, fn: int, idsw: int, total_gt: int) -> float:
    if total_gt == 0:
        return 0.0
    return max(0.0, 1.0 - (fp + fn + idsw) / total_gt)


def compute_tracking(
    frames: Sequence[Frame], dist_threshold: float = TRACKING_THRESHOLD
) -> tuple[float, float, int]:
    """(mota_like, amota_like, id_switches).

    ``mota_like`` is 1 - (FP + FN + IDSW) / GT on the full output, floored
    at zero. ``amota_like`` repeats that over an 11-point recall grid: for
    each target recall the smallest high-confidence prediction subset that
    reaches it is evaluated (target 0 uses everything); unreachable targets
    score 0.
    """
    fp, fn, idsw, total_gt, tp_count, _ = _tracking_pass(frames, dist_threshold)
    mota = _mota(fp, fn, idsw, total_gt)

    # Confidence-threshold candidates for the recall sweep, from the
    # full-output TP flags.
    scored: list[tuple[float, bool]] = []
    for tracks, gt in frames:
        tp, fps, _ = match_to_gt(tracks, gt, dist_threshold)
        scored.extend((pred.confidence, True) for pred, _, _ in tp)
        scored.extend((pred.confidence, False) for pred in fps)
    scored.sort(key=lambda item: -item[0])

    motas = []
    for target in RECALL_GRID:
        if target == 0.0 or total_gt == 0:
            motas.append(mota if total_gt else 0.0)
            continue
        threshold = None
        tp_cum = 0
        for conf, is_tp in scored:
            tp_cum += is_tp
            if tp_cum / total_gt >= target - 1e-12:
                threshold = conf
                break
        if threshold is None:
            motas.append(0.0)
            continue
        sfp, sfn, sidsw, sgt, _, _ = _tracking_pass(frames, dist_threshold, threshold)
        motas.append(_mota(sfp, sfn, sidsw, sgt))
    return mota, float(np.mean(motas)), idsw


def duplicate_rate(
    frames: Sequence[Frame], dist_threshold: float = TRACKING_THRESHOLD
) -> float:
    """Fraction of GT picked up more than once: extra same-class predictions
    within the threshold of an already-matched object, over total GT."""
    duplicates = 0
    total_gt = 0
    for tracks, gt in frames:
        total_gt += len(gt.objects)
        tp, fp, _ = match_to_gt(tracks, gt, dist_threshold)
        matched = [(g, pred.class_id) for pred, g, _ in tp]
        for pred in fp:
            hit = any(
                cls == pred.class_id
                and math.hypot(pred.state.x - g.state.x, pred.state.y - g.state.y)
                <= dist_threshold
                for g, cls in matched
            )
            duplicates += hit
    return duplicates / total_gt if total_gt else 0.0


def run_frames(run: RunResult) -> list[Frame]:
    return [
        (rec.tracks, FrameGroundTruth(rec.t_us, rec.ground_truth))
        for rec in run.frames
    ]


def compute_metrics(
    run: RunResult, thresholds: Sequence[float] = DETECTION_THRESHOLDS
) -> MetricsReport:
    """Full metric report for one scenario run."""
    frames = run_frames(run)
    curves = {}
    ap_per = {}
    for thr in thresholds:
        recalls, precisions = _pr_curve(frames, thr)
        curves[thr] = (tuple(recalls), tuple(precisions))
        ap_per[thr] = _interpolated_ap(recalls, precisions)
    mota, amota, idsw = compute_tracking(frames)
    _, _, _, _, _, tp_dists = _tracking_pass(frames, TRACKING_THRESHOLD)
    rmse = float(np.sqrt(np.mean(np.square(tp_dists)))) if tp_dists else math.nan
    prefusion = [rec.coop_prefusion_err for rec in run.frames if not math.isnan(rec.coop_prefusion_err)]
    return MetricsReport(
        ap=float(np.mean(list(ap_per.values()))),
        ap_per_threshold=ap_per,
        pr_curves=curves,
        mota_like=mota,
        amota_like=amota,
        id_switches=idsw,
        duplicate_rate=duplicate_rate(frames),
        rmse_pos=rmse,
        bps_sent=run.bps_sent,
        bps_received=run.bps_received,
        coop_prefusion_err=float(np.mean(prefusion)) if prefusion else math.nan,
    )


# ---------------------------------------------------------------------------
# Sweeps


def _range_point(args: tuple[ScenarioConfig, float]) -> dict:
    base_cfg, r_int = args
    cfg = replace(base_cfg, pipeline=replace(base_cfg.pipeline, r_int=r_int))
    metrics = compute_metrics(run_scenario(cfg))
    return {
        "r_int": r_int,
        "ap": metrics.ap,
        "amota_like": metrics.amota_like,
        "duplicate_rate": metrics.duplicate_rate,
    }


def sweep_interaction_range(
    base_cfg: ScenarioConfig,
    r_values: Sequence[float] = DEFAULT_RANGE_SWEEP,
    jobs: int = 1,
) -> list[dict]:
    """One row per interaction range, ascending; every run shares the seed."""
    if not r_values:
        raise ValueError("r_values must not be empty")
    points = [(base_cfg, float(r)) for r in sorted(r_values)]
    return _map_points(_range_point, points, jobs)


def _latency_point(args: tuple[ScenarioConfig, float, bool]) -> dict:
    base_cfg, latency_ms, compensated = args
    cfg = replace(
        base_cfg,
        channel=replace(base_cfg.channel, latency_ms=latency_ms),
        pipeline=replace(base_cfg.pipeline, compensate_latency=compensated),
    )
    metrics = compute_metrics(run_scenario(cfg))
    return {
        "latency_ms": latency_ms,
        "compensated": int(compensated),
        "ap": metrics.ap,
        "rmse": metrics.rmse_pos,
        "coop_prefusion_err": metrics.coop_prefusion_err,
    }


def sweep_latency(
    base_cfg: ScenarioConfig,
    latencies_ms: Sequence[float] = DEFAULT_LATENCY_SWEEP_MS,
    compensation: str = "both",
    jobs: int = 1,
) -> list[dict]:
    """Rows per latency (ascending), compensated first when running both."""
    if not latencies_ms:
        raise ValueError("latencies_ms must not be empty")
    if compensation not in ("both", "on", "off"):
        raise ValueError("compensation must be 'both', 'on', or 'off'")
    modes = {"both": (True, False), "on": (True,), "off": (False,)}[compensation]
    points = [
        (base_cfg, float(latency), mode)
        for latency in sorted(latencies_ms)
        for mode in modes
    ]
    return _map_points(_latency_point, points, jobs)


def _map_points(worker, points, jobs: int) -> list[dict]:
    if jobs <= 1 or len(points) <= 1:
        return [worker(p) for p in points]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, points))


def write_csv(path, columns: Sequence[str], rows: Sequence[dict]) -> None:
    """Deterministic CSV: fixed column order, repr-faithful floats."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row[c] for c in columns])


def metrics_row(metrics: MetricsReport) -> dict:
    return {
        "ap": metrics.ap,
        "mota_like": metrics.mota_like,
        "amota_like": metrics.amota_like,
        "id_switches": metrics.id_switches,
        "duplicate_rate": metrics.duplicate_rate,
        "rmse_pos": metrics.rmse_pos,
        "bps_sent": metrics.bps_sent,
        "bps_received": metrics.bps_received,
    }
