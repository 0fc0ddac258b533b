"""BEV center-distance mAP for the pedestrian class.

Matching uses ground-plane center distance instead of IoU: per sample,
detections are taken in descending score and greedily claim the nearest
unmatched ground truth within the distance gate. AP follows the
nuScenes-style curve (recall clipped at 0.1, normalized by 1/0.9) with a
101-point VOC variant behind a flag; the final score averages AP over
the {0.5, 1, 2, 4} m gates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DISTANCE_THRESHOLDS = (0.5, 1.0, 2.0, 4.0)
CONVENTIONS = ("nuscenes", "voc101")
MIN_RECALL = 0.1


@dataclass(frozen=True)
class Detection:
    sample_id: str
    x: float
    y: float
    score: float


@dataclass(frozen=True)
class GroundTruth:
    sample_id: str
    x: float
    y: float


@dataclass(frozen=True)
class ApResult:
    ap_per_threshold: dict[float, float]
    map_score: float


def _det_order(d: Detection):
    # Content-based tie break keeps results invariant to input order.
    return (-d.score, d.x, d.y, d.sample_id)


def match_detections(dets: list[Detection], gts: list[GroundTruth],
                     threshold: float) -> tuple[np.ndarray, np.ndarray]:
    """Greedy per-sample matching; returns (tp, fp) aligned with `dets`."""
    order = sorted(range(len(dets)), key=lambda i: _det_order(dets[i]))
    gt_by_sample: dict[str, list[GroundTruth]] = {}
    for g in gts:
        gt_by_sample.setdefault(g.sample_id, []).append(g)
    for sid in gt_by_sample:
        gt_by_sample[sid].sort(key=lambda g: (g.x, g.y))
    taken: dict[str, np.ndarray] = {
        sid: np.zeros(len(v), dtype=bool) for sid, v in gt_by_sample.items()}

    tp = np.zeros(len(dets), dtype=bool)
    fp = np.zeros(len(dets), dtype=bool)
    for i in order:
        d = dets[i]
        cands = gt_by_sample.get(d.sample_id)
        if not cands:
            fp[i] = True
            continue
        used = taken[d.sample_id]
        best_j, best_dist = -1, np.inf
        for j, g in enumerate(cands):
            if used[j]:
                continue
            dist = float(np.hypot(d.x - g.x, d.y - g.y))
            if dist < best_dist:
                best_j, best_dist = j, dist
        if best_j >= 0 and best_dist <= threshold:
            used[best_j] = True
            tp[i] = True
        else:
            fp[i] = True
    return tp, fp


def average_precision(tp: np.ndarray, scores: np.ndarray, n_gt: int,
                      convention: str = "nuscenes",
                      tie_keys: list | None = None) -> float:
    """AP from TP flags and scores against n_gt ground truths.

    nuscenes: AP = (1/0.9) * integral over recall in (0.1, 1] of the
    monotone non-increasing precision envelope, integrated exactly over
    its constant segments. voc101: mean envelope precision over the 101
    recall points {0, 0.01, ..., 1}.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    if n_gt <= 0:
        return 0.0
    tp = np.asarray(tp, dtype=bool)
    scores = np.asarray(scores, dtype=np.float64)
    if tie_keys is None:
        order = np.argsort(-scores, kind="stable")
    else:
        order = sorted(range(len(scores)), key=lambda i: tie_keys[i])
    tp = tp[order]
    cum_tp = np.cumsum(tp)
    recall = cum_tp / n_gt
    precision = cum_tp / np.arange(1, len(tp) + 1)

    if len(tp) == 0:
        return 0.0
    # Monotone non-increasing envelope over recall.
    env = np.maximum.accumulate(precision[::-1])[::-1]

    if convention == "voc101":
        grid = np.linspace(0.0, 1.0, 101)
        vals = np.zeros_like(grid)
        for k, r in enumerate(grid):
            idx = np.nonzero(recall >= r - 1e-12)[0]
            vals[k] = env[idx[0]] if len(idx) else 0.0
        return float(vals.mean())

    # Exact piecewise integration: the envelope is constant on each
    # recall segment (recall[i-1], recall[i]].
    ap = 0.0
    prev = 0.0
    for i in range(len(tp)):
        r = recall[i]
        if r <= prev:
            continue
        lo = max(prev, MIN_RECALL)
        hi = r
        if hi > lo:
            ap += (hi - lo) * env[i]
        prev = r
    return float(ap / (1.0 - MIN_RECALL))


def map_score(aps: dict[float, float]) -> float:
    """Arithmetic mean over the four distance gates."""
    missing = [t for t in DISTANCE_THRESHOLDS if t not in aps]
    if missing:
        raise ValueError(f"missing thresholds: {missing}")
    return float(np.mean([aps[t] for t in DISTANCE_THRESHOLDS]))


def evaluate(dets: list[Detection], gts: list[GroundTruth],
             thresholds: tuple[float, ...] = DISTANCE_THRESHOLDS,
             convention: str = "nuscenes") -> ApResult:
    """Full evaluation: match at each gate, integrate AP, average."""
    aps = {}
    n_gt = len(gts)
    scores = np.array([d.score for d in dets], dtype=np.float64)
    keys = [_det_order(d) for d in dets]
    for th in thresholds:
        tp, _ = match_detections(dets, gts, th)
        aps[float(th)] = average_precision(tp, scores, n_gt, convention,
                                           tie_keys=keys)
    return ApResult(ap_per_threshold=aps,
                    map_score=float(np.mean([aps[float(t)] for t in thresholds])))


def load_detections(path) -> list[Detection]:
    """One detection per line: `sample_id x y score`; `#` comments."""
    out = []
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(f"{path}:{ln}: expected 4 fields, got {len(parts)}")
            sid, x, y, s = parts
            score = float(s)
            if not 0.0 <= score <= 1.0:
                raise ValueError(f"{path}:{ln}: score {score} outside [0, 1]")
            out.append(Detection(sid, float(x), float(y), score))
    return out


def load_ground_truth(path) -> list[GroundTruth]:
    """One ground truth per line: `sample_id x y`; `#` comments."""
    out = []
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{ln}: expected 3 fields, got {len(parts)}")
            sid, x, y = parts
            out.append(GroundTruth(sid, float(x), float(y)))
    return out


def format_report(result: ApResult) -> str:
    """Table-shaped text report of per-gate AP and the mean."""
    lines = ["threshold    AP"]
    for th in sorted(result.ap_per_threshold):
        lines.append(f"{th:>6.1f} m    {result.ap_per_threshold[th]:.4f}")
    lines.append(f"   mAP       {result.map_score:.4f}")
    return "\n".join(lines)
