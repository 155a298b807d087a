"""Detection-quality metrics: IoU, greedy matching, AP, and mAP sweeps.

Matching follows the convention behind published detector numbers:
predictions are ranked by descending confidence (ties broken by box
x_min, then y_min, then input order) and greedily matched to the
unmatched ground truth with the highest IoU at or above the threshold.
AP integrates the precision envelope over recall, either exactly over
every rank ("all-points") or sampled at 101 recall levels ("101-point",
the default for the 0.50:0.95 sweep).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .boxes import PixelBox, pixel_box_to_yolo, yolo_to_pixel_box

AP_MODES = ("all-points", "101-point")

# IoU thresholds 0.50, 0.55, ..., 0.95 for the sweep metric.
SWEEP_THRESHOLDS = tuple(0.5 + 0.05 * i for i in range(10))


class PredictionFormatError(ValueError):
    """Malformed or out-of-range content in a prediction file."""


@dataclass(frozen=True)
class Detection:
    """One predicted box with confidence."""

    frame_id: int
    class_id: int
    box: PixelBox
    confidence: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")


@dataclass(frozen=True)
class TruthBox:
    """One ground-truth box."""

    frame_id: int
    class_id: int
    box: PixelBox


@dataclass(frozen=True)
class EvalConfig:
    iou_threshold: float = 0.5
    ap_mode: str = "101-point"
    confidence_cut: float = 0.25

    def __post_init__(self) -> None:
        if not 0.0 < self.iou_threshold <= 1.0:
            raise ValueError(f"iou_threshold must be in (0, 1], got {self.iou_threshold}")
        if self.ap_mode not in AP_MODES:
            raise ValueError(f"ap_mode must be one of {AP_MODES}, got {self.ap_mode!r}")
        if not 0.0 <= self.confidence_cut <= 1.0:
            raise ValueError(f"confidence_cut must be in [0, 1], got {self.confidence_cut}")


@dataclass(frozen=True)
class MatchResult:
    """Outcome of greedy matching inside one frame/class group."""

    order: tuple[int, ...]  # prediction indices, ranked
    tp_flags: tuple[bool, ...]  # aligned with order
    matched_truth: tuple[int | None, ...]  # truth index per ranked prediction
    fn: int

    @property
    def tp(self) -> int:
        return sum(self.tp_flags)

    @property
    def fp(self) -> int:
        return len(self.tp_flags) - self.tp


@dataclass
class EvalReport:
    """Per-class AP at the primary threshold plus aggregate metrics."""

    per_class_ap: dict[int, float]
    mean_ap: float
    mean_ap_sweep: float
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    iou_threshold: float
    confidence_cut: float
    ap_mode: str

    def csv_rows(self) -> list[list]:
        rows = [["metric", "class_id", "value"]]
        for class_id in sorted(self.per_class_ap):
            rows.append([f"ap@{self.iou_threshold:g}", class_id, repr(self.per_class_ap[class_id])])
        rows.append([f"map@{self.iou_threshold:g}", "", repr(self.mean_ap)])
        rows.append(["map@0.5:0.95", "", repr(self.mean_ap_sweep)])
        rows.append(["precision", "", repr(self.precision)])
        rows.append(["recall", "", repr(self.recall)])
        rows.append(["f1", "", repr(self.f1)])
        rows.append(["tp", "", self.tp])
        rows.append(["fp", "", self.fp])
        rows.append(["fn", "", self.fn])
        return rows

    def write_csv(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as handle:
            csv.writer(handle).writerows(self.csv_rows())

    def format_table(self) -> str:
        lines = [
            f"{'metric':<18} {'value':>12}",
            f"{'mAP@' + format(self.iou_threshold, 'g'):<18} {self.mean_ap:>12.6f}",
            f"{'mAP@0.5:0.95':<18} {self.mean_ap_sweep:>12.6f}",
            f"{'precision':<18} {self.precision:>12.6f}",
            f"{'recall':<18} {self.recall:>12.6f}",
            f"{'f1':<18} {self.f1:>12.6f}",
            f"{'tp/fp/fn':<18} {f'{self.tp}/{self.fp}/{self.fn}':>12}",
        ]
        for class_id in sorted(self.per_class_ap):
            lines.append(f"{f'ap[class {class_id}]':<18} {self.per_class_ap[class_id]:>12.6f}")
        return "\n".join(lines)


def iou(a: PixelBox, b: PixelBox) -> float:
    """Intersection over union of two half-open pixel boxes; 0 when disjoint."""
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.area + b.area - inter
    return inter / union


def match_detections(
    preds: Sequence[Detection],
    truths: Sequence[TruthBox],
    iou_threshold: float,
) -> MatchResult:
    """Greedy confidence-ranked matching within one frame and class.

    Each prediction, in rank order, takes the unmatched truth with the
    highest IoU at or above the threshold (tie: lowest truth index).
    """
    keys = {(p.frame_id, p.class_id) for p in preds} | {(t.frame_id, t.class_id) for t in truths}
    if len(keys) > 1:
        raise ValueError(f"matching expects one frame and one class, got {sorted(keys)}")
    order = sorted(
        range(len(preds)),
        key=lambda i: (-preds[i].confidence, preds[i].box.x_min, preds[i].box.y_min, i),
    )
    taken = [False] * len(truths)
    tp_flags = []
    matched = []
    for i in order:
        best_j = None
        best_iou = 0.0
        for j, truth in enumerate(truths):
            if taken[j]:
                continue
            value = iou(preds[i].box, truth.box)
            if value >= iou_threshold and value > best_iou:
                best_iou = value
                best_j = j
        if best_j is None:
            tp_flags.append(False)
            matched.append(None)
        else:
            taken[best_j] = True
            tp_flags.append(True)
            matched.append(best_j)
    fn = len(truths) - sum(taken)
    return MatchResult(tuple(order), tuple(tp_flags), tuple(matched), fn)


def average_precision(
    tp_flags: Sequence[bool],
    confidences: Sequence[float],
    total_truths: int,
    mode: str = "all-points",
) -> float:
    """Area under the precision-recall curve for one class.

    Flags and confidences must align one-to-one; predictions are ranked
    by descending confidence (stable, so equal confidences keep their
    input order). With no ground truth the score is 1 when there are
    also no predictions and 0 otherwise.
    """
    if len(tp_flags) != len(confidences):
        raise ValueError(
            f"flags and confidences disagree in length: {len(tp_flags)} vs {len(confidences)}"
        )
    if total_truths < 0:
        raise ValueError(f"total_truths must be non-negative, got {total_truths}")
    if mode not in AP_MODES:
        raise ValueError(f"mode must be one of {AP_MODES}, got {mode!r}")
    if total_truths == 0:
        return 1.0 if not tp_flags else 0.0
    if not tp_flags:
        return 0.0

    order = sorted(range(len(tp_flags)), key=lambda i: -confidences[i])
    flags = np.array([bool(tp_flags[i]) for i in order])
    tp_cum = np.cumsum(flags)
    ranks = np.arange(1, len(flags) + 1)
    precision = tp_cum / ranks
    recall = tp_cum / total_truths
    # Envelope: best precision achievable at this recall or beyond.
    envelope = np.maximum.accumulate(precision[::-1])[::-1]

    if mode == "all-points":
        # Each true positive lifts recall by exactly 1/total_truths, so the
        # integral is the mean envelope precision over true-positive ranks
        # (missed truths contribute zero).
        return float(envelope[flags].sum() / total_truths)
    grid = np.linspace(0.0, 1.0, 101)
    # For each grid recall, the envelope at the first point reaching it.
    idx = np.searchsorted(recall, grid, side="left")
    values = np.where(idx < len(envelope), envelope[np.minimum(idx, len(envelope) - 1)], 0.0)
    return float(values.mean())


def _group(items: Iterable, key) -> dict:
    grouped: dict = {}
    for item in items:
        grouped.setdefault(key(item), []).append(item)
    return grouped


def _class_ap(
    preds: Sequence[Detection],
    truths: Sequence[TruthBox],
    threshold: float,
    mode: str,
) -> float:
    """AP for one class across frames at one IoU threshold."""
    preds_by_frame = _group(preds, lambda p: p.frame_id)
    truths_by_frame = _group(truths, lambda t: t.frame_id)
    scored: list[tuple[float, bool]] = []
    for frame_id in sorted(preds_by_frame):
        frame_preds = preds_by_frame[frame_id]
        frame_truths = truths_by_frame.get(frame_id, [])
        result = match_detections(frame_preds, frame_truths, threshold)
        for rank, pred_index in enumerate(result.order):
            scored.append((frame_preds[pred_index].confidence, result.tp_flags[rank]))
    flags = [flag for _, flag in scored]
    confidences = [conf for conf, _ in scored]
    return average_precision(flags, confidences, len(truths), mode)


def evaluate(
    preds: Sequence[Detection],
    truths: Sequence[TruthBox],
    config: EvalConfig = EvalConfig(),
) -> EvalReport:
    """Full report: per-class AP, mAP at the primary threshold, the
    0.50:0.95 sweep, and precision/recall/F1 at the confidence cut."""
    truth_classes = sorted({t.class_id for t in truths})
    preds_by_class = _group(preds, lambda p: p.class_id)
    truths_by_class = _group(truths, lambda t: t.class_id)

    per_class_ap: dict[int, float] = {}
    for class_id in truth_classes:
        per_class_ap[class_id] = _class_ap(
            preds_by_class.get(class_id, []),
            truths_by_class.get(class_id, []),
            config.iou_threshold,
            config.ap_mode,
        )
    mean_ap = float(np.mean(list(per_class_ap.values()))) if per_class_ap else 0.0

    sweep_maps = []
    for threshold in SWEEP_THRESHOLDS:
        if not truth_classes:
            sweep_maps.append(0.0)
            continue
        aps = [
            _class_ap(
                preds_by_class.get(class_id, []),
                truths_by_class.get(class_id, []),
                threshold,
                config.ap_mode,
            )
            for class_id in truth_classes
        ]
        sweep_maps.append(float(np.mean(aps)))
    mean_ap_sweep = float(np.mean(sweep_maps)) if truth_classes else 0.0

    # Counts at the confidence cut, over every class that has predictions
    # or truths (classes without ground truth still contribute FPs).
    cut_preds = [p for p in preds if p.confidence >= config.confidence_cut]
    cut_by_fc = _group(cut_preds, lambda p: (p.frame_id, p.class_id))
    truths_by_fc = _group(truths, lambda t: (t.frame_id, t.class_id))
    tp = fp = 0
    for key, frame_preds in cut_by_fc.items():
        result = match_detections(frame_preds, truths_by_fc.get(key, []), config.iou_threshold)
        tp += result.tp
        fp += result.fp
    fn = len(truths) - tp
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0

    return EvalReport(
        per_class_ap=per_class_ap,
        mean_ap=mean_ap,
        mean_ap_sweep=mean_ap_sweep,
        precision=precision,
        recall=recall,
        f1=f1,
        tp=int(tp),
        fp=int(fp),
        fn=int(fn),
        iou_threshold=config.iou_threshold,
        confidence_cut=config.confidence_cut,
        ap_mode=config.ap_mode,
    )


def write_prediction_file(
    detections: Sequence[Detection], path: str | Path, width: int, height: int
) -> None:
    """Write predictions as "class cx cy w h conf" lines, 6 decimals."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for det in detections:
        cx, cy, w, h = pixel_box_to_yolo(det.box, width, height)
        lines.append(f"{det.class_id} {cx:.6f} {cy:.6f} {w:.6f} {h:.6f} {det.confidence:.6f}\n")
    path.write_text("".join(lines))


def read_prediction_file(
    path: str | Path, frame_id: int, width: int, height: int
) -> list[Detection]:
    """Parse a prediction file back into detections for one frame."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such prediction file: {path}")
    detections = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 6:
            raise PredictionFormatError(f"{path}:{lineno}: expected 6 fields, got {len(fields)}")
        try:
            class_id = int(fields[0])
            cx, cy, w, h, conf = (float(f) for f in fields[1:])
        except ValueError as exc:
            raise PredictionFormatError(f"{path}:{lineno}: {exc}") from None
        try:
            box = yolo_to_pixel_box((cx, cy, w, h), width, height)
            detections.append(Detection(frame_id, class_id, box, conf))
        except ValueError as exc:
            raise PredictionFormatError(f"{path}:{lineno}: {exc}") from None
    return detections
