"""Shared builders and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from framesieve import BACKGROUND, Frame, Image, InstanceMask, SemanticMask


def paint_frame(
    width: int = 64,
    height: int = 48,
    rects: tuple = (),
    frame_id: int = 0,
    timestamp: float = 0.0,
    base_class: int = BACKGROUND,
    rgb_seed: int | None = None,
):
    """Build a frame by painting (instance_id, class_id, x0, y0, x1, y1) rects in order.

    Later rects overdraw earlier ones, like the renderer. The RGB layer is
    flat noise (seeded) or zeros, with a per-instance solid color on top.
    """
    if rgb_seed is None:
        rgb = np.zeros((height, width, 3), dtype=np.uint8)
    else:
        rgb = np.random.default_rng(rgb_seed).integers(0, 256, (height, width, 3), dtype=np.uint8)
    sem = np.full((height, width), base_class, dtype=np.uint8)
    inst = np.zeros((height, width), dtype=np.int32)
    for instance_id, class_id, x0, y0, x1, y1 in rects:
        color = ((37 * instance_id) % 256, (91 * instance_id) % 256, (53 * instance_id) % 256)
        rgb[y0:y1, x0:x1] = color
        sem[y0:y1, x0:x1] = class_id
        inst[y0:y1, x0:x1] = instance_id
    return Frame(
        frame_id=frame_id,
        timestamp=timestamp,
        rgb=Image(rgb),
        semantic=SemanticMask(sem),
        instance=InstanceMask(inst),
    )


def noise_frame(seed: int, width: int = 48, height: int = 32, frame_id: int = 0, timestamp: float = 0.0):
    """A frame whose RGB is pure seeded noise (empty masks)."""
    return paint_frame(width, height, frame_id=frame_id, timestamp=timestamp, rgb_seed=seed)


def single_window_q(x: np.ndarray, y: np.ndarray) -> float:
    """Independent quality-index evaluation for one window pair."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    n = x.size
    mx, my = x.mean(), y.mean()
    vx = ((x - mx) ** 2).sum() / (n - 1)
    vy = ((y - my) ** 2).sum() / (n - 1)
    cov = ((x - mx) * (y - my)).sum() / (n - 1)
    den = (vx + vy) * (mx * mx + my * my)
    if den == 0:
        return 1.0 if np.array_equal(x, y) else 0.0
    return 4 * cov * mx * my / den


def windowed_q_oracle(x: np.ndarray, y: np.ndarray, b: int) -> float:
    """Brute-force per-tile mean: loop every tile, skip tiles under 2 pixels."""
    h, w = x.shape
    values = []
    for r0 in range(0, h, b):
        for c0 in range(0, w, b):
            xt = x[r0 : r0 + b, c0 : c0 + b]
            yt = y[r0 : r0 + b, c0 : c0 + b]
            if xt.size < 2:
                continue
            values.append(single_window_q(xt, yt))
    return float(np.mean(values))


def flood_merged_oracle(frame: Frame, class_id: int) -> int:
    """Pure-python BFS over 4-neighbors: count same-class components with 2+ ids."""
    sem = frame.semantic.class_ids
    inst = frame.instance.instance_ids
    h, w = sem.shape
    seen = np.zeros((h, w), dtype=bool)
    merged = 0
    for sy in range(h):
        for sx in range(w):
            if seen[sy, sx] or sem[sy, sx] != class_id:
                continue
            ids = set()
            stack = [(sy, sx)]
            seen[sy, sx] = True
            while stack:
                y, x = stack.pop()
                if inst[y, x] > 0:
                    ids.add(int(inst[y, x]))
                for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
                    if 0 <= ny < h and 0 <= nx < w and not seen[ny, nx] and sem[ny, nx] == class_id:
                        seen[ny, nx] = True
                        stack.append((ny, nx))
            if len(ids) >= 2:
                merged += 1
    return merged


def greedy_match_oracle(preds, truths, threshold):
    """Independent greedy matcher: rank by confidence (ties by x_min, y_min),
    each prediction takes the unmatched truth with max IoU >= threshold
    (lowest index on ties). Returns flags in rank order plus the fn count."""

    def box_iou(a, b):
        ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
        iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
        if ix <= 0 or iy <= 0:
            return 0.0
        inter = ix * iy
        return inter / (a.area + b.area - inter)

    ranked = sorted(
        range(len(preds)),
        key=lambda i: (-preds[i].confidence, preds[i].box.x_min, preds[i].box.y_min, i),
    )
    used = set()
    flags = []
    for i in ranked:
        best, best_iou = None, 0.0
        for j in range(len(truths)):
            if j in used:
                continue
            value = box_iou(preds[i].box, truths[j].box)
            if value >= threshold and value > best_iou:
                best, best_iou = j, value
        if best is None:
            flags.append(False)
        else:
            used.add(best)
            flags.append(True)
    return ranked, flags, len(truths) - len(used)


def ap_allpoints_oracle(flags, total_truths) -> float:
    """Envelope integral over distinct achieved recalls, from first principles."""
    if total_truths == 0:
        return 1.0 if not flags else 0.0
    points = []
    tp = 0
    for rank, flag in enumerate(flags, start=1):
        tp += bool(flag)
        points.append((tp / total_truths, tp / rank))
    ap = 0.0
    previous = 0.0
    for recall in sorted({r for r, _ in points}):
        if recall == 0.0:
            continue
        envelope = max(p for r, p in points if r >= recall)
        ap += (recall - previous) * envelope
        previous = recall
    return ap


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
