"""Scoring detector output: IoU, greedy matching, AP, and the mAP sweep.

Three toy detectors against the same ground truth: a perfect one, one
with jittered boxes, and one that also hallucinates. Tighter IoU
thresholds punish jitter, which is exactly what separates the 0.50:0.95
sweep from mAP at 0.5.
"""

import numpy as np

from framesieve import (
    Detection,
    EvalConfig,
    PixelBox,
    TruthBox,
    evaluate,
    extract_instances,
    generate,
    iou,
    preset_config,
)

print("iou on half-open boxes:")
a, b = PixelBox(0, 0, 2, 2), PixelBox(1, 1, 3, 3)
print(f"  identical -> {iou(a, a)}, overlapping corners -> {iou(a, b):.4f}, "
      f"disjoint -> {iou(a, PixelBox(10, 10, 12, 12))}")

# Ground truth from a generated scene, classes mapped to export ids.
config = preset_config("dense_junction", seed=9, n_frames=30)
truths = []
for gt in generate(config):
    for record in extract_instances(gt.frame):
        truths.append(TruthBox(gt.frame.frame_id, record.class_id, record.box))
print(f"\nground truth: {len(truths)} boxes over 30 frames")

rng = np.random.default_rng(1)


def jittered(truth, dx, dy, conf):
    box = truth.box
    return Detection(
        truth.frame_id,
        truth.class_id,
        PixelBox(box.x_min + dx, box.y_min + dy, box.x_max + dx, box.y_max + dy),
        conf,
    )


perfect = [Detection(t.frame_id, t.class_id, t.box, 1.0) for t in truths]
jitter = [jittered(t, int(rng.integers(0, 4)), int(rng.integers(0, 3)), float(rng.uniform(0.5, 1.0)))
          for t in truths]
noisy = jitter + [
    Detection(t.frame_id, t.class_id, PixelBox(1 + i % 5, 1, 15 + i % 5, 12), float(rng.uniform(0.1, 0.6)))
    for i, t in enumerate(truths[::4])
]

config_eval = EvalConfig(iou_threshold=0.5, ap_mode="101-point", confidence_cut=0.25)
print(f"\n{'detector':>10} {'mAP@0.5':>9} {'mAP@.5:.95':>11} {'P':>7} {'R':>7} {'F1':>7}")
for name, preds in (("perfect", perfect), ("jittered", jitter), ("noisy", noisy)):
    report = evaluate(preds, truths, config_eval)
    print(
        f"{name:>10} {report.mean_ap:>9.4f} {report.mean_ap_sweep:>11.4f} "
        f"{report.precision:>7.4f} {report.recall:>7.4f} {report.f1:>7.4f}"
    )

print("\nthe sweep is never above mAP@0.5: matching only gets stricter with IoU.")
