"""Ground-truth generation from segmentation masks.

Bounding boxes are drawn around the visible pixels of each instance
(after occlusion), which is all the masks can testify to. Touching
same-class instances are always split by instance id; the merge
pathology stays measurable through the quality module.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .boxes import PixelBox, YoloLabel, pixel_box_to_yolo
from .frames import Frame
from .palette import DEFAULT_EXPORT_CLASS_MAP
from .quality import DEFAULT_MIN_AREA


class IntegrityError(ValueError):
    """Mask inconsistency: one instance id spanning multiple classes."""


class LabelFormatError(ValueError):
    """Malformed or out-of-range content in a label file."""


@dataclass(frozen=True)
class InstanceRecord:
    """One labeled instance: id, class, visible-pixel box, area, occlusion."""

    instance_id: int
    class_id: int
    box: PixelBox
    pixel_area: int
    occlusion: float

    def __post_init__(self) -> None:
        if self.pixel_area < 1:
            raise ValueError(f"instance {self.instance_id} has no visible pixels")
        if self.pixel_area > self.box.area:
            raise ValueError(
                f"instance {self.instance_id}: area {self.pixel_area} exceeds box area {self.box.area}"
            )
        if not 0.0 <= self.occlusion <= 1.0:
            raise ValueError(f"occlusion {self.occlusion} outside [0, 1]")


def extract_instances(frame: Frame, min_area: int = DEFAULT_MIN_AREA) -> list[InstanceRecord]:
    """Extract one record per visible instance with at least min_area pixels.

    Output is ordered by ascending instance id. The class of an instance
    is read from the semantic mask under its pixels; an instance spanning
    more than one class raises IntegrityError.
    """
    inst = frame.instance.instance_ids
    sem = frame.semantic.class_ids
    ids, counts = np.unique(inst[inst > 0], return_counts=True)
    records = []
    for instance_id, area in zip(ids, counts):
        if area < min_area:
            continue
        mask = inst == instance_id
        classes = np.unique(sem[mask])
        if len(classes) != 1:
            raise IntegrityError(
                f"instance {int(instance_id)} maps to classes {classes.tolist()}"
            )
        ys, xs = np.nonzero(mask)
        box = PixelBox(int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)
        records.append(
            InstanceRecord(
                instance_id=int(instance_id),
                class_id=int(classes[0]),
                box=box,
                pixel_area=int(area),
                occlusion=1.0 - int(area) / box.area,
            )
        )
    return records


def to_yolo_labels(
    records: Iterable[InstanceRecord],
    width: int,
    height: int,
    class_map: dict[int, int] = DEFAULT_EXPORT_CLASS_MAP,
) -> list[YoloLabel]:
    """Convert instance records to normalized labels via the export class map."""
    labels = []
    for record in records:
        if record.class_id not in class_map:
            raise ValueError(f"class id {record.class_id} not in export class map {class_map}")
        cx, cy, w, h = pixel_box_to_yolo(record.box, width, height)
        labels.append(YoloLabel(class_map[record.class_id], cx, cy, w, h))
    return labels


def write_label_file(labels: Sequence[YoloLabel], path: str | Path) -> None:
    """Write labels as "class cx cy w h" lines, 6 decimals, one per label."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        f"{lb.class_id} {lb.cx:.6f} {lb.cy:.6f} {lb.w:.6f} {lb.h:.6f}\n" for lb in labels
    ]
    path.write_text("".join(lines))


def read_label_file(path: str | Path) -> list[YoloLabel]:
    """Parse a label file; inverse of write_label_file up to 1e-6 per field."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such label file: {path}")
    labels = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 5:
            raise LabelFormatError(f"{path}:{lineno}: expected 5 fields, got {len(fields)}")
        try:
            class_id = int(fields[0])
            cx, cy, w, h = (float(f) for f in fields[1:])
        except ValueError as exc:
            raise LabelFormatError(f"{path}:{lineno}: {exc}") from None
        try:
            labels.append(YoloLabel(class_id, cx, cy, w, h))
        except ValueError as exc:
            raise LabelFormatError(f"{path}:{lineno}: {exc}") from None
    return labels
