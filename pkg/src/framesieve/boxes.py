"""Pixel-space bounding boxes and normalized label geometry.

Boxes use half-open pixel intervals [min, max) so that
area = (x_max - x_min) * (y_max - y_min) with no off-by-one ambiguity.
"""

from __future__ import annotations

from dataclasses import dataclass

# Slack allowed on normalized coordinates at the [0, 1] edges, matching the
# precision of serialized label files.
EDGE_TOL = 1e-6

Geometry = tuple[float, float, float, float]


@dataclass(frozen=True)
class PixelBox:
    """Axis-aligned box, inclusive mins and exclusive maxes, in pixels."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self) -> None:
        for name in ("x_min", "y_min", "x_max", "y_max"):
            value = getattr(self, name)
            if value != int(value):
                raise ValueError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.x_min < 0 or self.y_min < 0:
            raise ValueError(f"box mins must be non-negative: {self}")
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise ValueError(f"box must have positive extent: {self}")

    @property
    def width(self) -> int:
        return self.x_max - self.x_min

    @property
    def height(self) -> int:
        return self.y_max - self.y_min

    @property
    def area(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class YoloLabel:
    """One annotation: class id plus box center/size normalized to [0, 1]."""

    class_id: int
    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self) -> None:
        if self.class_id < 0:
            raise ValueError(f"class id must be non-negative, got {self.class_id}")
        if not (0.0 < self.w <= 1.0 + EDGE_TOL) or not (0.0 < self.h <= 1.0 + EDGE_TOL):
            raise ValueError(f"label size out of (0, 1]: w={self.w}, h={self.h}")
        if not (0.0 <= self.cx <= 1.0) or not (0.0 <= self.cy <= 1.0):
            raise ValueError(f"label center out of [0, 1]: cx={self.cx}, cy={self.cy}")
        for edge in (self.cx - self.w / 2, self.cy - self.h / 2):
            if edge < -EDGE_TOL:
                raise ValueError(f"label extends below 0: {self}")
        for edge in (self.cx + self.w / 2, self.cy + self.h / 2):
            if edge > 1.0 + EDGE_TOL:
                raise ValueError(f"label extends beyond 1: {self}")

    @property
    def geometry(self) -> Geometry:
        return (self.cx, self.cy, self.w, self.h)


def pixel_box_to_yolo(box: PixelBox, width: int, height: int) -> Geometry:
    """Convert a pixel box to normalized (cx, cy, w, h).

    The box must lie inside a width x height raster.
    """
    if width < 1 or height < 1:
        raise ValueError(f"raster dimensions must be positive, got {width}x{height}")
    if box.x_max > width or box.y_max > height:
        raise ValueError(f"box {box} exceeds raster bounds {width}x{height}")
    cx = (box.x_min + box.x_max) / (2 * width)
    cy = (box.y_min + box.y_max) / (2 * height)
    w = (box.x_max - box.x_min) / width
    h = (box.y_max - box.y_min) / height
    return (cx, cy, w, h)


def yolo_to_pixel_box(geometry: Geometry, width: int, height: int) -> PixelBox:
    """Invert pixel_box_to_yolo; exact for boxes produced from integer pixels."""
    cx, cy, w, h = geometry
    if width < 1 or height < 1:
        raise ValueError(f"raster dimensions must be positive, got {width}x{height}")
    for name, value in (("cx", cx), ("cy", cy), ("w", w), ("h", h)):
        if not (0.0 - EDGE_TOL <= value <= 1.0 + EDGE_TOL):
            raise ValueError(f"normalized {name}={value} outside [0, 1]")
    if w <= 0 or h <= 0:
        raise ValueError(f"normalized size must be positive: w={w}, h={h}")
    x_min = round((cx - w / 2) * width)
    x_max = round((cx + w / 2) * width)
    y_min = round((cy - h / 2) * height)
    y_max = round((cy + h / 2) * height)
    x_min = max(0, x_min)
    y_min = max(0, y_min)
    x_max = min(width, x_max)
    y_max = min(height, y_max)
    if x_min >= x_max or y_min >= y_max:
        raise ValueError(f"geometry {geometry} collapses to an empty pixel box in {width}x{height}")
    return PixelBox(x_min, y_min, x_max, y_max)
