"""Image similarity and per-frame quality measurements.

Similarity is the Wang-Bovik universal quality index Q computed on luma
planes: Q = 4 * cov * mean_x * mean_y / ((var_x + var_y) * (mean_x^2 +
mean_y^2)), with sample (N - 1) statistics. Q is 1 for identical signals
and -1 for perfectly anti-correlated ones. Frame-level similarity averages
Q over non-overlapping tiles so that local scene change is not washed out
by global statistics.

Frame quality covers the measurements the acquisition policy gates on:
how many instances are visible, whether same-class instances touch and
would be labeled as one region, and how occluded each instance is.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .frames import Frame, Image
from .palette import DEFAULT_EXPORT_CLASS_MAP, DEFAULT_PALETTE, Palette, PaletteError

DEFAULT_WINDOW = 8
DEFAULT_MIN_AREA = 25

# 4-connectivity: diagonal touching does not join regions.
_CONNECT_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.uint8)

_LUMA_WEIGHTS = (0.299, 0.587, 0.114)  # Rec.601


@dataclass(frozen=True)
class WindowStats:
    """Means, sample variances, and covariance over one pixel window pair."""

    mean_x: float
    mean_y: float
    var_x: float
    var_y: float
    cov_xy: float

    def __post_init__(self) -> None:
        if self.var_x < 0 or self.var_y < 0:
            raise ValueError(f"variances must be non-negative: {self}")
        bound = float(np.sqrt(self.var_x * self.var_y)) + 1e-9
        if abs(self.cov_xy) > bound:
            raise ValueError(f"covariance {self.cov_xy} breaks the Cauchy-Schwarz bound {bound}")


@dataclass(frozen=True)
class FrameQuality:
    """Quality measurements attached to every acquisition decision.

    uqi_vs_reference is None for the first frame of a stream (and for
    passive collection, which never computes similarity).
    """

    uqi_vs_reference: float | None
    instance_count: int
    merged_component_count: int
    per_instance_occlusion: dict[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.uqi_vs_reference is not None and abs(self.uqi_vs_reference) > 1.0 + 1e-9:
            raise ValueError(f"uqi {self.uqi_vs_reference} outside [-1, 1]")
        if self.instance_count < 0 or self.merged_component_count < 0:
            raise ValueError("counts must be non-negative")
        for instance_id, degree in self.per_instance_occlusion.items():
            if not 0.0 <= degree <= 1.0:
                raise ValueError(f"occlusion degree {degree} for instance {instance_id} outside [0, 1]")


def luma(rgb: Image | np.ndarray) -> np.ndarray:
    """Rec.601 luma plane (float64) of an RGB image."""
    px = rgb.pixels if isinstance(rgb, Image) else np.asarray(rgb)
    if px.ndim != 3 or px.shape[2] != 3:
        raise ValueError(f"expected an RGB raster, got shape {px.shape}")
    px = px.astype(np.float64)
    wr, wg, wb = _LUMA_WEIGHTS
    return px[:, :, 0] * wr + px[:, :, 1] * wg + px[:, :, 2] * wb


def _row_stats(xt: np.ndarray, yt: np.ndarray):
    """Per-row means, sample variances, and covariance for stacked windows."""
    n = xt.shape[1]
    mx = xt.mean(axis=1)
    my = yt.mean(axis=1)
    dx = xt - mx[:, None]
    dy = yt - my[:, None]
    cov = (dx * dy).sum(axis=1) / (n - 1)
    vx = (dx * dx).sum(axis=1) / (n - 1)
    vy = (dy * dy).sum(axis=1) / (n - 1)
    return mx, my, vx, vy, cov


def _row_q(xt: np.ndarray, yt: np.ndarray) -> np.ndarray:
    """Quality index per row of stacked windows.

    The parenthesization below is deliberate: for bitwise-identical inputs
    the numerator and denominator round to the same float, so Q is exactly
    1.0. Degenerate windows (zero denominator) score 1 when the two
    buffers are bitwise equal and 0 otherwise, keeping static repeats
    filterable.
    """
    mx, my, vx, vy, cov = _row_stats(xt, yt)
    num = 4.0 * (cov * (mx * my))
    den = (vx + vy) * (mx * mx + my * my)
    q = np.zeros_like(num)
    live = den != 0.0
    q[live] = num[live] / den[live]
    dead = ~live
    if dead.any():
        q[dead] = np.where((xt[dead] == yt[dead]).all(axis=1), 1.0, 0.0)
    return q


def window_stats(x: np.ndarray, y: np.ndarray) -> WindowStats:
    """Statistics for a single window pair, as used inside the quality index."""
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    y = np.asarray(y, dtype=np.float64).reshape(1, -1)
    if x.shape != y.shape:
        raise ValueError(f"window dimensions disagree: {x.shape} vs {y.shape}")
    if x.shape[1] < 2:
        raise ValueError("need at least 2 samples")
    mx, my, vx, vy, cov = _row_stats(x, y)
    return WindowStats(float(mx[0]), float(my[0]), float(vx[0]), float(vy[0]), float(cov[0]))


def uqi(x: np.ndarray, y: np.ndarray) -> float:
    """Global quality index between two equal-sized scalar planes."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"plane dimensions disagree: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise ValueError("need at least 2 samples")
    return float(_row_q(x.reshape(1, -1), y.reshape(1, -1))[0])


def uqi_windowed(x: np.ndarray, y: np.ndarray, window: int = DEFAULT_WINDOW) -> float:
    """Mean quality index over non-overlapping window x window tiles.

    Partial tiles along the right and bottom edges are included whenever
    they hold at least 2 pixels.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 2:
        raise ValueError("windowed index expects 2-D planes")
    if x.shape != y.shape:
        raise ValueError(f"plane dimensions disagree: {x.shape} vs {y.shape}")
    h, w = x.shape
    if h < 2 or w < 2:
        raise ValueError(f"plane must be at least 2 pixels in each axis, got {h}x{w}")
    if window < 2:
        raise ValueError(f"window must be at least 2, got {window}")

    b = window
    nh, rh = divmod(h, b)
    nw, rw = divmod(w, b)
    parts = []
    if nh and nw:
        core = slice(0, nh * b), slice(0, nw * b)
        xt = x[core].reshape(nh, b, nw, b).swapaxes(1, 2).reshape(nh * nw, b * b)
        yt = y[core].reshape(nh, b, nw, b).swapaxes(1, 2).reshape(nh * nw, b * b)
        parts.append(_row_q(xt, yt))
    if nh and rw:
        strip = slice(0, nh * b), slice(nw * b, w)
        xt = x[strip].reshape(nh, b * rw)
        yt = y[strip].reshape(nh, b * rw)
        parts.append(_row_q(xt, yt))
    if rh and nw:
        strip = slice(nh * b, h), slice(0, nw * b)
        xt = x[strip].reshape(rh, nw, b).swapaxes(0, 1).reshape(nw, rh * b)
        yt = y[strip].reshape(rh, nw, b).swapaxes(0, 1).reshape(nw, rh * b)
        parts.append(_row_q(xt, yt))
    if rh and rw and rh * rw >= 2:
        corner = slice(nh * b, h), slice(nw * b, w)
        parts.append(_row_q(x[corner].reshape(1, -1), y[corner].reshape(1, -1)))
    return float(np.concatenate(parts).mean())


def frame_similarity(a: Frame, b: Frame, window: int = DEFAULT_WINDOW) -> float:
    """Windowed quality index between the luma planes of two frames."""
    if (a.height, a.width) != (b.height, b.width):
        raise ValueError(
            f"frame dimensions disagree: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    return uqi_windowed(luma(a.rgb), luma(b.rgb), window)


def instance_stats(frame: Frame, min_area: int = DEFAULT_MIN_AREA) -> tuple[int, dict[int, int]]:
    """Count distinct instances with at least min_area visible pixels.

    Returns the count together with a map of qualifying instance id to
    visible pixel area.
    """
    ids_arr = frame.instance.instance_ids
    ids, counts = np.unique(ids_arr[ids_arr > 0], return_counts=True)
    areas = {int(i): int(c) for i, c in zip(ids, counts) if c >= min_area}
    return len(areas), areas


def merged_components(
    frame: Frame,
    class_id: int,
    palette: Palette = DEFAULT_PALETTE,
    min_area: int = 1,
) -> int:
    """Count 4-connected same-class regions holding 2+ distinct instances.

    Such a region is exactly the failure mode where touching objects of
    one class would be annotated as a single larger object. min_area
    restricts the instances considered to those with at least that many
    visible pixels anywhere in the frame.
    """
    if class_id not in palette:
        raise PaletteError(f"class id {class_id} not in palette")
    class_mask = frame.semantic.class_ids == class_id
    if not class_mask.any():
        return 0
    labeled, n_components = ndimage.label(class_mask, structure=_CONNECT_4)
    if n_components < 1:
        return 0
    inst = frame.instance.instance_ids
    select = class_mask & (inst > 0)
    if min_area > 1:
        _, areas = instance_stats(frame, min_area)
        select &= np.isin(inst, list(areas.keys()))
    if not select.any():
        return 0
    pairs = np.unique(np.stack([labeled[select], inst[select]], axis=1), axis=0)
    _, ids_per_component = np.unique(pairs[:, 0], return_counts=True)
    return int((ids_per_component >= 2).sum())


def occlusion_degree(frame: Frame, instance_id: int) -> float:
    """How much of an instance's tight bounding box it fails to fill.

    0 means the visible pixels fill their box exactly (an unobstructed
    axis-aligned rectangle); values approach 1 as overdraw eats the
    instance away.
    """
    mask = frame.instance.instance_ids == instance_id
    if instance_id <= 0 or not mask.any():
        raise ValueError(f"instance id {instance_id} not present in frame {frame.frame_id}")
    visible = int(mask.sum())
    ys, xs = np.nonzero(mask)
    box_area = int(ys.max() + 1 - ys.min()) * int(xs.max() + 1 - xs.min())
    return 1.0 - visible / box_area


def measure_frame(
    frame: Frame,
    min_area: int = DEFAULT_MIN_AREA,
    palette: Palette = DEFAULT_PALETTE,
    detect_classes: tuple[int, ...] | None = None,
) -> FrameQuality:
    """Full quality measurement for one frame, without a similarity score.

    detect_classes defaults to the classes in the export class map; merge
    detection runs per class and is summed.
    """
    if detect_classes is None:
        detect_classes = tuple(DEFAULT_EXPORT_CLASS_MAP)
    count, areas = instance_stats(frame, min_area)
    merged = sum(
        merged_components(frame, class_id, palette=palette, min_area=min_area)
        for class_id in detect_classes
    )
    occlusion = {i: occlusion_degree(frame, i) for i in areas}
    return FrameQuality(
        uqi_vs_reference=None,
        instance_count=count,
        merged_component_count=merged,
        per_instance_occlusion=occlusion,
    )
