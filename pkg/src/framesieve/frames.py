"""Raster frame types, mask encodings, and PNG I/O.

A frame bundles three same-sized rasters for one time step: the RGB camera
image, a per-pixel semantic class mask, and a per-pixel instance id mask
(0 = background). Masks travel on disk as ordinary 8-bit RGB PNGs:

* semantic PNG: each pixel carries its class color from the palette
* instance PNG: R = class id, instance id packed as G * 256 + B
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as _PILImage

from .palette import DEFAULT_PALETTE, Palette, PaletteError

MAX_INSTANCE_ID = 65535  # instance ids are packed into two 8-bit channels
DEFAULT_FRAME_PERIOD = 0.1  # seconds per frame when a stream gives no rate


def _require_array(arr: np.ndarray, name: str, ndim: int) -> None:
    if not isinstance(arr, np.ndarray):
        raise ValueError(f"{name} must be a numpy array, got {type(arr).__name__}")
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be at least 1x1, got shape {arr.shape}")


@dataclass(frozen=True, eq=False)
class Image:
    """8-bit RGB raster, shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        _require_array(self.pixels, "pixels", 3)
        if self.pixels.shape[2] != 3:
            raise ValueError(f"pixels must have 3 channels, got shape {self.pixels.shape}")
        if self.pixels.dtype != np.uint8:
            raise ValueError(f"pixels must be uint8, got {self.pixels.dtype}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class SemanticMask:
    """Per-pixel class ids, shape (height, width)."""

    class_ids: np.ndarray

    def __post_init__(self) -> None:
        _require_array(self.class_ids, "class_ids", 2)
        if not np.issubdtype(self.class_ids.dtype, np.integer):
            raise ValueError(f"class_ids must be integer, got {self.class_ids.dtype}")
        if self.class_ids.min() < 0:
            raise ValueError("class ids must be non-negative")

    @property
    def width(self) -> int:
        return self.class_ids.shape[1]

    @property
    def height(self) -> int:
        return self.class_ids.shape[0]


@dataclass(frozen=True, eq=False)
class InstanceMask:
    """Per-pixel instance ids, shape (height, width); 0 marks background."""

    instance_ids: np.ndarray

    def __post_init__(self) -> None:
        _require_array(self.instance_ids, "instance_ids", 2)
        if not np.issubdtype(self.instance_ids.dtype, np.integer):
            raise ValueError(f"instance_ids must be integer, got {self.instance_ids.dtype}")
        if self.instance_ids.min() < 0:
            raise ValueError("instance ids must be non-negative")

    @property
    def width(self) -> int:
        return self.instance_ids.shape[1]

    @property
    def height(self) -> int:
        return self.instance_ids.shape[0]


@dataclass(frozen=True, eq=False)
class Frame:
    """One time step: RGB image plus matching semantic and instance masks."""

    frame_id: int
    timestamp: float
    rgb: Image
    semantic: SemanticMask
    instance: InstanceMask

    def __post_init__(self) -> None:
        if self.frame_id < 0:
            raise ValueError(f"frame_id must be non-negative, got {self.frame_id}")
        if self.timestamp < 0:
            raise ValueError(f"timestamp must be non-negative, got {self.timestamp}")
        dims = {
            "rgb": (self.rgb.height, self.rgb.width),
            "semantic": (self.semantic.height, self.semantic.width),
            "instance": (self.instance.height, self.instance.width),
        }
        if len(set(dims.values())) != 1:
            raise ValueError(f"raster dimensions disagree: {dims}")

    @property
    def width(self) -> int:
        return self.rgb.width

    @property
    def height(self) -> int:
        return self.rgb.height


def images_equal(a: Image, b: Image) -> bool:
    return np.array_equal(a.pixels, b.pixels)


def rasters_equal(a: Frame, b: Frame) -> bool:
    """Bitwise equality of the three rasters, ignoring id and timestamp."""
    return (
        np.array_equal(a.rgb.pixels, b.rgb.pixels)
        and np.array_equal(a.semantic.class_ids, b.semantic.class_ids)
        and np.array_equal(a.instance.instance_ids, b.instance.instance_ids)
    )


def frames_equal(a: Frame, b: Frame) -> bool:
    """Bitwise equality of ids, timestamps, and all three rasters."""
    return a.frame_id == b.frame_id and a.timestamp == b.timestamp and rasters_equal(a, b)


def encode_semantic(mask: SemanticMask, palette: Palette = DEFAULT_PALETTE) -> Image:
    """Render a semantic mask as an RGB image using the palette colors."""
    present = np.unique(mask.class_ids)
    for class_id in present:
        if int(class_id) not in palette:
            raise PaletteError(f"class id {int(class_id)} not in palette")
    lut = np.zeros((int(present.max()) + 1, 3), dtype=np.uint8)
    for class_id in present:
        lut[int(class_id)] = palette.color_of(int(class_id))
    return Image(lut[mask.class_ids])


def decode_semantic(rgb_semantic: Image, palette: Palette = DEFAULT_PALETTE) -> SemanticMask:
    """Recover class ids from a palette-colored semantic image.

    Any pixel whose color is not in the palette raises, naming the color
    and the (x, y) position of the first offending pixel.
    """
    px = rgb_semantic.pixels.astype(np.int32)
    packed = (px[:, :, 0] << 16) | (px[:, :, 1] << 8) | px[:, :, 2]
    out = np.zeros(packed.shape, dtype=np.uint8)
    known = {}
    for class_def in palette.classes:
        r, g, b = class_def.color
        known[(r << 16) | (g << 8) | b] = class_def.class_id
    for value in np.unique(packed):
        value = int(value)
        if value not in known:
            ys, xs = np.nonzero(packed == value)
            color = (value >> 16, (value >> 8) & 0xFF, value & 0xFF)
            raise PaletteError(
                f"color {color} at pixel (x={int(xs[0])}, y={int(ys[0])}) not in palette"
            )
        out[packed == value] = known[value]
    return SemanticMask(out)


def encode_instance(mask: InstanceMask, semantic: SemanticMask | None = None) -> Image:
    """Pack instance ids into an RGB image: R = class id, id = G * 256 + B."""
    ids = mask.instance_ids
    if ids.max() > MAX_INSTANCE_ID:
        raise ValueError(f"instance ids above {MAX_INSTANCE_ID} cannot be encoded")
    out = np.zeros((*ids.shape, 3), dtype=np.uint8)
    if semantic is not None:
        if semantic.class_ids.shape != ids.shape:
            raise ValueError("semantic and instance mask dimensions disagree")
        if semantic.class_ids.max() > 255:
            raise ValueError("class ids above 255 cannot be encoded in the R channel")
        out[:, :, 0] = semantic.class_ids
    out[:, :, 1] = ids >> 8
    out[:, :, 2] = ids & 0xFF
    return Image(out)


def decode_instance(rgb_instance: Image) -> InstanceMask:
    """Recover instance ids from an instance-encoded image (id = G * 256 + B)."""
    px = rgb_instance.pixels
    ids = px[:, :, 1].astype(np.int32) * 256 + px[:, :, 2]
    return InstanceMask(ids)


def save_png(image: Image, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _PILImage.fromarray(image.pixels, mode="RGB").save(path, format="PNG")


def load_png(path: str | Path) -> Image:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such image: {path}")
    with _PILImage.open(path) as img:
        return Image(np.asarray(img.convert("RGB"), dtype=np.uint8).copy())
