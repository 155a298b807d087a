"""Segmentation class registry: stable class ids, names, and mask colors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping


class PaletteError(ValueError):
    """Unknown class id, name, or color for the active palette."""


@dataclass(frozen=True)
class ClassDef:
    """One segmentation class: numeric id, readable name, mask color."""

    class_id: int
    name: str
    color: tuple[int, int, int]

    def __post_init__(self) -> None:
        if self.class_id < 0:
            raise PaletteError(f"class id must be non-negative, got {self.class_id}")
        color = tuple(int(c) for c in self.color)
        if len(color) != 3 or any(not 0 <= c <= 255 for c in color):
            raise PaletteError(f"color must be an RGB triple in 0..255, got {self.color!r}")
        object.__setattr__(self, "color", color)


class Palette:
    """Bidirectional registry between class ids and mask colors.

    Masks rendered by the synthetic world and masks decoded from PNG
    exports both go through this registry, so the color assignment is
    authoritative for the whole pipeline. Ids, names, and colors must
    all be unique.
    """

    def __init__(self, classes: Iterable[ClassDef]):
        self.classes: tuple[ClassDef, ...] = tuple(classes)
        if not self.classes:
            raise PaletteError("palette needs at least one class")
        self._by_id = {c.class_id: c for c in self.classes}
        self._by_name = {c.name: c for c in self.classes}
        self._by_color = {c.color: c for c in self.classes}
        if len(self._by_id) != len(self.classes):
            raise PaletteError("duplicate class ids in palette")
        if len(self._by_name) != len(self.classes):
            raise PaletteError("duplicate class names in palette")
        if len(self._by_color) != len(self.classes):
            raise PaletteError("duplicate colors in palette")

    def __contains__(self, class_id: int) -> bool:
        return class_id in self._by_id

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Palette) and self.classes == other.classes

    def __repr__(self) -> str:
        names = ", ".join(c.name for c in self.classes)
        return f"Palette({names})"

    def class_ids(self) -> tuple[int, ...]:
        return tuple(c.class_id for c in self.classes)

    def color_of(self, class_id: int) -> tuple[int, int, int]:
        try:
            return self._by_id[class_id].color
        except KeyError:
            raise PaletteError(f"class id {class_id} not in palette") from None

    def name_of(self, class_id: int) -> str:
        try:
            return self._by_id[class_id].name
        except KeyError:
            raise PaletteError(f"class id {class_id} not in palette") from None

    def id_of_name(self, name: str) -> int:
        try:
            return self._by_name[name].class_id
        except KeyError:
            raise PaletteError(f"class name {name!r} not in palette") from None

    def id_of_color(self, color: tuple[int, int, int]) -> int:
        try:
            return self._by_color[tuple(int(c) for c in color)].class_id
        except KeyError:
            raise PaletteError(f"color {tuple(color)!r} not in palette") from None

    def to_dict(self) -> dict:
        return {
            "classes": [
                {"id": c.class_id, "name": c.name, "color": list(c.color)}
                for c in self.classes
            ]
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Palette":
        return cls(
            ClassDef(int(c["id"]), str(c["name"]), tuple(c["color"]))
            for c in data["classes"]
        )


BACKGROUND = 0
ROAD = 1
VEHICLE = 2
TRAFFIC_LIGHT = 3

DEFAULT_PALETTE = Palette(
    [
        ClassDef(BACKGROUND, "background", (0, 0, 0)),
        ClassDef(ROAD, "road", (128, 64, 128)),
        ClassDef(VEHICLE, "vehicle", (0, 0, 142)),
        ClassDef(TRAFFIC_LIGHT, "traffic_light", (250, 170, 30)),
    ]
)

# Classes that carry instance labels, mapped onto contiguous export ids
# used in label files.
DEFAULT_EXPORT_CLASS_MAP: dict[int, int] = {VEHICLE: 0, TRAFFIC_LIGHT: 1}
