"""Deterministic synthetic street scenes with exact ground truth.

The world is a stylized 2-D orthographic view: a textured road band
crossed by rectangular vehicles, with traffic lights in the backdrop.
Rendering is painter's algorithm in a fixed depth order (lights first,
then vehicles by ascending instance id), so overdraw produces genuine,
reproducible occlusions. Scheduled pauses freeze the whole world, which
makes consecutive frames bitwise identical, the raw material for
redundancy filtering.

Presets:

* ``dense_junction``: many vehicles bouncing inside the view, several
  traffic lights; heavy overlap and merge pathology.
* ``sparse_road``: the same motion model with few objects.
* ``stop_and_go``: driving traffic. The road texture scrolls while the
  world moves, and traffic arrives in waves of alternating size that
  fully cross the view between pauses, so paused stretches show an empty,
  static road.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .boxes import PixelBox
from .frames import (
    DEFAULT_FRAME_PERIOD,
    Frame,
    Image,
    InstanceMask,
    SemanticMask,
    decode_instance,
    decode_semantic,
    encode_instance,
    encode_semantic,
    frames_equal,
    load_png,
    save_png,
)
from .labeling import InstanceRecord
from .palette import BACKGROUND, DEFAULT_PALETTE, ROAD, TRAFFIC_LIGHT, VEHICLE, Palette
from .quality import DEFAULT_MIN_AREA

PRESETS = ("dense_junction", "sparse_road", "stop_and_go")

SCENE_SCHEMA_VERSION = 1

_MIN_SIDE = 16  # smallest canvas the renderer can lay out

_LAMP_COLORS = ((235, 59, 59), (240, 200, 40), (70, 220, 90))


@dataclass(frozen=True)
class SceneConfig:
    """Parameters of one generated scene."""

    seed: int = 0
    width: int = 160
    height: int = 120
    n_vehicles: int = 6
    n_lights: int = 1
    speed_range: tuple[float, float] = (0.8, 2.5)
    frame_period: float = DEFAULT_FRAME_PERIOD
    n_frames: int = 120
    pause_schedule: tuple[tuple[int, int], ...] = ()
    preset: str = "sparse_road"

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("scene must have positive area")
        if self.width < _MIN_SIDE or self.height < _MIN_SIDE:
            raise ValueError(f"scene must be at least {_MIN_SIDE}x{_MIN_SIDE} pixels")
        if self.n_frames < 1:
            raise ValueError("scene needs at least one frame")
        if self.n_vehicles < 0 or self.n_lights < 0:
            raise ValueError("object counts must be non-negative")
        lo, hi = self.speed_range
        if not 0 < lo <= hi:
            raise ValueError(f"speed range must satisfy 0 < lo <= hi, got {self.speed_range}")
        if self.frame_period <= 0:
            raise ValueError("frame period must be positive")
        if self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}, expected one of {PRESETS}")
        object.__setattr__(self, "speed_range", (float(lo), float(hi)))
        schedule = tuple((int(s), int(ln)) for s, ln in self.pause_schedule)
        object.__setattr__(self, "pause_schedule", schedule)
        last_end = 0
        for start, length in schedule:
            if length < 1:
                raise ValueError(f"pause at {start} must have positive length")
            if start < last_end:
                raise ValueError(f"pause at {start} overlaps the previous one")
            if start + length > self.n_frames:
                raise ValueError(f"pause ({start}, {length}) runs past the last frame")
            last_end = start + length


@dataclass(frozen=True, eq=False)
class GroundTruthFrame:
    """A rendered frame together with its exact instance records."""

    frame: Frame
    truth: tuple[InstanceRecord, ...]


def ground_truth_equal(a: GroundTruthFrame, b: GroundTruthFrame) -> bool:
    return frames_equal(a.frame, b.frame) and a.truth == b.truth


def stop_and_go_pauses(n_frames: int, phase: int = 15) -> tuple[tuple[int, int], ...]:
    """Alternating drive/halt schedule: halts of `phase` frames every other phase."""
    return tuple(
        (start, min(phase, n_frames - start)) for start in range(phase, n_frames, 2 * phase)
    )


def preset_config(name: str, seed: int = 0, **overrides) -> SceneConfig:
    """Build a SceneConfig for a named preset, with field overrides."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}, expected one of {PRESETS}")
    base: dict = {"seed": seed, "preset": name}
    if name == "dense_junction":
        base.update(n_vehicles=12, n_lights=3)
    elif name == "sparse_road":
        base.update(n_vehicles=3, n_lights=1)
    else:  # stop_and_go
        base.update(n_vehicles=6, n_lights=0, speed_range=(1.0, 3.0))
    base.update(overrides)
    if name == "stop_and_go" and "pause_schedule" not in overrides:
        base["pause_schedule"] = stop_and_go_pauses(base.get("n_frames", SceneConfig.n_frames))
    return SceneConfig(**base)


class _Sprite:
    """One rectangular object with linear motion."""

    __slots__ = (
        "instance_id", "class_id", "x", "y", "w", "h",
        "vx", "vy", "body", "trim", "active", "entry",
    )

    def __init__(self, instance_id, class_id, x, y, w, h, vx, vy, body, trim, active=True, entry=0):
        self.instance_id = instance_id
        self.class_id = class_id
        self.x = float(x)
        self.y = float(y)
        self.w = int(w)
        self.h = int(h)
        self.vx = float(vx)
        self.vy = float(vy)
        self.body = body
        self.trim = trim
        self.active = active
        self.entry = entry


class _World:
    """Mutable scene state; advance() steps it, render() rasterizes it."""

    def __init__(self, config: SceneConfig):
        self.config = config
        rng = np.random.default_rng(config.seed)
        w, h = config.width, config.height
        self.road_top = h // 3
        self.scroll_speed = 2 if config.preset == "stop_and_go" else 0
        self.scroll = 0

        # Static appearance: background band with a fixed speckle, road
        # band kept separately so it can scroll.
        back = np.full((h, w, 3), (62, 118, 72), dtype=np.int16)
        back += rng.integers(-14, 15, size=(h, w, 1), dtype=np.int16)
        self._static_rgb = np.clip(back, 0, 255).astype(np.uint8)
        road = np.full((h - self.road_top, w, 3), (92, 92, 98), dtype=np.int16)
        road += rng.integers(-18, 19, size=(h - self.road_top, w, 1), dtype=np.int16)
        self._road_rgb = np.clip(road, 0, 255).astype(np.uint8)

        self._static_sem = np.full((h, w), BACKGROUND, dtype=np.uint8)
        self._static_sem[self.road_top :, :] = ROAD

        self.lights: list[_Sprite] = []
        self.vehicles: list[_Sprite] = []
        self._pending: list[_Sprite] = []
        next_id = 1

        light_h = min(14, max(4, self.road_top - 4))
        light_w = max(3, light_h // 2)
        for i in range(config.n_lights):
            x = int(rng.integers(2, max(3, w - light_w - 2)))
            y = int(rng.integers(2, max(3, self.road_top - light_h - 1)))
            lamp = _LAMP_COLORS[int(rng.integers(0, len(_LAMP_COLORS)))]
            self.lights.append(
                _Sprite(next_id, TRAFFIC_LIGHT, x, y, light_w, light_h, 0.0, 0.0, (46, 46, 52), lamp)
            )
            next_id += 1

        if config.preset == "stop_and_go":
            next_id = self._schedule_waves(rng, next_id)
        else:
            next_id = self._spawn_bouncers(rng, next_id)

    def _vehicle_dims(self, rng) -> tuple[int, int]:
        h = self.config.height
        road_h = h - self.road_top
        vw = int(rng.integers(16, 28))
        vh = int(rng.integers(9, 15))
        vh = min(vh, max(3, road_h - 4))
        vw = min(vw, max(4, self.config.width - 4))
        return vw, vh

    def _vehicle_colors(self, rng):
        body = tuple(int(c) for c in rng.integers(40, 226, size=3))
        trim = tuple(int(c * 0.55) for c in body)
        return body, trim

    def _spawn_bouncers(self, rng, next_id: int) -> int:
        cfg = self.config
        lo, hi = cfg.speed_range
        for _ in range(cfg.n_vehicles):
            vw, vh = self._vehicle_dims(rng)
            x = float(rng.uniform(0, max(1, cfg.width - vw)))
            y = float(rng.uniform(self.road_top, max(self.road_top + 1, cfg.height - vh)))
            speed = float(rng.uniform(lo, hi))
            direction = 1.0 if rng.integers(0, 2) else -1.0
            vy = float(rng.uniform(-0.6, 0.6))
            body, trim = self._vehicle_colors(rng)
            self.vehicles.append(
                _Sprite(next_id, VEHICLE, x, y, vw, vh, speed * direction, vy, body, trim)
            )
            next_id += 1
        return next_id

    def _go_windows(self) -> list[tuple[int, int]]:
        windows = []
        cursor = 0
        for start, length in sorted(self.config.pause_schedule):
            if start > cursor:
                windows.append((cursor, start))
            cursor = max(cursor, start + length)
        if cursor < self.config.n_frames:
            windows.append((cursor, self.config.n_frames))
        return windows

    def _schedule_waves(self, rng, next_id: int) -> int:
        """Plan crossing traffic that fully clears the view inside each window.

        Wave sizes alternate small and large, so the stream mixes sparse
        and dense stretches. Entry times and speeds are chosen so every
        vehicle exits before the window closes and the road is empty
        whenever the world is paused.
        """
        cfg = self.config
        sparse = max(1, cfg.n_vehicles // 4)
        for index, (a, b) in enumerate(self._go_windows()):
            if b - a < 6:
                continue
            if index % 2 == 0:
                size = sparse + int(rng.integers(0, 2))
            else:
                size = max(1, cfg.n_vehicles - int(rng.integers(0, 2)))
            span = max(0, (b - a) // 3)
            for _ in range(size):
                vw, vh = self._vehicle_dims(rng)
                entry = int(rng.integers(max(a, 1), max(a, 1) + span + 1))
                entry = min(entry, b - 2)
                travel = cfg.width + vw
                speed = 1.15 * travel / max(1, b - entry) + float(rng.uniform(0.0, 1.5))
                from_left = bool(rng.integers(0, 2))
                y = float(rng.uniform(self.road_top + 1, max(self.road_top + 2, cfg.height - vh - 1)))
                body, trim = self._vehicle_colors(rng)
                if from_left:
                    sprite = _Sprite(next_id, VEHICLE, -vw, y, vw, vh, speed, 0.0, body, trim,
                                     active=False, entry=entry)
                else:
                    sprite = _Sprite(next_id, VEHICLE, cfg.width, y, vw, vh, -speed, 0.0, body, trim,
                                     active=False, entry=entry)
                self._pending.append(sprite)
                next_id += 1
        self._pending.sort(key=lambda s: (s.entry, s.instance_id))
        return next_id

    def advance(self, t: int) -> None:
        """Move the world one step; called only on unfrozen transitions."""
        cfg = self.config
        self.scroll = (self.scroll + self.scroll_speed) % cfg.width
        for sprite in self.vehicles:
            if not sprite.active:
                continue
            sprite.x += sprite.vx
            sprite.y += sprite.vy
            if cfg.preset == "stop_and_go":
                if sprite.x <= -sprite.w - 2 or sprite.x >= cfg.width + 2:
                    sprite.active = False
                continue
            x_hi = cfg.width - sprite.w
            if sprite.x < 0:
                sprite.x = -sprite.x
                sprite.vx = -sprite.vx
            elif sprite.x > x_hi:
                sprite.x = 2 * x_hi - sprite.x
                sprite.vx = -sprite.vx
            y_lo, y_hi = self.road_top, cfg.height - sprite.h
            if sprite.y < y_lo:
                sprite.y = 2 * y_lo - sprite.y
                sprite.vy = -sprite.vy
            elif sprite.y > y_hi:
                sprite.y = 2 * y_hi - sprite.y
                sprite.vy = -sprite.vy
        while self._pending and self._pending[0].entry <= t:
            sprite = self._pending.pop(0)
            sprite.active = True
            sprite.x += sprite.vx  # step in from the edge on the entry frame
            self.vehicles.append(sprite)

    def render(self, t: int) -> GroundTruthFrame:
        cfg = self.config
        rgb = self._static_rgb.copy()
        if self.scroll:
            rgb[self.road_top :, :] = np.roll(self._road_rgb, -self.scroll, axis=1)
        else:
            rgb[self.road_top :, :] = self._road_rgb
        sem = self._static_sem.copy()
        inst = np.zeros((cfg.height, cfg.width), dtype=np.int32)

        class_of = {}
        for sprite in self.lights + self.vehicles:
            class_of[sprite.instance_id] = sprite.class_id
            if not sprite.active:
                continue
            x0 = max(0, int(sprite.x))
            y0 = max(0, int(sprite.y))
            x1 = min(cfg.width, int(sprite.x) + sprite.w)
            y1 = min(cfg.height, int(sprite.y) + sprite.h)
            if x1 <= x0 or y1 <= y0:
                continue
            rgb[y0:y1, x0:x1] = sprite.body
            trim_y1 = min(y1, y0 + max(1, (y1 - y0) * 2 // 5))
            trim_x0 = min(x1 - 1, x0 + 1)
            trim_x1 = max(trim_x0 + 1, x1 - 1)
            rgb[y0:trim_y1, trim_x0:trim_x1] = sprite.trim
            sem[y0:y1, x0:x1] = sprite.class_id
            inst[y0:y1, x0:x1] = sprite.instance_id

        frame = Frame(
            frame_id=t,
            timestamp=t * cfg.frame_period,
            rgb=Image(rgb),
            semantic=SemanticMask(sem),
            instance=InstanceMask(inst),
        )
        return GroundTruthFrame(frame=frame, truth=_visible_records(inst, class_of))


def _visible_records(
    inst: np.ndarray, class_of: dict[int, int], min_area: int = DEFAULT_MIN_AREA
) -> tuple[InstanceRecord, ...]:
    """Exact per-instance records read off the rendered instance raster."""
    ids, counts = np.unique(inst[inst > 0], return_counts=True)
    records = []
    for instance_id, area in zip(ids, counts):
        if area < min_area:
            continue
        ys, xs = np.nonzero(inst == instance_id)
        box = PixelBox(int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)
        records.append(
            InstanceRecord(
                instance_id=int(instance_id),
                class_id=class_of[int(instance_id)],
                box=box,
                pixel_area=int(area),
                occlusion=1.0 - int(area) / box.area,
            )
        )
    return tuple(records)


def generate(config: SceneConfig) -> Iterator[GroundTruthFrame]:
    """Yield the scene's frames in order; identical configs give identical streams.

    During a pause (start, length) the world state is not advanced when
    entering frames start+1 .. start+length-1, so those frames repeat
    frame `start` bitwise: every pause is a run of exactly `length`
    identical frames.
    """
    world = _World(config)
    frozen = frozenset(
        t for start, length in config.pause_schedule for t in range(start + 1, start + length)
    )
    for t in range(config.n_frames):
        if t > 0 and t not in frozen:
            world.advance(t)
        yield world.render(t)


def export_scene(
    stream: Iterable[GroundTruthFrame],
    directory: str | Path,
    config: SceneConfig | None = None,
    palette: Palette = DEFAULT_PALETTE,
) -> int:
    """Write a scene to disk: rgb/semantic/instance PNG triples plus manifest.

    ``scene.json`` carries dimensions, the palette, the config snapshot,
    and the frame index; ``truth.txt`` is line-oriented with one instance
    record per line (frame id, instance id, class id, box, area,
    occlusion). Returns the number of frames written.
    """
    directory = Path(directory)
    for sub in ("rgb", "semantic", "instance"):
        (directory / sub).mkdir(parents=True, exist_ok=True)
    frames_meta = []
    truth_lines = []
    width = height = None
    count = 0
    for gt in stream:
        frame = gt.frame
        width, height = frame.width, frame.height
        name = f"{frame.frame_id:06d}.png"
        save_png(frame.rgb, directory / "rgb" / name)
        save_png(encode_semantic(frame.semantic, palette), directory / "semantic" / name)
        save_png(encode_instance(frame.instance, frame.semantic), directory / "instance" / name)
        frames_meta.append({"frame_id": frame.frame_id, "timestamp": frame.timestamp})
        for r in gt.truth:
            truth_lines.append(
                f"{frame.frame_id} {r.instance_id} {r.class_id} "
                f"{r.box.x_min} {r.box.y_min} {r.box.x_max} {r.box.y_max} "
                f"{r.pixel_area} {r.occlusion!r}\n"
            )
        count += 1
    manifest = {
        "schema_version": SCENE_SCHEMA_VERSION,
        "width": width,
        "height": height,
        "palette": palette.to_dict(),
        "config": dataclasses.asdict(config) if config is not None else None,
        "frames": frames_meta,
    }
    (directory / "scene.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    (directory / "truth.txt").write_text("".join(truth_lines))
    return count


def import_scene(directory: str | Path) -> Iterator[GroundTruthFrame]:
    """Re-read an exported scene; the inverse of export_scene."""
    directory = Path(directory)
    manifest_path = directory / "scene.json"
    if not manifest_path.exists():
        raise FileNotFoundError(f"no scene manifest at {manifest_path}")
    manifest = json.loads(manifest_path.read_text())
    palette = Palette.from_dict(manifest["palette"])

    truth_by_frame: dict[int, list[InstanceRecord]] = {}
    truth_path = directory / "truth.txt"
    if truth_path.exists():
        for lineno, line in enumerate(truth_path.read_text().splitlines(), start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != 9:
                raise ValueError(f"{truth_path}:{lineno}: expected 9 fields, got {len(fields)}")
            frame_id, instance_id, class_id = (int(f) for f in fields[:3])
            x_min, y_min, x_max, y_max, area = (int(f) for f in fields[3:8])
            occlusion = float(fields[8])
            truth_by_frame.setdefault(frame_id, []).append(
                InstanceRecord(
                    instance_id=instance_id,
                    class_id=class_id,
                    box=PixelBox(x_min, y_min, x_max, y_max),
                    pixel_area=area,
                    occlusion=occlusion,
                )
            )

    for meta in manifest["frames"]:
        frame_id = int(meta["frame_id"])
        name = f"{frame_id:06d}.png"
        rgb = load_png(directory / "rgb" / name)
        semantic = decode_semantic(load_png(directory / "semantic" / name), palette)
        instance = decode_instance(load_png(directory / "instance" / name))
        frame = Frame(
            frame_id=frame_id,
            timestamp=float(meta["timestamp"]),
            rgb=rgb,
            semantic=semantic,
            instance=instance,
        )
        yield GroundTruthFrame(frame=frame, truth=tuple(truth_by_frame.get(frame_id, ())))


def scene_dimensions(directory: str | Path) -> tuple[int | None, int | None]:
    """Width and height recorded in a scene manifest (None for empty scenes)."""
    manifest = json.loads((Path(directory) / "scene.json").read_text())
    width = manifest.get("width")
    height = manifest.get("height")
    return (width, height)
