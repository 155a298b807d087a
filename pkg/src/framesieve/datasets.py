"""Dataset persistence: directory layout, manifest, stats, and comparison.

A dataset directory holds ``images/<frame_id>.png``, ``labels/<frame_id>.txt``,
and a ``manifest.json`` at the root. The manifest is a cache: statistics
are always recomputed from the label files on read, and any disagreement
is surfaced as a warning rather than trusted away.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .frames import save_png
from .labeling import extract_instances, read_label_file, to_yolo_labels, write_label_file
from .palette import DEFAULT_EXPORT_CLASS_MAP, DEFAULT_PALETTE, Palette
from .policy import CollectionStats, KeptFrame, PolicyConfig
from .quality import DEFAULT_MIN_AREA, FrameQuality

SCHEMA_VERSION = 1

COLLECTION_MODES = ("passive", "active-time", "active-size")


class DatasetError(ValueError):
    """Missing, inconsistent, or unreadable dataset content."""


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _quality_to_dict(q: FrameQuality) -> dict:
    return {
        "uqi_vs_reference": q.uqi_vs_reference,
        "instance_count": q.instance_count,
        "merged_component_count": q.merged_component_count,
        "per_instance_occlusion": {str(k): v for k, v in q.per_instance_occlusion.items()},
    }


def _quality_from_dict(data: dict) -> FrameQuality:
    return FrameQuality(
        uqi_vs_reference=data["uqi_vs_reference"],
        instance_count=data["instance_count"],
        merged_component_count=data["merged_component_count"],
        per_instance_occlusion={int(k): v for k, v in data["per_instance_occlusion"].items()},
    )


@dataclass(frozen=True)
class DatasetEntry:
    """One kept frame as persisted: paths, shape, checksums, quality."""

    frame_id: int
    image_path: str
    label_path: str
    width: int
    height: int
    timestamp: float
    sha256_image: str
    sha256_labels: str
    quality: FrameQuality

    def to_dict(self) -> dict:
        return {
            "frame_id": self.frame_id,
            "image_path": self.image_path,
            "label_path": self.label_path,
            "width": self.width,
            "height": self.height,
            "timestamp": self.timestamp,
            "sha256_image": self.sha256_image,
            "sha256_labels": self.sha256_labels,
            "quality": _quality_to_dict(self.quality),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetEntry":
        return cls(
            frame_id=data["frame_id"],
            image_path=data["image_path"],
            label_path=data["label_path"],
            width=data["width"],
            height=data["height"],
            timestamp=data["timestamp"],
            sha256_image=data["sha256_image"],
            sha256_labels=data["sha256_labels"],
            quality=_quality_from_dict(data["quality"]),
        )


@dataclass
class DatasetManifest:
    """The persistent record of one collection run."""

    name: str
    preset: str | None
    collection_mode: str
    stride: int | None
    policy_config: PolicyConfig | None
    palette: Palette
    export_class_map: dict[int, int]
    entries: list[DatasetEntry]
    stats: CollectionStats
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "name": self.name,
            "preset": self.preset,
            "collection_mode": self.collection_mode,
            "stride": self.stride,
            "policy_config": self.policy_config.to_dict() if self.policy_config else None,
            "palette": self.palette.to_dict(),
            "export_class_map": {str(k): v for k, v in self.export_class_map.items()},
            "entries": [e.to_dict() for e in self.entries],
            "stats": self.stats.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetManifest":
        return cls(
            name=data["name"],
            preset=data["preset"],
            collection_mode=data["collection_mode"],
            stride=data["stride"],
            policy_config=(
                PolicyConfig.from_dict(data["policy_config"]) if data["policy_config"] else None
            ),
            palette=Palette.from_dict(data["palette"]),
            export_class_map={int(k): v for k, v in data["export_class_map"].items()},
            entries=[DatasetEntry.from_dict(e) for e in data["entries"]],
            stats=CollectionStats.from_dict(data["stats"]),
            schema_version=data["schema_version"],
        )


def write_dataset(
    kept: Sequence[KeptFrame],
    stats: CollectionStats,
    directory: str | Path,
    name: str,
    collection_mode: str,
    preset: str | None = None,
    stride: int | None = None,
    policy_config: PolicyConfig | None = None,
    palette: Palette = DEFAULT_PALETTE,
    class_map: dict[int, int] = DEFAULT_EXPORT_CLASS_MAP,
    min_area: int = DEFAULT_MIN_AREA,
) -> DatasetManifest:
    """Write kept frames as an images/labels dataset with a manifest.

    Labels are generated here from each frame's masks, so label files and
    manifest always agree with the images they sit beside.
    """
    if collection_mode not in COLLECTION_MODES:
        raise DatasetError(f"collection_mode must be one of {COLLECTION_MODES}, got {collection_mode!r}")
    directory = Path(directory)
    (directory / "images").mkdir(parents=True, exist_ok=True)
    (directory / "labels").mkdir(parents=True, exist_ok=True)
    entries = []
    for item in kept:
        frame = item.frame
        stem = f"{frame.frame_id:06d}"
        image_rel = f"images/{stem}.png"
        label_rel = f"labels/{stem}.txt"
        save_png(frame.rgb, directory / image_rel)
        records = extract_instances(frame, min_area=min_area)
        labels = to_yolo_labels(records, frame.width, frame.height, class_map)
        write_label_file(labels, directory / label_rel)
        entries.append(
            DatasetEntry(
                frame_id=frame.frame_id,
                image_path=image_rel,
                label_path=label_rel,
                width=frame.width,
                height=frame.height,
                timestamp=frame.timestamp,
                sha256_image=_sha256(directory / image_rel),
                sha256_labels=_sha256(directory / label_rel),
                quality=item.quality,
            )
        )
    manifest = DatasetManifest(
        name=name,
        preset=preset,
        collection_mode=collection_mode,
        stride=stride,
        policy_config=policy_config,
        palette=palette,
        export_class_map=dict(class_map),
        entries=entries,
        stats=stats,
    )
    (directory / "manifest.json").write_text(
        json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n"
    )
    return manifest


def read_dataset(directory: str | Path, verify: bool = True) -> DatasetManifest:
    """Load a dataset manifest, checking that every entry is intact.

    With verify on, missing files and checksum mismatches raise a
    DatasetError listing every broken entry by frame id.
    """
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        raise DatasetError(f"no manifest at {manifest_path}")
    manifest = DatasetManifest.from_dict(json.loads(manifest_path.read_text()))
    if verify:
        problems = []
        for entry in manifest.entries:
            image = directory / entry.image_path
            label = directory / entry.label_path
            if not image.exists():
                problems.append(f"frame {entry.frame_id}: missing image {entry.image_path}")
                continue
            if not label.exists():
                problems.append(f"frame {entry.frame_id}: missing label file {entry.label_path}")
                continue
            if _sha256(image) != entry.sha256_image:
                problems.append(f"frame {entry.frame_id}: image checksum mismatch")
            if _sha256(label) != entry.sha256_labels:
                problems.append(f"frame {entry.frame_id}: label checksum mismatch")
        if problems:
            raise DatasetError(f"dataset {directory} is inconsistent: " + "; ".join(problems))
    return manifest


@dataclass
class StatsReport:
    """Recomputed dataset statistics plus any manifest disagreements."""

    stats: CollectionStats
    per_class: dict[str, int]
    warnings: list[str] = field(default_factory=list)

    def csv_rows(self) -> list[list]:
        rows = [["metric", "value"]]
        for key, value in self.stats.to_dict().items():
            rows.append([key, repr(value) if isinstance(value, float) else value])
        for name in sorted(self.per_class):
            rows.append([f"instances[{name}]", self.per_class[name]])
        return rows

    def write_csv(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as handle:
            csv.writer(handle).writerows(self.csv_rows())

    def format_table(self) -> str:
        lines = [f"{'metric':<28} {'value':>14}"]
        for row in self.csv_rows()[1:]:
            lines.append(f"{row[0]:<28} {row[1]!s:>14}")
        return "\n".join(lines)


def dataset_stats(directory: str | Path) -> StatsReport:
    """Recount statistics from the label files; the manifest is not trusted.

    Per-class instance counts come from label lines mapped back through
    the export class map. Fields that only collection can know (frames
    seen, merged frames, wall clock) are taken from the manifest; any
    disagreement between recount and manifest is reported as a warning.
    """
    directory = Path(directory)
    manifest = read_dataset(directory, verify=False)
    warnings = []
    export_to_class = {v: k for k, v in manifest.export_class_map.items()}
    per_class: dict[str, int] = {}
    total_instances = 0
    for entry in manifest.entries:
        label_path = directory / entry.label_path
        if not label_path.exists():
            raise DatasetError(f"frame {entry.frame_id}: missing label file {entry.label_path}")
        labels = read_label_file(label_path)
        total_instances += len(labels)
        for label in labels:
            class_id = export_to_class.get(label.class_id)
            name = (
                manifest.palette.name_of(class_id)
                if class_id is not None and class_id in manifest.palette
                else f"export_{label.class_id}"
            )
            per_class[name] = per_class.get(name, 0) + 1

    frames_kept = len(manifest.entries)
    if frames_kept != manifest.stats.frames_kept:
        warnings.append(
            f"manifest says {manifest.stats.frames_kept} kept frames, found {frames_kept}"
        )
    if total_instances != manifest.stats.instances_kept:
        warnings.append(
            f"manifest says {manifest.stats.instances_kept} instances, label files hold {total_instances}"
        )
    stats = CollectionStats(
        frames_seen=manifest.stats.frames_seen,
        frames_kept=frames_kept,
        instances_kept=total_instances,
        instances_per_kept_frame=total_instances / frames_kept if frames_kept else 0.0,
        merged_frames_seen=manifest.stats.merged_frames_seen,
        wall_clock_equivalent=manifest.stats.wall_clock_equivalent,
        quota_reached=manifest.stats.quota_reached,
    )
    return StatsReport(stats=stats, per_class=per_class, warnings=warnings)


COMPARISON_METRICS = (
    "frames_kept",
    "instances_kept",
    "instances_per_kept_frame",
    "merged_frame_rate",
    "wall_clock_equivalent",
)


@dataclass
class ComparisonReport:
    """Side-by-side dataset metrics with deltas and ratios (b relative to a)."""

    name_a: str
    name_b: str
    metrics_a: dict[str, float]
    metrics_b: dict[str, float]
    deltas: dict[str, float]
    ratios: dict[str, float | None]

    def csv_rows(self) -> list[list]:
        rows = [["metric", self.name_a, self.name_b, "delta", "ratio"]]
        for metric in COMPARISON_METRICS:
            ratio = self.ratios[metric]
            rows.append(
                [
                    metric,
                    repr(self.metrics_a[metric]),
                    repr(self.metrics_b[metric]),
                    repr(self.deltas[metric]),
                    "" if ratio is None else repr(ratio),
                ]
            )
        return rows

    def write_csv(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as handle:
            csv.writer(handle).writerows(self.csv_rows())

    def format_table(self) -> str:
        lines = [f"{'metric':<26} {self.name_a:>14} {self.name_b:>14} {'delta':>12} {'ratio':>10}"]
        for metric in COMPARISON_METRICS:
            ratio = self.ratios[metric]
            ratio_text = "-" if ratio is None else f"{ratio:.4f}"
            lines.append(
                f"{metric:<26} {self.metrics_a[metric]:>14.4f} {self.metrics_b[metric]:>14.4f} "
                f"{self.deltas[metric]:>12.4f} {ratio_text:>10}"
            )
        return "\n".join(lines)


def _comparison_metrics(directory: Path) -> dict[str, float]:
    report = dataset_stats(directory)
    stats = report.stats
    merged_rate = (
        stats.merged_frames_seen / stats.frames_seen if stats.frames_seen else 0.0
    )
    return {
        "frames_kept": float(stats.frames_kept),
        "instances_kept": float(stats.instances_kept),
        "instances_per_kept_frame": float(stats.instances_per_kept_frame),
        "merged_frame_rate": merged_rate,
        "wall_clock_equivalent": float(stats.wall_clock_equivalent),
    }


def compare_datasets(dir_a: str | Path, dir_b: str | Path) -> ComparisonReport:
    """Compare two datasets; deltas are b - a, ratios are b / a."""
    dir_a, dir_b = Path(dir_a), Path(dir_b)
    manifest_a = read_dataset(dir_a, verify=False)
    manifest_b = read_dataset(dir_b, verify=False)
    metrics_a = _comparison_metrics(dir_a)
    metrics_b = _comparison_metrics(dir_b)
    deltas = {m: metrics_b[m] - metrics_a[m] for m in COMPARISON_METRICS}
    ratios = {
        m: (metrics_b[m] / metrics_a[m] if metrics_a[m] != 0 else None)
        for m in COMPARISON_METRICS
    }
    return ComparisonReport(
        name_a=manifest_a.name,
        name_b=manifest_b.name,
        metrics_a=metrics_a,
        metrics_b=metrics_b,
        deltas=deltas,
        ratios=ratios,
    )
