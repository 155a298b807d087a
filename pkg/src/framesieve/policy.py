"""Online keep/drop acquisition over a frame stream.

The policy compares each incoming frame against a reference frame with the
windowed quality index; frames at or above the redundancy threshold are
dropped. Surviving frames then pass quality gates (minimum instance
count, optional rejection of frames with merged same-class regions).
Frames with many instances can raise the effective threshold so that
dense stretches are sampled more tightly.

Decisions must be applied in stream order: every kept frame can become
the new reference. Quality measurement of a single frame is pure, but
``Policy.step`` calls themselves are stateful and not thread-safe.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

import numpy as np

from .frames import DEFAULT_FRAME_PERIOD, Frame
from .quality import (
    DEFAULT_MIN_AREA,
    DEFAULT_WINDOW,
    FrameQuality,
    luma,
    measure_frame,
    uqi_windowed,
)

REFERENCE_MODES = ("previous-kept", "previous-raw")


class Verdict(enum.Enum):
    KEEP = "keep"
    DROP = "drop"


class Reason(enum.Enum):
    FIRST_FRAME = "first_frame"
    NOVEL = "novel"
    REDUNDANT = "redundant"
    TOO_FEW_INSTANCES = "too_few_instances"
    TOO_MANY_MERGED = "too_many_merged"
    # Reserved for the size-capped collection mode; per-frame decisions do
    # not carry it because collection stops consuming once the quota fills
    # (the stats flag quota_reached records the outcome).
    QUOTA_REACHED = "quota_reached"


@dataclass(frozen=True)
class PolicyConfig:
    """Tuning knobs for the acquisition policy.

    tau is the redundancy threshold on the windowed quality index; a frame
    scoring >= the effective threshold against the reference is dropped.
    density_boost is added to tau (capped at 1) when the frame shows at
    least boost_at instances, making dense frames harder to drop.
    """

    tau: float = 0.90
    window_b: int = DEFAULT_WINDOW
    min_instances: int = 0
    drop_merged: bool = False
    max_merged: int = 0
    density_boost: float = 0.05
    boost_at: int = 4
    min_area: int = DEFAULT_MIN_AREA
    reference_mode: str = "previous-kept"

    def __post_init__(self) -> None:
        if not 0.0 < self.tau <= 1.0:
            raise ValueError(f"tau must be in (0, 1], got {self.tau}")
        if self.density_boost < 0:
            raise ValueError(f"density_boost must be non-negative, got {self.density_boost}")
        if self.tau + self.density_boost > 1.0:
            raise ValueError(
                f"tau + density_boost must not exceed 1, got {self.tau + self.density_boost}"
            )
        if self.window_b < 2:
            raise ValueError(f"window_b must be at least 2, got {self.window_b}")
        if self.min_instances < 0:
            raise ValueError(f"min_instances must be non-negative, got {self.min_instances}")
        if self.max_merged < 0:
            raise ValueError(f"max_merged must be non-negative, got {self.max_merged}")
        if self.boost_at < 0:
            raise ValueError(f"boost_at must be non-negative, got {self.boost_at}")
        if self.min_area < 1:
            raise ValueError(f"min_area must be at least 1, got {self.min_area}")
        if self.reference_mode not in REFERENCE_MODES:
            raise ValueError(
                f"reference_mode must be one of {REFERENCE_MODES}, got {self.reference_mode!r}"
            )

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "window_b": self.window_b,
            "min_instances": self.min_instances,
            "drop_merged": self.drop_merged,
            "max_merged": self.max_merged,
            "density_boost": self.density_boost,
            "boost_at": self.boost_at,
            "min_area": self.min_area,
            "reference_mode": self.reference_mode,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PolicyConfig":
        return cls(**data)


@dataclass(frozen=True)
class AcquisitionDecision:
    """Verdict for one frame plus the measurements that justified it."""

    frame_id: int
    verdict: Verdict
    reason: Reason
    quality: FrameQuality

    def __post_init__(self) -> None:
        keep_reasons = (Reason.FIRST_FRAME, Reason.NOVEL)
        if self.verdict is Verdict.KEEP and self.reason not in keep_reasons:
            raise ValueError(f"keep verdict cannot carry reason {self.reason}")


@dataclass(frozen=True)
class CollectionStats:
    """Dataset-side measurables of one collection run."""

    frames_seen: int
    frames_kept: int
    instances_kept: int
    instances_per_kept_frame: float
    merged_frames_seen: int
    wall_clock_equivalent: float
    quota_reached: bool = False

    def to_dict(self) -> dict:
        return {
            "frames_seen": self.frames_seen,
            "frames_kept": self.frames_kept,
            "instances_kept": self.instances_kept,
            "instances_per_kept_frame": self.instances_per_kept_frame,
            "merged_frames_seen": self.merged_frames_seen,
            "wall_clock_equivalent": self.wall_clock_equivalent,
            "quota_reached": self.quota_reached,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CollectionStats":
        return cls(**data)


@dataclass(frozen=True)
class KeptFrame:
    frame: Frame
    quality: FrameQuality


@dataclass
class CollectionRun:
    """Everything one collection pass produced."""

    kept: list[KeptFrame]
    decisions: list[AcquisitionDecision]
    stats: CollectionStats


class Policy:
    """Stateful keep/drop engine; feed frames strictly in stream order."""

    def __init__(self, config: PolicyConfig):
        self.config = config
        self._ref_luma: np.ndarray | None = None
        self._shape: tuple[int, int] | None = None
        self._last_frame_id: int | None = None
        self._last_timestamp: float | None = None

    def step(self, frame: Frame) -> AcquisitionDecision:
        cfg = self.config
        if self._shape is None:
            self._shape = (frame.height, frame.width)
        elif (frame.height, frame.width) != self._shape:
            raise ValueError(
                f"frame {frame.frame_id} is {frame.width}x{frame.height}, "
                f"stream started at {self._shape[1]}x{self._shape[0]}"
            )
        if self._last_frame_id is not None and frame.frame_id <= self._last_frame_id:
            raise ValueError(
                f"frame ids must increase along the stream: {frame.frame_id} after {self._last_frame_id}"
            )
        if self._last_timestamp is not None and frame.timestamp < self._last_timestamp:
            raise ValueError(
                f"timestamps must be non-decreasing: {frame.timestamp} after {self._last_timestamp}"
            )
        self._last_frame_id = frame.frame_id
        self._last_timestamp = frame.timestamp

        quality = measure_frame(frame, min_area=cfg.min_area)
        current = luma(frame.rgb)

        if self._ref_luma is None:
            verdict, reason = Verdict.KEEP, Reason.FIRST_FRAME
        else:
            q = uqi_windowed(current, self._ref_luma, cfg.window_b)
            quality = replace(quality, uqi_vs_reference=q)
            boost = cfg.density_boost if quality.instance_count >= cfg.boost_at else 0.0
            tau_eff = min(1.0, cfg.tau + boost)
            if q >= tau_eff:
                verdict, reason = Verdict.DROP, Reason.REDUNDANT
            elif quality.instance_count < cfg.min_instances:
                verdict, reason = Verdict.DROP, Reason.TOO_FEW_INSTANCES
            elif cfg.drop_merged and quality.merged_component_count > cfg.max_merged:
                verdict, reason = Verdict.DROP, Reason.TOO_MANY_MERGED
            else:
                verdict, reason = Verdict.KEEP, Reason.NOVEL

        if cfg.reference_mode == "previous-raw" or verdict is Verdict.KEEP:
            self._ref_luma = current
        return AcquisitionDecision(frame.frame_id, verdict, reason, quality)


def _as_frame(item) -> Frame:
    if isinstance(item, Frame):
        return item
    frame = getattr(item, "frame", None)
    if isinstance(frame, Frame):
        return frame
    raise TypeError(f"stream items must be frames, got {type(item).__name__}")


def _build_stats(
    decisions: list[AcquisitionDecision],
    kept: list[KeptFrame],
    frame_period: float,
    quota_reached: bool = False,
) -> CollectionStats:
    instances = sum(k.quality.instance_count for k in kept)
    per_frame = instances / len(kept) if kept else 0.0
    merged = sum(1 for d in decisions if d.quality.merged_component_count > 0)
    return CollectionStats(
        frames_seen=len(decisions),
        frames_kept=len(kept),
        instances_kept=instances,
        instances_per_kept_frame=per_frame,
        merged_frames_seen=merged,
        wall_clock_equivalent=len(decisions) * frame_period,
        quota_reached=quota_reached,
    )


def collect_passive(
    stream: Iterable,
    stride: int = 1,
    min_area: int = DEFAULT_MIN_AREA,
    frame_period: float = DEFAULT_FRAME_PERIOD,
) -> CollectionRun:
    """Keep every stride-th frame unconditionally.

    Frames skipped by the stride are logged as redundant drops (the stride
    presumes temporal redundancy); no similarity is computed, so the uqi
    column of the log stays empty.
    """
    if stride < 1:
        raise ValueError(f"stride must be at least 1, got {stride}")
    kept: list[KeptFrame] = []
    decisions: list[AcquisitionDecision] = []
    for index, item in enumerate(stream):
        frame = _as_frame(item)
        quality = measure_frame(frame, min_area=min_area)
        if index % stride == 0:
            reason = Reason.FIRST_FRAME if not kept else Reason.NOVEL
            decisions.append(AcquisitionDecision(frame.frame_id, Verdict.KEEP, reason, quality))
            kept.append(KeptFrame(frame, quality))
        else:
            decisions.append(
                AcquisitionDecision(frame.frame_id, Verdict.DROP, Reason.REDUNDANT, quality)
            )
    if not decisions:
        raise ValueError("cannot collect from an empty stream")
    return CollectionRun(kept, decisions, _build_stats(decisions, kept, frame_period))


def collect_active_time(
    stream: Iterable,
    config: PolicyConfig,
    frame_period: float = DEFAULT_FRAME_PERIOD,
) -> CollectionRun:
    """Run the active policy over the whole stream (equal wall-clock exposure)."""
    policy = Policy(config)
    kept: list[KeptFrame] = []
    decisions: list[AcquisitionDecision] = []
    for item in stream:
        frame = _as_frame(item)
        decision = policy.step(frame)
        decisions.append(decision)
        if decision.verdict is Verdict.KEEP:
            kept.append(KeptFrame(frame, decision.quality))
    if not decisions:
        raise ValueError("cannot collect from an empty stream")
    return CollectionRun(kept, decisions, _build_stats(decisions, kept, frame_period))


def collect_active_size(
    stream: Iterable,
    config: PolicyConfig,
    target_frames: int,
    frame_period: float = DEFAULT_FRAME_PERIOD,
) -> CollectionRun:
    """Run the active policy until target_frames are kept or the stream ends.

    Consumes only as much of the stream as needed. stats.quota_reached
    records whether the target was met; when the stream runs out first,
    frames_kept stays below the target.
    """
    if target_frames < 1:
        raise ValueError(f"target_frames must be at least 1, got {target_frames}")
    policy = Policy(config)
    kept: list[KeptFrame] = []
    decisions: list[AcquisitionDecision] = []
    for item in stream:
        frame = _as_frame(item)
        decision = policy.step(frame)
        decisions.append(decision)
        if decision.verdict is Verdict.KEEP:
            kept.append(KeptFrame(frame, decision.quality))
            if len(kept) >= target_frames:
                break
    if not decisions:
        raise ValueError("cannot collect from an empty stream")
    stats = _build_stats(decisions, kept, frame_period, quota_reached=len(kept) >= target_frames)
    return CollectionRun(kept, decisions, stats)


DECISION_LOG_COLUMNS = ("frame_id", "verdict", "reason", "uqi", "instance_count", "merged_count")


def write_decision_log(decisions: Iterable[AcquisitionDecision], path: str | Path) -> None:
    """Write one CSV record per frame decision (audit trail and plotting input)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(DECISION_LOG_COLUMNS)
        for d in decisions:
            uqi_text = "" if d.quality.uqi_vs_reference is None else repr(d.quality.uqi_vs_reference)
            writer.writerow(
                [
                    d.frame_id,
                    d.verdict.value,
                    d.reason.value,
                    uqi_text,
                    d.quality.instance_count,
                    d.quality.merged_component_count,
                ]
            )
