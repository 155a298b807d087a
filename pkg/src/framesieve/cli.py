"""Command-line pipeline: synth, collect, label, stats, eval, compare.

Every subcommand is deterministic given identical flags and inputs (all
randomness flows from explicit seeds). Data goes to files and stdout;
diagnostics go to stderr; the exit code is 0 only when nothing failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import datasets as ds
from . import evaluation as ev
from . import labeling as lb
from . import policy as pol
from . import synth
from .boxes import yolo_to_pixel_box
from .quality import DEFAULT_MIN_AREA, DEFAULT_WINDOW


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="framesieve",
        description="Generate synthetic scenes, collect frames actively or passively, "
        "label them from masks, and evaluate detections.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic scene and export it")
    p.add_argument("--preset", choices=synth.PRESETS, default="stop_and_go")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frames", type=int, default=120, help="number of frames to generate")
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--vehicles", type=int, default=None)
    p.add_argument("--lights", type=int, default=None)
    p.add_argument("--out", required=True, help="scene output directory")

    p = sub.add_parser("collect", help="run one collection mode over an exported scene")
    p.add_argument("--scene", required=True, help="scene directory from `synth`")
    p.add_argument("--mode", choices=ds.COLLECTION_MODES, required=True)
    p.add_argument("--out", required=True, help="dataset output directory")
    p.add_argument("--name", default=None, help="dataset name (default: output directory name)")
    p.add_argument("--stride", type=int, default=1, help="passive mode: keep every n-th frame")
    p.add_argument("--tau", type=float, default=0.90, help="redundancy threshold")
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW, help="similarity tile size")
    p.add_argument("--min-instances", type=int, default=0)
    p.add_argument("--drop-merged", action="store_true")
    p.add_argument("--max-merged", type=int, default=0)
    p.add_argument("--density-boost", type=float, default=0.05)
    p.add_argument("--boost-at", type=int, default=4)
    p.add_argument("--min-area", type=int, default=DEFAULT_MIN_AREA)
    p.add_argument("--reference-mode", choices=pol.REFERENCE_MODES, default="previous-kept")
    p.add_argument("--target-frames", type=int, default=None, help="active-size mode: kept-frame quota")
    p.add_argument("--decisions-csv", default=None, help="decision log path (default: <out>/decisions.csv)")

    p = sub.add_parser("label", help="write label files for every frame of a scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--out", required=True, help="directory for <frame_id>.txt label files")
    p.add_argument("--min-area", type=int, default=DEFAULT_MIN_AREA)

    p = sub.add_parser("stats", help="recount dataset statistics from its label files")
    p.add_argument("dataset", help="dataset directory")
    p.add_argument("--csv", default=None, help="also write the stats as CSV")

    p = sub.add_parser("eval", help="score predictions against a dataset's labels")
    p.add_argument("--preds", required=True, help="directory of <frame_id>.txt prediction files")
    p.add_argument("--truth", required=True, help="dataset directory with ground-truth labels")
    p.add_argument("--iou", type=float, default=0.5)
    p.add_argument("--ap-mode", choices=ev.AP_MODES, default="101-point")
    p.add_argument("--conf", type=float, default=0.25, help="confidence cut for precision/recall")
    p.add_argument("--csv", default=None, help="also write the report as CSV")

    p = sub.add_parser("compare", help="compare two datasets")
    p.add_argument("dataset_a")
    p.add_argument("dataset_b")
    p.add_argument("--csv", default=None, help="also write the comparison as CSV")

    return parser


def _cmd_synth(args) -> int:
    overrides: dict = {"n_frames": args.frames}
    if args.width is not None:
        overrides["width"] = args.width
    if args.height is not None:
        overrides["height"] = args.height
    if args.vehicles is not None:
        overrides["n_vehicles"] = args.vehicles
    if args.lights is not None:
        overrides["n_lights"] = args.lights
    config = synth.preset_config(args.preset, seed=args.seed, **overrides)
    count = synth.export_scene(synth.generate(config), args.out, config=config)
    print(f"scene {args.out}: {count} frames, preset {args.preset}, seed {args.seed}")
    return 0


def _cmd_collect(args) -> int:
    stream = synth.import_scene(args.scene)
    frame_period = None
    scene_config = json.loads((Path(args.scene) / "scene.json").read_text()).get("config")
    if scene_config:
        frame_period = scene_config.get("frame_period")
    if frame_period is None:
        frame_period = synth.DEFAULT_FRAME_PERIOD

    name = args.name or Path(args.out).name
    preset = scene_config.get("preset") if scene_config else None
    if args.mode == "passive":
        run = pol.collect_passive(
            stream, stride=args.stride, min_area=args.min_area, frame_period=frame_period
        )
        policy_config = None
    else:
        policy_config = pol.PolicyConfig(
            tau=args.tau,
            window_b=args.window,
            min_instances=args.min_instances,
            drop_merged=args.drop_merged,
            max_merged=args.max_merged,
            density_boost=args.density_boost,
            boost_at=args.boost_at,
            min_area=args.min_area,
            reference_mode=args.reference_mode,
        )
        if args.mode == "active-time":
            run = pol.collect_active_time(stream, policy_config, frame_period=frame_period)
        else:
            if args.target_frames is None:
                raise ValueError("active-size mode requires --target-frames")
            run = pol.collect_active_size(
                stream, policy_config, args.target_frames, frame_period=frame_period
            )

    ds.write_dataset(
        run.kept,
        run.stats,
        args.out,
        name=name,
        collection_mode=args.mode,
        preset=preset,
        stride=args.stride if args.mode == "passive" else None,
        policy_config=policy_config,
        min_area=args.min_area,
    )
    decisions_path = args.decisions_csv or str(Path(args.out) / "decisions.csv")
    pol.write_decision_log(run.decisions, decisions_path)
    stats = run.stats
    note = ""
    if args.mode == "active-size" and not stats.quota_reached:
        note = " (stream exhausted before the target)"
    print(
        f"dataset {args.out}: kept {stats.frames_kept}/{stats.frames_seen} frames, "
        f"{stats.instances_kept} instances{note}"
    )
    return 0


def _cmd_label(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    count = 0
    for gt in synth.import_scene(args.scene):
        frame = gt.frame
        records = lb.extract_instances(frame, min_area=args.min_area)
        labels = lb.to_yolo_labels(records, frame.width, frame.height)
        lb.write_label_file(labels, out / f"{frame.frame_id:06d}.txt")
        count += 1
    print(f"labels {args.out}: {count} files")
    return 0


def _cmd_stats(args) -> int:
    report = ds.dataset_stats(args.dataset)
    print(report.format_table())
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if args.csv:
        report.write_csv(args.csv)
    return 0


def _cmd_eval(args) -> int:
    manifest = ds.read_dataset(args.truth, verify=False)
    truth_dir = Path(args.truth)
    preds_dir = Path(args.preds)
    truths: list[ev.TruthBox] = []
    preds: list[ev.Detection] = []
    for entry in manifest.entries:
        for label in lb.read_label_file(truth_dir / entry.label_path):
            box = yolo_to_pixel_box(label.geometry, entry.width, entry.height)
            truths.append(ev.TruthBox(entry.frame_id, label.class_id, box))
        pred_path = preds_dir / f"{entry.frame_id:06d}.txt"
        if pred_path.exists():
            preds.extend(
                ev.read_prediction_file(pred_path, entry.frame_id, entry.width, entry.height)
            )
    config = ev.EvalConfig(iou_threshold=args.iou, ap_mode=args.ap_mode, confidence_cut=args.conf)
    report = ev.evaluate(preds, truths, config)
    print(report.format_table())
    if args.csv:
        report.write_csv(args.csv)
    return 0


def _cmd_compare(args) -> int:
    report = ds.compare_datasets(args.dataset_a, args.dataset_b)
    print(report.format_table())
    if args.csv:
        report.write_csv(args.csv)
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "collect": _cmd_collect,
    "label": _cmd_label,
    "stats": _cmd_stats,
    "eval": _cmd_eval,
    "compare": _cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
