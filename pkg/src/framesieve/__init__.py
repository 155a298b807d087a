"""Active frame acquisition, labeling, and evaluation for perception datasets.

The pipeline, end to end: a deterministic synthetic street scene (or any
stream of frames with semantic and instance masks) flows through an
online keep/drop policy driven by image similarity and frame quality;
kept frames are labeled straight from their masks into normalized box
annotations; datasets are persisted with a manifest; detection outputs
are scored against the labels with standard IoU/AP metrics.
"""

from .boxes import PixelBox, YoloLabel, pixel_box_to_yolo, yolo_to_pixel_box
from .datasets import (
    ComparisonReport,
    DatasetEntry,
    DatasetError,
    DatasetManifest,
    StatsReport,
    compare_datasets,
    dataset_stats,
    read_dataset,
    write_dataset,
)
from .evaluation import (
    Detection,
    EvalConfig,
    EvalReport,
    MatchResult,
    PredictionFormatError,
    TruthBox,
    average_precision,
    evaluate,
    iou,
    match_detections,
    read_prediction_file,
    write_prediction_file,
)
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
    images_equal,
    load_png,
    save_png,
)
from .labeling import (
    InstanceRecord,
    IntegrityError,
    LabelFormatError,
    extract_instances,
    read_label_file,
    to_yolo_labels,
    write_label_file,
)
from .palette import (
    BACKGROUND,
    DEFAULT_EXPORT_CLASS_MAP,
    DEFAULT_PALETTE,
    ROAD,
    TRAFFIC_LIGHT,
    VEHICLE,
    ClassDef,
    Palette,
    PaletteError,
)
from .policy import (
    AcquisitionDecision,
    CollectionRun,
    CollectionStats,
    KeptFrame,
    Policy,
    PolicyConfig,
    Reason,
    Verdict,
    collect_active_size,
    collect_active_time,
    collect_passive,
    write_decision_log,
)
from .quality import (
    DEFAULT_MIN_AREA,
    DEFAULT_WINDOW,
    FrameQuality,
    WindowStats,
    frame_similarity,
    instance_stats,
    luma,
    measure_frame,
    merged_components,
    occlusion_degree,
    uqi,
    uqi_windowed,
    window_stats,
)
from .synth import (
    PRESETS,
    GroundTruthFrame,
    SceneConfig,
    export_scene,
    generate,
    ground_truth_equal,
    import_scene,
    preset_config,
    stop_and_go_pauses,
)

__version__ = "0.1.0"
