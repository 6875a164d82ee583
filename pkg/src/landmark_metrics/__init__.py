"""
Evaluation metrics for slice-wise detection of paired anatomical landmarks.

Heatmaps are reduced to per-slice points, matched to ground truth under a
line, point or thresholded-point strategy, and scored with detection rates
(TPR/PPV), volume-, slice- and bounded slice-based distances and the septum
angle error. Per-case values are aggregated into mean +/- std with explicit
NA counts.
"""

__version__ = "0.1.0"

from .core import (
    LABELS,
    CaseLandmarks,
    DegenerateAngleError,
    DegenerateMeanError,
    ImageGeometry,
    InputError,
    Label,
    LandmarkError,
    LandmarkPoint,
    SliceLandmarks,
    angle_difference,
    circular_mean,
    distance_mm,
    septum_angle,
    upper_bound_distance,
)
from .detection import (
    ConfusionCounts,
    DetectionStrategy,
    StrategyKind,
    match_line,
    match_point,
    match_point_threshold,
    ppv,
    tpr,
)
from .evaluate import EvalConfig, evaluate_case, evaluate_cohort
from .heatmap import (
    BinaryVolume,
    binarize,
    extract_points,
    heatmaps_to_landmarks,
    largest_component,
)
from .localisation import (
    LocalisationMethod,
    angle_error,
    bounded_slice_distance,
    slice_distance,
    volume_distance,
)
from .report import (
    Aggregate,
    CohortReport,
    MetricRecord,
    aggregate,
    rank_variants,
    ranking_divergence,
)
from .synth import (
    PerturbationSpec,
    divergence_scenario,
    generate_gt,
    perturb,
    perturb_cases,
    rasterize_heatmaps,
)
