"""
Full strategy x method x metric evaluation of predicted landmark sets.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .core import LABELS, CaseLandmarks, InputError, Label
from .detection import (
    DEFAULT_RADIUS_MM,
    StrategyKind,
    match_line,
    match_point,
    match_point_threshold,
    ppv,
    tpr,
)
from .localisation import (
    DEFAULT_ANGLE_BOUND_DEG,
    LocalisationMethod,
    angle_error,
    label_distance,
)
from .report import CohortReport, MetricRecord, aggregate

ALL_STRATEGIES = tuple(s.value for s in StrategyKind)
ALL_METHODS = tuple(m.value for m in LocalisationMethod)


@dataclass(frozen=True)
class EvalConfig:
    strategies: tuple = ALL_STRATEGIES
    methods: tuple = ALL_METHODS
    radius_mm: float = DEFAULT_RADIUS_MM
    global_bound_mm: Optional[float] = None
    angle_bound_deg: float = DEFAULT_ANGLE_BOUND_DEG
    far_counts_fn: bool = True
    volume_angle_mode: str = "points"

    def __post_init__(self):
        strategies = tuple(StrategyKind(s).value for s in self.strategies)
        methods = tuple(LocalisationMethod(m).value for m in self.methods)
        object.__setattr__(self, "strategies", strategies)
        object.__setattr__(self, "methods", methods)
        if not self.radius_mm > 0:
            raise InputError(f"radius_mm must be > 0, got {self.radius_mm}")
        if self.global_bound_mm is not None and not self.global_bound_mm > 0:
            raise InputError(f"global_bound_mm must be > 0, got {self.global_bound_mm}")
        if not 0 < self.angle_bound_deg <= 180:
            raise InputError(f"angle_bound_deg must lie in (0, 180], got {self.angle_bound_deg}")


def _suffix(label: Label) -> str:
    return label.short


def empty_prediction(gt: CaseLandmarks) -> CaseLandmarks:
    return CaseLandmarks(gt.case_id, gt.geometry, ())


def evaluate_case(
    gt: CaseLandmarks,
    pred: CaseLandmarks,
    variant: str = "pred",
    config: EvalConfig = EvalConfig(),
    diagnostics: Optional[Counter] = None,
) -> list:
    """Every configured metric for one case, as :class:`MetricRecord` s."""
    if diagnostics is None:
        diagnostics = Counter()
    geometry = gt.geometry
    records = []

    def add(strategy, method, metric, value):
        records.append(MetricRecord(gt.case_id, variant, strategy, method, metric, value))

    for strategy in config.strategies:
        kind = StrategyKind(strategy)
        if kind is StrategyKind.LINE:
            c = match_line(gt, pred)
            diagnostics.update(c.diagnostics)
            add(strategy, "", "tpr", tpr(c))
            add(strategy, "", "ppv", ppv(c))
            for method in config.methods:
                for label in LABELS:
                    d = label_distance(c, label, method, geometry, config.global_bound_mm)
                    add(strategy, method, f"d_{_suffix(label)}", d)
                a = angle_error(
                    gt,
                    pred,
                    c,
                    method,
                    angle_bound_deg=config.angle_bound_deg,
                    volume_mode=config.volume_angle_mode,
                    diagnostics=diagnostics,
                )
                add(strategy, method, "delta_alpha", a)
            continue

        per_label = {}
        for label in LABELS:
            if kind is StrategyKind.POINT:
                c = match_point(gt, pred, label)
            else:
                c = match_point_threshold(
                    gt, pred, label, config.radius_mm, far_counts_fn=config.far_counts_fn
                )
            diagnostics.update(c.diagnostics)
            per_label[label] = c
        for label in LABELS:
            add(strategy, "", f"tpr_{_suffix(label)}", tpr(per_label[label]))
        for label in LABELS:
            add(strategy, "", f"ppv_{_suffix(label)}", ppv(per_label[label]))
        for method in config.methods:
            for label in LABELS:
                d = label_distance(per_label[label], label, method, geometry, config.global_bound_mm)
                add(strategy, method, f"d_{_suffix(label)}", d)
    return records


def _evaluate_job(args):
    gt, pred, variant, config = args
    diag = Counter()
    return evaluate_case(gt, pred, variant, config, diag), diag


@dataclass
class CohortMatch:
    """Pairing of GT and predicted cases by case_id."""

    pairs: list = field(default_factory=list)
    missing_pred: list = field(default_factory=list)
    extra_pred: list = field(default_factory=list)
    geometry_mismatch: list = field(default_factory=list)

    @property
    def problems(self) -> list:
        out = [f"case {c!r}: no prediction" for c in self.missing_pred]
        out += [f"case {c!r}: prediction without ground truth" for c in self.extra_pred]
        out += [f"case {c!r}: geometry mismatch" for c in self.geometry_mismatch]
        return out


def match_cases(gt_cases, pred_cases) -> CohortMatch:
    """Pair cases by id. Cases without a prediction get an empty one."""
    preds = {c.case_id: c for c in pred_cases}
    gt_ids = set()
    m = CohortMatch()
    for g in gt_cases:
        gt_ids.add(g.case_id)
        p = preds.get(g.case_id)
        if p is None:
            m.missing_pred.append(g.case_id)
            m.pairs.append((g, empty_prediction(g)))
        elif not g.geometry.compatible(p.geometry):
            m.geometry_mismatch.append(g.case_id)
        else:
            m.pairs.append((g, p))
    m.extra_pred = sorted(set(preds) - gt_ids)
    return m


def evaluate_cohort(
    gt_cases,
    variants: dict,
    config: EvalConfig = EvalConfig(),
    workers: int = 1,
    diagnostics: Optional[Counter] = None,
) -> CohortReport:
    """Evaluate every variant (name -> list of predicted cases) against GT.

    GT cases absent from a variant are evaluated against an empty
    prediction, so they count as misses. Geometry mismatches raise.
    Results are ordered by variant name, then GT case order, independent of
    ``workers``.
    """
    jobs = []
    for name in sorted(variants):
        m = match_cases(gt_cases, variants[name])
        if m.geometry_mismatch:
            raise InputError(f"variant {name!r}: " + "; ".join(m.problems))
        jobs.extend((g, p, name, config) for g, p in m.pairs)

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_evaluate_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_evaluate_job(j) for j in jobs]

    records = []
    for recs, diag in results:
        records.extend(recs)
        if diagnostics is not None:
            diagnostics.update(diag)
    return aggregate(records)
