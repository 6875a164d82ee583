"""
Slice-wise TP/FP/FN counting under three detection strategies.

``line``
    A slice counts only when both landmarks are present. GT both + PRED
    both is a TP, GT both + PRED incomplete is a FN, GT empty + PRED both
    is a FP.
``point``
    Each landmark is counted on its own: present/present is a TP,
    present/absent a FN, absent/present a FP.
``point-threshold``
    As ``point``, but a same-slice prediction only counts as TP when it lies
    within ``radius_mm`` of the GT point. A farther prediction is a FP and,
    by default, the GT point it failed to hit is also a FN.
"""

from __future__ import annotations

import enum
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .core import LABELS, CaseLandmarks, InputError, Label, distance_mm

DEFAULT_RADIUS_MM = 15.0


class StrategyKind(enum.Enum):
    LINE = "line"
    POINT = "point"
    POINT_THRESHOLD = "point-threshold"


@dataclass(frozen=True)
class DetectionStrategy:
    kind: StrategyKind
    radius_mm: Optional[float] = None

    def __post_init__(self):
        kind = StrategyKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is StrategyKind.POINT_THRESHOLD:
            r = DEFAULT_RADIUS_MM if self.radius_mm is None else float(self.radius_mm)
            if not r > 0:
                raise InputError(f"radius_mm must be > 0, got {r}")
            object.__setattr__(self, "radius_mm", r)
        elif self.radius_mm is not None:
            raise InputError("radius_mm only applies to the point-threshold strategy")

    @property
    def name(self) -> str:
        return self.kind.value


@dataclass
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    matched_pairs: list = field(default_factory=list)
    unmatched_gt: list = field(default_factory=list)
    # slice bookkeeping, used by the septum-angle error
    tp_slices: list = field(default_factory=list)
    fn_slices: list = field(default_factory=list)
    fp_slices: list = field(default_factory=list)
    diagnostics: Counter = field(default_factory=Counter)

    def pairs(self, label: Label) -> list:
        return [(g, p) for g, p in self.matched_pairs if g.label is label]

    def missed(self, label: Label) -> list:
        return [g for g in self.unmatched_gt if g.label is label]


def tpr(c: ConfusionCounts) -> Optional[float]:
    """TP / (TP + FN), or ``None`` when nothing was there to find."""
    d = c.tp + c.fn
    return None if d == 0 else c.tp / d


def ppv(c: ConfusionCounts) -> Optional[float]:
    """TP / (TP + FP), or ``None`` when nothing was predicted."""
    d = c.tp + c.fp
    return None if d == 0 else c.tp / d


def _check_pair(gt: CaseLandmarks, pred: CaseLandmarks) -> None:
    if not gt.geometry.compatible(pred.geometry):
        raise InputError(
            f"case {gt.case_id!r}: GT geometry {gt.geometry} incompatible with "
            f"prediction geometry {pred.geometry}"
        )


def _slice_union(gt: CaseLandmarks, pred: CaseLandmarks):
    g, p = gt.slice_map(), pred.slice_map()
    for k in sorted(set(g) | set(p)):
        yield k, g.get(k), p.get(k)


def _count(s) -> int:
    return 0 if s is None else s.count


def match_line(gt: CaseLandmarks, pred: CaseLandmarks) -> ConfusionCounts:
    """Slice-level counting where only complete (two-point) slices matter.

    A GT-empty slice with a single predicted point is neither FP nor FN; it
    is tallied in ``diagnostics['gt_empty_single_pred']``. A GT slice with a
    single point is handled like a complete GT slice and tallied in
    ``diagnostics['gt_single_point']``.
    """
    _check_pair(gt, pred)
    c = ConfusionCounts()
    for k, gs, ps in _slice_union(gt, pred):
        ng, np_ = _count(gs), _count(ps)
        if ng == 0:
            if np_ == 2:
                c.fp += 1
                c.fp_slices.append(k)
            elif np_ == 1:
                c.diagnostics["gt_empty_single_pred"] += 1
            continue
        if ng == 1:
            c.diagnostics["gt_single_point"] += 1
            warnings.warn(
                f"case {gt.case_id!r}, slice {k}: ground truth has only one landmark",
                stacklevel=2,
            )
        if np_ == 2:
            c.tp += 1
            c.tp_slices.append(k)
            for label in LABELS:
                g = gs.get(label)
                if g is not None:
                    c.matched_pairs.append((g, ps.get(label)))
        else:
            c.fn += 1
            c.fn_slices.append(k)
            c.unmatched_gt.extend(gt_p for gt_p in (gs.anterior, gs.inferior) if gt_p is not None)
    return c


def match_point(gt: CaseLandmarks, pred: CaseLandmarks, label: Label) -> ConfusionCounts:
    """Per-landmark counting on each slice."""
    _check_pair(gt, pred)
    c = ConfusionCounts()
    for k, gs, ps in _slice_union(gt, pred):
        g = None if gs is None else gs.get(label)
        p = None if ps is None else ps.get(label)
        if g is not None and p is not None:
            c.tp += 1
            c.tp_slices.append(k)
            c.matched_pairs.append((g, p))
        elif g is not None:
            c.fn += 1
            c.fn_slices.append(k)
            c.unmatched_gt.append(g)
        elif p is not None:
            c.fp += 1
            c.fp_slices.append(k)
    return c


def match_point_threshold(
    gt: CaseLandmarks,
    pred: CaseLandmarks,
    label: Label,
    radius_mm: float = DEFAULT_RADIUS_MM,
    far_counts_fn: bool = True,
) -> ConfusionCounts:
    """Per-landmark counting with a distance tolerance (inclusive).

    With ``far_counts_fn=False`` a too-distant prediction is only a FP and
    its GT point is neither matched nor missed.
    """
    if not radius_mm > 0:
        raise InputError(f"radius_mm must be > 0, got {radius_mm}")
    _check_pair(gt, pred)
    c = ConfusionCounts()
    for k, gs, ps in _slice_union(gt, pred):
        g = None if gs is None else gs.get(label)
        p = None if ps is None else ps.get(label)
        if g is not None and p is not None:
            if distance_mm(g, p, gt.geometry) <= radius_mm:
                c.tp += 1
                c.tp_slices.append(k)
                c.matched_pairs.append((g, p))
            else:
                c.fp += 1
                c.fp_slices.append(k)
                c.diagnostics["far_prediction"] += 1
                if far_counts_fn:
                    c.fn += 1
                    c.fn_slices.append(k)
                    c.unmatched_gt.append(g)
        elif g is not None:
            c.fn += 1
            c.fn_slices.append(k)
            c.unmatched_gt.append(g)
        elif p is not None:
            c.fp += 1
            c.fp_slices.append(k)
    return c
