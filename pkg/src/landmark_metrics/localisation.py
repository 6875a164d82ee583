"""
Localisation errors for matched landmark pairs and the septum-angle error.

Three aggregation schemes per case and label:

* ``volume``: distance between the mean GT point and the mean predicted
  point over all matched slices.
* ``slice``: mean of the per-slice distances.
* ``slice-bounded``: as ``slice`` but every missed GT point contributes its
  distance to the farthest image corner (or a fixed global bound).

The septum angle error follows the same three schemes; a missed slice costs
the angle bound (180 degrees by default).
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from typing import Optional, Sequence

from .core import (
    CaseLandmarks,
    DegenerateAngleError,
    DegenerateMeanError,
    ImageGeometry,
    Label,
    LandmarkPoint,
    angle_difference,
    circular_mean,
    distance_mm,
    septum_angle,
    upper_bound_distance,
)
from .detection import ConfusionCounts

DEFAULT_ANGLE_BOUND_DEG = 180.0


class LocalisationMethod(enum.Enum):
    VOLUME = "volume"
    SLICE = "slice"
    SLICE_BOUNDED = "slice-bounded"


def _mean_point(points: Sequence[LandmarkPoint]) -> LandmarkPoint:
    n = len(points)
    return LandmarkPoint(
        points[0].label,
        points[0].slice_index,
        sum(p.x for p in points) / n,
        sum(p.y for p in points) / n,
    )


def volume_distance(pairs, geometry: ImageGeometry) -> Optional[float]:
    """Distance between the mean GT and mean predicted location, or ``None``."""
    if not pairs:
        return None
    g = _mean_point([gp for gp, _ in pairs])
    p = _mean_point([pp for _, pp in pairs])
    return distance_mm(g, p, geometry)


def slice_distance(pairs, geometry: ImageGeometry) -> Optional[float]:
    if not pairs:
        return None
    return sum(distance_mm(g, p, geometry) for g, p in pairs) / len(pairs)


def bounded_slice_distance(
    pairs,
    fn_gt_points,
    geometry: ImageGeometry,
    global_bound_mm: Optional[float] = None,
) -> Optional[float]:
    """Mean per-slice distance where each missed GT point costs a bound.

    The bound is the distance to the farthest image corner unless
    ``global_bound_mm`` fixes one value for every image.
    """
    values = [distance_mm(g, p, geometry) for g, p in pairs]
    if global_bound_mm is not None:
        values.extend(float(global_bound_mm) for _ in fn_gt_points)
    else:
        values.extend(upper_bound_distance(g, geometry) for g in fn_gt_points)
    if not values:
        return None
    return sum(values) / len(values)


def label_distance(
    counts: ConfusionCounts,
    label: Label,
    method: LocalisationMethod,
    geometry: ImageGeometry,
    global_bound_mm: Optional[float] = None,
) -> Optional[float]:
    pairs = counts.pairs(label)
    method = LocalisationMethod(method)
    if method is LocalisationMethod.VOLUME:
        return volume_distance(pairs, geometry)
    if method is LocalisationMethod.SLICE:
        return slice_distance(pairs, geometry)
    return bounded_slice_distance(pairs, counts.missed(label), geometry, global_bound_mm)


def _complete_slices(case: CaseLandmarks, indices):
    m = case.slice_map()
    out = []
    for k in indices:
        s = m.get(k)
        if s is not None and s.anterior is not None and s.inferior is not None:
            out.append(s)
    return out


def angle_error(
    gt: CaseLandmarks,
    pred: CaseLandmarks,
    line_counts: ConfusionCounts,
    method: LocalisationMethod,
    angle_bound_deg: float = DEFAULT_ANGLE_BOUND_DEG,
    volume_mode: str = "points",
    diagnostics: Optional[Counter] = None,
) -> Optional[float]:
    """Septum angle error in degrees, or ``None`` if no slice contributes.

    ``line_counts`` must come from :func:`match_line`. Slices whose GT or
    predicted septum is degenerate are skipped and tallied under
    ``diagnostics['degenerate_angle']``.

    For the volume scheme the septum of the mean GT points is compared with
    the septum of the mean predicted points (``volume_mode="points"``), or
    the circular means of the per-slice angles (``volume_mode="circular"``).
    """
    method = LocalisationMethod(method)
    if diagnostics is None:
        diagnostics = Counter()
    geometry = gt.geometry
    pm = pred.slice_map()

    gt_slices = _complete_slices(gt, line_counts.tp_slices)
    pairs = [(gs, pm[gs.slice_index]) for gs in gt_slices]

    if method is LocalisationMethod.VOLUME:
        if not pairs:
            return None
        try:
            if volume_mode == "points":
                ga = septum_angle(
                    _mean_point([g.anterior for g, _ in pairs]),
                    _mean_point([g.inferior for g, _ in pairs]),
                    geometry,
                )
                pa = septum_angle(
                    _mean_point([p.anterior for _, p in pairs]),
                    _mean_point([p.inferior for _, p in pairs]),
                    geometry,
                )
            elif volume_mode == "circular":
                ga = circular_mean([septum_angle(g.anterior, g.inferior, geometry) for g, _ in pairs])
                pa = circular_mean([septum_angle(p.anterior, p.inferior, geometry) for _, p in pairs])
            else:
                raise ValueError(f"unknown volume_mode {volume_mode!r}")
        except (DegenerateAngleError, DegenerateMeanError):
            diagnostics["degenerate_angle"] += 1
            return None
        return angle_difference(ga, pa)

    diffs = []
    for g, p in pairs:
        try:
            diffs.append(
                angle_difference(
                    septum_angle(g.anterior, g.inferior, geometry),
                    septum_angle(p.anterior, p.inferior, geometry),
                )
            )
        except DegenerateAngleError:
            diagnostics["degenerate_angle"] += 1
    if method is LocalisationMethod.SLICE_BOUNDED:
        diffs.extend(float(angle_bound_deg) for _ in line_counts.fn_slices)
    if not diffs:
        return None
    return math.fsum(diffs) / len(diffs)
