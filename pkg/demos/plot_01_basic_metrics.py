"""
Scoring one prediction against ground truth
===========================================

A small hand-built case: four slices, one missed landmark and one
prediction that drifts 12 mm away.
"""

from landmark_metrics import (
    CaseLandmarks,
    ImageGeometry,
    Label,
    LandmarkPoint,
    evaluate_case,
    match_line,
    match_point_threshold,
)

# 224x224 pixels at 1.2 mm, ten slices 10 mm apart
geometry = ImageGeometry(224, 224, 10, (1.2, 1.2, 10.0))

ANT, INF = Label.ANTERIOR, Label.INFERIOR


def pair(k, ant, inf):
    pts = []
    if ant:
        pts.append(LandmarkPoint(ANT, k, *ant))
    if inf:
        pts.append(LandmarkPoint(INF, k, *inf))
    return pts


gt = CaseLandmarks.from_points("demo", geometry, [
    *pair(2, (100, 80), (90, 120)),
    *pair(3, (101, 81), (91, 121)),
    *pair(4, (102, 82), (92, 122)),
    *pair(5, (103, 83), (93, 123)),
])

# slice 4 loses its inferior point, slice 5 drifts by 10 pixels (12 mm)
pred = CaseLandmarks.from_points("demo", geometry, [
    *pair(2, (100, 80), (90, 120)),
    *pair(3, (102, 81), (91, 122)),
    *pair(4, (102, 82), None),
    *pair(5, (113, 83), (93, 123)),
])

# The line strategy needs both points per slice, so slice 4 is a miss.
line = match_line(gt, pred)
print("line strategy: TP=%d FP=%d FN=%d" % (line.tp, line.fp, line.fn))

# With the 15 mm radius the drifting anterior point still counts.
thr = match_point_threshold(gt, pred, ANT, radius_mm=15.0)
print("anterior within 15 mm: TP=%d FP=%d FN=%d" % (thr.tp, thr.fp, thr.fn))

# evaluate_case fills in every strategy x localisation method at once.
# NA (None) shows up where a metric has nothing to average.
for r in evaluate_case(gt, pred):
    if r.strategy == "point":
        value = "NA" if r.value is None else "%.3f" % r.value
        print("%-14s %-20s %s" % (r.method or "-", r.metric, value))
