"""Independent reference implementations used only by the tests.

These deliberately avoid the package's own helpers so they can catch
errors in them.
"""

from collections import deque

import numpy as np

# Truth tables of the detection strategies, written out per slice state.
# Line strategy keyed by (gt point count, pred point count).
LINE_TABLE = {
    (0, 0): None,
    (0, 1): None,
    (0, 2): "fp",
    (1, 0): "fn",
    (1, 1): "fn",
    (1, 2): "tp",
    (2, 0): "fn",
    (2, 1): "fn",
    (2, 2): "tp",
}

# Point strategy keyed by (gt present, pred present).
POINT_TABLE = {
    (False, False): (),
    (False, True): ("fp",),
    (True, False): ("fn",),
    (True, True): ("tp",),
}


def slice_states(gt_dict, pred_dict):
    """gt_dict/pred_dict: {slice: {"ant": (x, y) or None, "inf": ...}}."""
    for k in sorted(set(gt_dict) | set(pred_dict)):
        yield k, gt_dict.get(k, {}), pred_dict.get(k, {})


def brute_line(gt_dict, pred_dict):
    counts = {"tp": 0, "fp": 0, "fn": 0}
    for _, g, p in slice_states(gt_dict, pred_dict):
        ng = sum(g.get(lab) is not None for lab in ("ant", "inf"))
        np_ = sum(p.get(lab) is not None for lab in ("ant", "inf"))
        outcome = LINE_TABLE[(ng, np_)]
        if outcome:
            counts[outcome] += 1
    return counts


def brute_point(gt_dict, pred_dict, lab, spacing=(1.0, 1.0), radius=None, far_fn=True):
    counts = {"tp": 0, "fp": 0, "fn": 0}
    for _, g, p in slice_states(gt_dict, pred_dict):
        gp, pp = g.get(lab), p.get(lab)
        outcomes = POINT_TABLE[(gp is not None, pp is not None)]
        if radius is not None and outcomes == ("tp",):
            dx = (gp[0] - pp[0]) * spacing[0]
            dy = (gp[1] - pp[1]) * spacing[1]
            if (dx * dx + dy * dy) ** 0.5 > radius:
                outcomes = ("fp", "fn") if far_fn else ("fp",)
        for o in outcomes:
            counts[o] += 1
    return counts


def bfs_largest_component(mask, connectivity=26):
    """Largest connected component by breadth-first search.

    Ties go to the component whose first voxel in C order comes first.
    """
    mask = np.asarray(mask, dtype=bool)
    if connectivity == 6:
        offsets = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    else:
        offsets = [
            (dz, dy, dx)
            for dz in (-1, 0, 1)
            for dy in (-1, 0, 1)
            for dx in (-1, 0, 1)
            if (dz, dy, dx) != (0, 0, 0)
        ]
    seen = np.zeros_like(mask)
    best = []
    shape = mask.shape
    for start in zip(*np.nonzero(mask)):  # C order
        if seen[start]:
            continue
        comp = []
        q = deque([start])
        seen[start] = True
        while q:
            v = q.popleft()
            comp.append(v)
            for o in offsets:
                n = (v[0] + o[0], v[1] + o[1], v[2] + o[2])
                if all(0 <= n[i] < shape[i] for i in range(3)) and mask[n] and not seen[n]:
                    seen[n] = True
                    q.append(n)
        if len(comp) > len(best):
            best = comp
    out = np.zeros_like(mask)
    for v in best:
        out[v] = True
    return out
