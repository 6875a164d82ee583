"""
Heatmap post-processing: threshold, keep the largest connected component,
reduce each slice of the component to its centroid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import LABELS, CaseLandmarks, ImageGeometry, InputError, Label, LandmarkPoint
from .io.nifti import HeatmapVolume

DEFAULT_THRESHOLD = 0.5
DEFAULT_CONNECTIVITY = 26

# 8 = two-dimensional, per slice
CONNECTIVITIES = (6, 26, 8)


@dataclass(frozen=True, eq=False)
class BinaryVolume:
    geometry: ImageGeometry
    voxels: np.ndarray  # bool, (slices, rows, cols)

    def __post_init__(self):
        v = np.asarray(self.voxels, dtype=bool)
        g = self.geometry
        if v.shape != (g.slices, g.height, g.width):
            raise InputError(f"voxel grid {v.shape} does not match geometry {g}")
        object.__setattr__(self, "voxels", v)

    def __eq__(self, other):
        if not isinstance(other, BinaryVolume):
            return NotImplemented
        return self.geometry == other.geometry and np.array_equal(self.voxels, other.voxels)


def binarize(volume: HeatmapVolume, channel: int, t: float = DEFAULT_THRESHOLD) -> BinaryVolume:
    """Foreground where the channel value is strictly above ``t``."""
    if not 0 <= t <= 1:
        raise InputError(f"threshold must lie in [0, 1], got {t}")
    if not 0 <= channel < volume.channels:
        raise InputError(f"channel {channel} out of range for {volume.channels} channels")
    return BinaryVolume(volume.geometry, volume.data[channel] > t)


def _structure(connectivity: int) -> np.ndarray:
    if connectivity == 6:
        return ndimage.generate_binary_structure(3, 1)
    if connectivity == 26:
        return ndimage.generate_binary_structure(3, 3)
    if connectivity == 8:
        s = np.zeros((3, 3, 3), dtype=bool)
        s[1] = True
        return s
    raise InputError(f"connectivity must be one of {CONNECTIVITIES}, got {connectivity}")


def _keep_largest(mask: np.ndarray, structure: np.ndarray) -> np.ndarray:
    labels, n = ndimage.label(mask, structure=structure)
    if n == 0:
        return np.zeros_like(mask)
    sizes = np.bincount(labels.ravel(), minlength=n + 1)[1:]
    best = np.flatnonzero(sizes == sizes.max()) + 1
    if len(best) > 1:
        # tie: the component holding the first voxel in (slice, row, col) order
        flat = labels.ravel()
        first = {lab: np.flatnonzero(flat == lab)[0] for lab in best}
        winner = min(best, key=lambda lab: first[lab])
    else:
        winner = best[0]
    return labels == winner


def largest_component(binary: BinaryVolume, connectivity: int = DEFAULT_CONNECTIVITY) -> BinaryVolume:
    """Keep only the largest connected component.

    ``connectivity`` is 6 or 26 for 3D neighbourhoods. With 8, components
    are found per slice in 2D and each slice keeps its own largest one.
    Equal-size components are resolved in favour of the one containing the
    lexicographically smallest (slice, row, col) voxel.
    """
    structure = _structure(connectivity)
    if connectivity == 8:
        out = np.zeros_like(binary.voxels)
        for z in range(binary.voxels.shape[0]):
            if binary.voxels[z].any():
                out[z] = _keep_largest(binary.voxels[z], structure[1])
        return BinaryVolume(binary.geometry, out)
    return BinaryVolume(binary.geometry, _keep_largest(binary.voxels, structure))


def extract_points(binary: BinaryVolume, label: Label) -> list:
    """One centroid point per slice that has foreground voxels."""
    points = []
    for z in np.flatnonzero(binary.voxels.any(axis=(1, 2))):
        ys, xs = np.nonzero(binary.voxels[z])
        points.append(LandmarkPoint(label, int(z), float(xs.mean()), float(ys.mean())))
    return points


def heatmaps_to_landmarks(
    pred: HeatmapVolume,
    t: float = DEFAULT_THRESHOLD,
    connectivity: int = DEFAULT_CONNECTIVITY,
    case_id: str = "",
) -> CaseLandmarks:
    """Full post-processing of a two-channel (anterior, inferior) prediction."""
    if pred.channels != 2:
        raise InputError(f"expected 2 channels (anterior, inferior), got {pred.channels}")
    points = []
    for channel, label in enumerate(LABELS):
        comp = largest_component(binarize(pred, channel, t), connectivity)
        points.extend(extract_points(comp, label))
    return CaseLandmarks.from_points(case_id, pred.geometry, points)
