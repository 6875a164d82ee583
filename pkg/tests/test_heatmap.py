import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from landmark_metrics import (
    BinaryVolume,
    ImageGeometry,
    InputError,
    Label,
    binarize,
    extract_points,
    heatmaps_to_landmarks,
    largest_component,
)
from landmark_metrics.io import HeatmapVolume

import oracles

ANT, INF = Label.ANTERIOR, Label.INFERIOR


def vol_from(data, spacing=(1.0, 1.0, 1.0)):
    data = np.asarray(data, dtype=float)
    if data.ndim == 3:
        data = data[None]
    _, z, y, x = data.shape
    return HeatmapVolume(data, ImageGeometry(x, y, z, spacing))


def bin_from(mask):
    mask = np.asarray(mask, dtype=bool)
    z, y, x = mask.shape
    return BinaryVolume(ImageGeometry(x, y, z), mask)


def test_binarize_is_strict():
    v = vol_from(np.array([[[0.51, 0.5, 0.49]]]))
    assert binarize(v, 0, 0.5).voxels.tolist() == [[[True, False, False]]]
    assert not binarize(vol_from(np.zeros((2, 3, 3))), 0).voxels.any()
    assert not binarize(vol_from(np.full((1, 3, 3), 0.5)), 0).voxels.any()


def test_binarize_rejects_bad_arguments():
    v = vol_from(np.zeros((1, 2, 2)))
    with pytest.raises(InputError):
        binarize(v, 1)
    with pytest.raises(InputError):
        binarize(v, 0, 1.5)


def test_keeps_larger_component():
    m = np.zeros((1, 10, 10), bool)
    m[0, 0:2, 0:5] = True  # 10 voxels
    m[0, 6:8, 6:8] = True  # 4 voxels
    out = largest_component(bin_from(m)).voxels
    assert out.sum() == 10 and out[0, 0, 0]


def test_single_component_unchanged_and_empty():
    m = np.zeros((2, 5, 5), bool)
    m[0, 1:3, 1:3] = m[1, 2:4, 2:4] = True
    assert largest_component(bin_from(m)) == bin_from(m)
    assert not largest_component(bin_from(np.zeros((2, 3, 3)))).voxels.any()


def test_tie_goes_to_lexicographically_first_voxel():
    m = np.zeros((2, 6, 6), bool)
    m[1, 0, 0:3] = True  # first voxel (1, 0, 0)
    m[0, 4, 3:6] = True  # first voxel (0, 4, 3) - smaller
    out = largest_component(bin_from(m), 26).voxels
    assert out[0, 4, 3] and not out[1, 0, 0]
    # the scan order of labels must not matter: mirror along x
    out2 = largest_component(bin_from(m[:, :, ::-1]), 26).voxels
    assert out2[0, 4].any() and not out2[1].any()


def test_connectivity_modes():
    m = np.zeros((2, 4, 4), bool)
    m[0, 0, 0] = m[0, 1, 1] = True   # diagonal neighbours in-plane
    m[1, 3, 3] = m[1, 3, 2] = m[1, 2, 3] = True
    out6 = largest_component(bin_from(m), 6).voxels
    assert out6.sum() == 3 and not out6[0].any()
    out26 = largest_component(bin_from(m), 26).voxels
    assert out26.sum() == 3
    # per-slice mode keeps one component in each slice
    out8 = largest_component(bin_from(m), 8).voxels
    assert out8[0].sum() == 2 and out8[1].sum() == 3
    with pytest.raises(InputError):
        largest_component(bin_from(m), 4)


masks = arrays(bool, st.tuples(st.integers(1, 4), st.integers(1, 6), st.integers(1, 6)))


@settings(max_examples=150)
@given(masks, st.sampled_from([6, 26]))
def test_largest_component_matches_bfs_and_is_idempotent(mask, conn):
    b = bin_from(mask)
    out = largest_component(b, conn)
    np.testing.assert_array_equal(out.voxels, oracles.bfs_largest_component(mask, conn))
    assert largest_component(out, conn) == out
    assert not (out.voxels & ~mask).any()


def test_extract_points_centroid():
    m = np.zeros((5, 20, 20), bool)
    m[0, 10:12, 10:12] = True
    pts = extract_points(bin_from(m), ANT)
    assert [(p.slice_index, p.x, p.y) for p in pts] == [(0, 10.5, 10.5)]
    m = np.zeros((5, 10, 10), bool)
    m[2:5, 3, 4] = True
    assert [p.slice_index for p in extract_points(bin_from(m), INF)] == [2, 3, 4]
    m = np.zeros((1, 10, 10), bool)
    m[0, 3, 7] = True
    (p,) = extract_points(bin_from(m), ANT)
    assert (p.x, p.y) == (7.0, 3.0)
    assert extract_points(bin_from(np.zeros((2, 3, 3))), ANT) == []


@settings(max_examples=100)
@given(masks)
def test_centroids_inside_bounding_box(mask):
    for p in extract_points(bin_from(mask), ANT):
        ys, xs = np.nonzero(mask[p.slice_index])
        assert xs.min() <= p.x <= xs.max() and ys.min() <= p.y <= ys.max()


def gaussian_blobs(centres, shape=(4, 48, 48), sigma=2.0):
    z, h, w = shape
    yy, xx = np.mgrid[0:h, 0:w]
    data = np.zeros((2, z, h, w))
    for (c, k), (cx, cy) in centres.items():
        data[c, k] = np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * sigma**2))
    return vol_from(data)


def test_heatmaps_to_landmarks_blob_per_slice():
    centres = {}
    for k in range(4):
        centres[(0, k)] = (15.3 + 0.5 * k, 20.7)
        centres[(1, k)] = (30.0, 31.2 - 0.4 * k)
    case = heatmaps_to_landmarks(gaussian_blobs(centres), case_id="x")
    assert case.case_id == "x"
    for s in case.slices:
        for c, lab in enumerate((ANT, INF)):
            p = s.get(lab)
            cx, cy = centres[(c, s.slice_index)]
            assert abs(p.x - cx) <= 1 and abs(p.y - cy) <= 1
    assert case.n_points == 8


def test_heatmaps_to_landmarks_empty_and_one_channel():
    assert heatmaps_to_landmarks(vol_from(np.zeros((2, 3, 8, 8)))).n_points == 0
    case = heatmaps_to_landmarks(gaussian_blobs({(0, 1): (20, 20)}))
    assert [p.label for p in case.points()] == [ANT]
    with pytest.raises(InputError):
        heatmaps_to_landmarks(vol_from(np.zeros((1, 3, 8, 8))))


@settings(max_examples=50)
@given(arrays(float, st.tuples(st.just(2), st.integers(1, 3), st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(0, 1)))
def test_at_most_one_point_per_slice_and_label(data):
    case = heatmaps_to_landmarks(vol_from(data), connectivity=8)
    seen = set()
    for p in case.points():
        assert (p.slice_index, p.label) not in seen
        seen.add((p.slice_index, p.label))
