"""Small builders shared by the test modules."""

from landmark_metrics import CaseLandmarks, ImageGeometry, Label, LandmarkPoint, SliceLandmarks

ANT, INF = Label.ANTERIOR, Label.INFERIOR


def make_case(slices, geometry=None, case_id="c0"):
    """slices: {k: {"ant": (x, y) or None, "inf": (x, y) or None}}."""
    geometry = geometry or ImageGeometry(64, 64, 8, (1.0, 1.0, 1.0))
    out = []
    for k in sorted(slices):
        s = slices[k]
        a = s.get("ant")
        i = s.get("inf")
        out.append(
            SliceLandmarks(
                k,
                None if a is None else LandmarkPoint(ANT, k, float(a[0]), float(a[1])),
                None if i is None else LandmarkPoint(INF, k, float(i[0]), float(i[1])),
            )
        )
    return CaseLandmarks(case_id, geometry, tuple(out))


def case_to_dict(case):
    return {
        s.slice_index: {
            "ant": None if s.anterior is None else (s.anterior.x, s.anterior.y),
            "inf": None if s.inferior is None else (s.inferior.x, s.inferior.y),
        }
        for s in case.slices
    }
