import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from landmark_metrics import ImageGeometry
from landmark_metrics.io import LandmarkFile, LandmarkValidationError, read_landmarks, write_landmarks
from landmark_metrics.io.landmarks import dumps_landmarks, parse_landmarks

from helpers import make_case

CANONICAL = {
    "schema_version": 1,
    "cases": [
        {
            "case_id": "patient001",
            "geometry": {"width": 224, "height": 200, "slices": 3, "spacing_mm": [1.2, 1.2, 10.0]},
            "slices": [
                {"index": 0, "ant": [100.5, 80.25], "inf": [120.0, 130.125]},
                {"index": 1, "ant": None, "inf": [121.333333, 129.0]},
                {"index": 2, "ant": None, "inf": None},
            ],
        }
    ],
}


def test_canonical_roundtrip_modulo_whitespace(tmp_path):
    p = tmp_path / "in.json"
    p.write_text(json.dumps(CANONICAL))
    lf = read_landmarks(p)
    write_landmarks(lf, tmp_path / "out.json")
    assert json.loads((tmp_path / "out.json").read_text()) == CANONICAL
    assert "".join(json.dumps(CANONICAL).split()) == "".join(dumps_landmarks(lf).split())


def test_empty_slice_preserved():
    lf = parse_landmarks(CANONICAL)
    s = lf.cases[0].slices[2]
    assert s.slice_index == 2 and s.is_empty


def test_unknown_fields_ignored_and_not_emitted():
    doc = json.loads(json.dumps(CANONICAL))
    doc["producer"] = "x"
    doc["cases"][0]["note"] = "y"
    doc["cases"][0]["slices"][0]["confidence"] = 0.9
    out = json.loads(dumps_landmarks(parse_landmarks(doc)))
    assert out == CANONICAL


def test_duplicate_case_id():
    doc = json.loads(json.dumps(CANONICAL))
    doc["cases"].append(doc["cases"][0])
    with pytest.raises(LandmarkValidationError, match="duplicate"):
        parse_landmarks(doc)


@pytest.mark.parametrize(
    "mutate, where",
    [
        (lambda d: d["cases"][0]["slices"][0].update(ant=[1.0]), "slice 0"),
        (lambda d: d["cases"][0]["slices"][1].update(inf=[500.0, 1.0]), "slice 1"),
        (lambda d: d["cases"][0]["geometry"].update(width=0), "patient001"),
        (lambda d: d["cases"][0]["slices"].append({"index": 1}), "patient001"),
        (lambda d: d.update(schema_version=2), "schema_version"),
        (lambda d: d["cases"][0]["slices"][0].update(ant=["a", 1]), "slice 0"),
    ],
)
def test_validation_errors_name_case_and_slice(mutate, where):
    doc = json.loads(json.dumps(CANONICAL))
    mutate(doc)
    with pytest.raises(LandmarkValidationError) as exc:
        parse_landmarks(doc)
    assert where in str(exc.value)


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(LandmarkValidationError):
        read_landmarks(p)


point = st.one_of(
    st.none(),
    st.tuples(st.floats(0, 99.999, allow_subnormal=False), st.floats(0, 49.999, allow_subnormal=False)),
)


@settings(max_examples=50)
@given(st.dictionaries(st.integers(0, 9), st.fixed_dictionaries({"ant": point, "inf": point}), max_size=10))
def test_roundtrip_property(slices):
    geometry = ImageGeometry(100, 50, 10, (0.7, 1.3, 5.0))
    lf = LandmarkFile([make_case(slices, geometry, "x"), make_case({}, geometry, "y")])
    back = parse_landmarks(json.loads(dumps_landmarks(lf)))
    assert back.cases == lf.cases
