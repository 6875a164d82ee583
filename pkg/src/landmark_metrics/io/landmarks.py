"""
JSON interchange format for per-case landmark sets.

::

    {"schema_version": 1,
     "cases": [{"case_id": "...",
                "geometry": {"width": W, "height": H, "slices": S,
                             "spacing_mm": [sx, sy, sz]},
                "slices": [{"index": k, "ant": [x, y] | null,
                            "inf": [x, y] | null}]}]}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..core import (
    CaseLandmarks,
    ImageGeometry,
    InputError,
    Label,
    LandmarkPoint,
    SliceLandmarks,
)

SCHEMA_VERSION = 1


class LandmarkValidationError(InputError):
    """Schema violation in a landmark file; ``problems`` lists every finding."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid landmark file:\n  " + "\n  ".join(self.problems))


@dataclass
class LandmarkFile:
    cases: list = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        seen = set()
        dupes = []
        for c in self.cases:
            if c.case_id in seen:
                dupes.append(f"case {c.case_id!r}: duplicate case_id")
            seen.add(c.case_id)
        if dupes:
            raise LandmarkValidationError(dupes)

    def by_id(self) -> dict:
        return {c.case_id: c for c in self.cases}


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _parse_point(raw, label, index, where, problems):
    if raw is None:
        return None
    if not (isinstance(raw, list) and len(raw) == 2 and all(_is_number(v) for v in raw)):
        problems.append(f"{where}: {label.short} must be [x, y] or null, got {raw!r}")
        return None
    return LandmarkPoint(label, index, float(raw[0]), float(raw[1]))


def _parse_case(raw, ci, problems):
    where = f"cases[{ci}]"
    if not isinstance(raw, dict):
        problems.append(f"{where}: expected an object")
        return None
    case_id = raw.get("case_id")
    if not isinstance(case_id, str):
        problems.append(f"{where}: case_id must be a string")
        return None
    where = f"case {case_id!r}"

    g = raw.get("geometry")
    try:
        if not isinstance(g, dict):
            raise InputError("geometry must be an object")
        spacing = g.get("spacing_mm")
        if not (isinstance(spacing, list) and all(_is_number(v) for v in spacing)):
            raise InputError("spacing_mm must be a list of 3 numbers")
        for key in ("width", "height", "slices"):
            if not isinstance(g.get(key), int) or isinstance(g.get(key), bool):
                raise InputError(f"{key} must be an integer")
        geometry = ImageGeometry(g["width"], g["height"], g["slices"], tuple(spacing))
    except InputError as exc:
        problems.append(f"{where}: geometry: {exc}")
        return None

    raw_slices = raw.get("slices")
    if not isinstance(raw_slices, list):
        problems.append(f"{where}: slices must be a list")
        return None
    n_before = len(problems)
    slices = []
    for si, rs in enumerate(raw_slices):
        if not isinstance(rs, dict) or not isinstance(rs.get("index"), int) or isinstance(rs.get("index"), bool):
            problems.append(f"{where}, slices[{si}]: needs an integer 'index'")
            continue
        k = rs["index"]
        swhere = f"{where}, slice {k}"
        ant = _parse_point(rs.get("ant"), Label.ANTERIOR, k, swhere, problems)
        inf = _parse_point(rs.get("inf"), Label.INFERIOR, k, swhere, problems)
        slices.append(SliceLandmarks(k, ant, inf))
    if len(problems) > n_before:
        return None
    try:
        return CaseLandmarks(case_id, geometry, tuple(slices))
    except InputError as exc:
        problems.append(str(exc))
        return None


def parse_landmarks(doc) -> LandmarkFile:
    """Validate a decoded JSON document. Unknown keys are ignored."""
    if not isinstance(doc, dict):
        raise LandmarkValidationError(["top level must be an object"])
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise LandmarkValidationError([f"unsupported schema_version {version!r}"])
    raw_cases = doc.get("cases")
    if not isinstance(raw_cases, list):
        raise LandmarkValidationError(["'cases' must be a list"])
    problems = []
    cases = []
    for ci, rc in enumerate(raw_cases):
        c = _parse_case(rc, ci, problems)
        if c is not None:
            cases.append(c)
    if problems:
        raise LandmarkValidationError(problems)
    return LandmarkFile(cases, version)


def read_landmarks(path) -> LandmarkFile:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise LandmarkValidationError([f"{path}: not valid JSON: {exc}"]) from exc
    return parse_landmarks(doc)


def _point(p):
    return None if p is None else [p.x, p.y]


def landmarks_to_dict(lf: LandmarkFile) -> dict:
    return {
        "schema_version": lf.schema_version,
        "cases": [
            {
                "case_id": c.case_id,
                "geometry": {
                    "width": c.geometry.width,
                    "height": c.geometry.height,
                    "slices": c.geometry.slices,
                    "spacing_mm": list(c.geometry.spacing),
                },
                "slices": [
                    {"index": s.slice_index, "ant": _point(s.anterior), "inf": _point(s.inferior)}
                    for s in c.slices
                ],
            }
            for c in lf.cases
        ],
    }


def dumps_landmarks(lf: LandmarkFile) -> str:
    # floats go through repr(), which round-trips exactly
    return json.dumps(landmarks_to_dict(lf), indent=1) + "\n"


def write_landmarks(lf: LandmarkFile, path) -> None:
    if not isinstance(lf, LandmarkFile):
        lf = LandmarkFile(list(lf))
    Path(path).write_text(dumps_landmarks(lf), encoding="utf-8")
