"""
Domain types and geometric primitives.

Points live on the voxel grid of a multi-slice image: ``x`` is the column,
``y`` the row (growing downwards) and ``slice_index`` the position in the
stack. All distances are in-plane and measured in millimetres after the
voxel spacing has been applied.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence


class LandmarkError(Exception):
    """Base class for all errors raised by this package."""


class InputError(LandmarkError, ValueError):
    """Invalid argument or inconsistent input data."""


class DegenerateAngleError(LandmarkError, ValueError):
    """Angle undefined because the two points coincide."""


class DegenerateMeanError(LandmarkError, ValueError):
    """Circular mean undefined because the resultant vector vanishes."""


class Label(enum.Enum):
    ANTERIOR = "ant"
    INFERIOR = "inf"

    @property
    def short(self) -> str:
        return self.value


LABELS = (Label.ANTERIOR, Label.INFERIOR)


@dataclass(frozen=True)
class ImageGeometry:
    width: int
    height: int
    slices: int
    spacing: tuple = (1.0, 1.0, 1.0)

    def __post_init__(self):
        for name in ("width", "height", "slices"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise InputError(f"{name} must be a positive integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        sp = tuple(float(s) for s in self.spacing)
        if len(sp) != 3:
            raise InputError(f"spacing needs 3 components, got {len(sp)}")
        if not all(math.isfinite(s) and s > 0 for s in sp):
            raise InputError(f"spacing components must be finite and > 0, got {sp}")
        object.__setattr__(self, "spacing", sp)

    @property
    def in_plane(self) -> tuple:
        return (self.width, self.height, self.spacing[0], self.spacing[1])

    def compatible(self, other: "ImageGeometry") -> bool:
        """Same in-plane grid and spacing; the slice count may differ.

        A prediction may carry extra slices beyond the ground-truth stack
        (spurious detections); those slices are simply GT-empty.
        """
        return (self.width, self.height, self.spacing) == (
            other.width,
            other.height,
            other.spacing,
        )

    def contains(self, x: float, y: float) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height


@dataclass(frozen=True)
class LandmarkPoint:
    label: Label
    slice_index: int
    x: float
    y: float


@dataclass(frozen=True)
class SliceLandmarks:
    slice_index: int
    anterior: Optional[LandmarkPoint] = None
    inferior: Optional[LandmarkPoint] = None

    def get(self, label: Label) -> Optional[LandmarkPoint]:
        return self.anterior if label is Label.ANTERIOR else self.inferior

    @property
    def count(self) -> int:
        return (self.anterior is not None) + (self.inferior is not None)

    @property
    def is_empty(self) -> bool:
        return self.anterior is None and self.inferior is None


@dataclass(frozen=True)
class CaseLandmarks:
    case_id: str
    geometry: ImageGeometry
    slices: tuple = field(default_factory=tuple)

    def __post_init__(self):
        slices = tuple(self.slices)
        object.__setattr__(self, "slices", slices)
        prev = -1
        for s in slices:
            if s.slice_index <= prev:
                raise InputError(
                    f"case {self.case_id!r}: slice indices must be strictly "
                    f"increasing (got {s.slice_index} after {prev})"
                )
            prev = s.slice_index
            if not 0 <= s.slice_index < self.geometry.slices:
                raise InputError(
                    f"case {self.case_id!r}: slice {s.slice_index} outside "
                    f"[0, {self.geometry.slices})"
                )
            for label in LABELS:
                p = s.get(label)
                if p is None:
                    continue
                if p.label is not label or p.slice_index != s.slice_index:
                    raise InputError(
                        f"case {self.case_id!r}, slice {s.slice_index}: point "
                        f"stored under the wrong label or slice"
                    )
                if not self.geometry.contains(p.x, p.y):
                    raise InputError(
                        f"case {self.case_id!r}, slice {s.slice_index}: "
                        f"{label.short} point ({p.x}, {p.y}) out of bounds"
                    )

    @classmethod
    def from_points(
        cls,
        case_id: str,
        geometry: ImageGeometry,
        points: Iterable[LandmarkPoint],
    ) -> "CaseLandmarks":
        """Group loose points into slices. Duplicate (slice, label) raises."""
        by_slice: dict = {}
        for p in points:
            slot = by_slice.setdefault(p.slice_index, {})
            if p.label in slot:
                raise InputError(
                    f"case {case_id!r}: two {p.label.short} points on slice "
                    f"{p.slice_index}"
                )
            slot[p.label] = p
        slices = [
            SliceLandmarks(
                k, by_slice[k].get(Label.ANTERIOR), by_slice[k].get(Label.INFERIOR)
            )
            for k in sorted(by_slice)
        ]
        return cls(case_id, geometry, tuple(slices))

    def slice_map(self) -> dict:
        return {s.slice_index: s for s in self.slices}

    def points(self, label: Optional[Label] = None) -> Iterator[LandmarkPoint]:
        for s in self.slices:
            for lab in LABELS:
                if label is not None and lab is not label:
                    continue
                p = s.get(lab)
                if p is not None:
                    yield p

    @property
    def n_points(self) -> int:
        return sum(s.count for s in self.slices)


def _check_geometry(geometry) -> None:
    if not isinstance(geometry, ImageGeometry):
        raise InputError(f"expected ImageGeometry, got {type(geometry).__name__}")


def distance_mm(a: LandmarkPoint, b: LandmarkPoint, geometry: ImageGeometry) -> float:
    """In-plane Euclidean distance in millimetres; slice positions are ignored."""
    _check_geometry(geometry)
    sx, sy = geometry.spacing[0], geometry.spacing[1]
    return math.hypot((a.x - b.x) * sx, (a.y - b.y) * sy)


def normalize_angle(degrees: float) -> float:
    """Wrap to [0, 360)."""
    d = math.fmod(degrees, 360.0)
    if d < 0:
        d += 360.0
    # fmod of a tiny negative number plus 360 can round to exactly 360
    return 0.0 if d >= 360.0 else d


def septum_angle(ant: LandmarkPoint, inf: LandmarkPoint, geometry: ImageGeometry) -> float:
    """Clockwise angle from the +x axis to the anterior->inferior vector.

    With rows growing downwards a positive y step turns clockwise on
    screen, so this is plain ``atan2(dy, dx)`` in mm space.
    """
    _check_geometry(geometry)
    dx = (inf.x - ant.x) * geometry.spacing[0]
    dy = (inf.y - ant.y) * geometry.spacing[1]
    if dx == 0 and dy == 0:
        raise DegenerateAngleError(
            f"anterior and inferior coincide at ({ant.x}, {ant.y})"
        )
    return normalize_angle(math.degrees(math.atan2(dy, dx)))


def angle_difference(a: float, b: float) -> float:
    """Smallest absolute difference between two angles, in [0, 180]."""
    d = math.fmod(abs(a - b), 360.0)
    return min(d, 360.0 - d)


def corners(geometry: ImageGeometry) -> tuple:
    w, h = geometry.width - 1, geometry.height - 1
    return ((0, 0), (w, 0), (0, h), (w, h))


def upper_bound_distance(gt: LandmarkPoint, geometry: ImageGeometry) -> float:
    """Distance from ``gt`` to the farthest in-plane image corner (mm).

    Corners sit on the centres of the extreme voxels, matching the voxel
    grid the points live on.
    """
    _check_geometry(geometry)
    if not geometry.contains(gt.x, gt.y):
        raise InputError(f"point ({gt.x}, {gt.y}) outside the image")
    sx, sy = geometry.spacing[0], geometry.spacing[1]
    return max(math.hypot((gt.x - cx) * sx, (gt.y - cy) * sy) for cx, cy in corners(geometry))


def circular_mean(angles: Sequence[float]) -> Optional[float]:
    """Mean direction of angles in degrees; ``None`` for an empty input."""
    if len(angles) == 0:
        return None
    s = sum(math.sin(math.radians(a)) for a in angles) / len(angles)
    c = sum(math.cos(math.radians(a)) for a in angles) / len(angles)
    if math.hypot(s, c) < 1e-12:
        raise DegenerateMeanError(f"resultant vector vanishes for {list(angles)}")
    return normalize_angle(math.degrees(math.atan2(s, c)))
