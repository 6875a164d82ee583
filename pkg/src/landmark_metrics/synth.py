"""
Seeded synthetic ground truth and predictions with controlled error modes.

All randomness comes from numpy's Philox counter-based generator, so a
given seed produces the same landmarks on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    LABELS,
    CaseLandmarks,
    ImageGeometry,
    InputError,
    Label,
    LandmarkPoint,
    SliceLandmarks,
)
from .io.nifti import HeatmapVolume

SEPARATION_MM = (20.0, 40.0)
# per-slice wobble of the septum centre, mm (clipped)
CENTRE_WOBBLE_MM = 1.0
CENTRE_WOBBLE_MAX_MM = 2.0

DEFAULT_GEOMETRY = ImageGeometry(224, 224, 10, (1.2, 1.2, 10.0))


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


@dataclass(frozen=True)
class PerturbationSpec:
    jitter_sigma_mm: float = 0.0
    drop_point_prob: float = 0.0
    spurious_slice_prob: float = 0.0
    rotation_offset_deg: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.jitter_sigma_mm >= 0:
            raise InputError(f"jitter_sigma_mm must be >= 0, got {self.jitter_sigma_mm}")
        for name in ("drop_point_prob", "spurious_slice_prob"):
            p = getattr(self, name)
            if not 0 <= p <= 1:
                raise InputError(f"{name} must lie in [0, 1], got {p}")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")


def _clamp(v, hi):
    return min(max(v, 0.0), float(hi))


def _random_pair(rng, geometry: ImageGeometry, margin_extra: float):
    """Centre (mm), septum direction and half separation for one case."""
    sx, sy = geometry.spacing[0], geometry.spacing[1]
    ext_x = (geometry.width - 1) * sx
    ext_y = (geometry.height - 1) * sy
    sep = rng.uniform(*SEPARATION_MM)
    angle = rng.uniform(0.0, 360.0)
    margin = sep / 2 + margin_extra
    cx = rng.uniform(margin, ext_x - margin)
    cy = rng.uniform(margin, ext_y - margin)
    return cx, cy, math.radians(angle), sep / 2


def _pair_points(k, cx, cy, theta, half, geometry):
    sx, sy = geometry.spacing[0], geometry.spacing[1]
    dx, dy = half * math.cos(theta), half * math.sin(theta)
    ant = LandmarkPoint(Label.ANTERIOR, k, _clamp((cx - dx) / sx, geometry.width - 1),
                        _clamp((cy - dy) / sy, geometry.height - 1))
    inf = LandmarkPoint(Label.INFERIOR, k, _clamp((cx + dx) / sx, geometry.width - 1),
                        _clamp((cy + dy) / sy, geometry.height - 1))
    return ant, inf


def generate_gt(n_cases: int, geometry: ImageGeometry = DEFAULT_GEOMETRY, seed: int = 0) -> list:
    """``n_cases`` cases with both landmarks on every slice.

    Anterior and inferior sit 20-40 mm apart at a septum angle that is
    constant within a case; the septum centre wobbles by about 1 mm from
    slice to slice.
    """
    if n_cases < 1:
        raise InputError(f"n_cases must be >= 1, got {n_cases}")
    need = 2 * (SEPARATION_MM[1] / 2 + 2 * CENTRE_WOBBLE_MAX_MM)
    ext = ((geometry.width - 1) * geometry.spacing[0], (geometry.height - 1) * geometry.spacing[1])
    if min(ext) <= need:
        raise InputError(
            f"image extent {ext[0]:.1f} x {ext[1]:.1f} mm too small; need > {need:.1f} mm"
        )
    rng = make_rng(seed)
    cases = []
    for i in range(n_cases):
        cx, cy, theta, half = _random_pair(rng, geometry, 2 * CENTRE_WOBBLE_MAX_MM)
        slices = []
        for k in range(geometry.slices):
            ox, oy = np.clip(rng.normal(0.0, CENTRE_WOBBLE_MM, 2), -CENTRE_WOBBLE_MAX_MM, CENTRE_WOBBLE_MAX_MM)
            ant, inf = _pair_points(k, cx + ox, cy + oy, theta, half, geometry)
            slices.append(SliceLandmarks(k, ant, inf))
        cases.append(CaseLandmarks(f"case{i:03d}", geometry, tuple(slices)))
    return cases


def perturb(gt: CaseLandmarks, spec: PerturbationSpec, stream: int = 0) -> CaseLandmarks:
    """Derive a prediction from ``gt``.

    Steps, in order: rotate each complete slice pair about its midpoint,
    add isotropic Gaussian jitter, drop points independently, append
    spurious point pairs on new slices past the end of the stack, clamp to
    the image. Slices left empty are removed. ``stream`` selects an
    independent random stream for the same seed (one per case).
    """
    rng = make_rng(spec.seed, stream)
    g = gt.geometry
    sx, sy = g.spacing[0], g.spacing[1]
    theta = math.radians(spec.rotation_offset_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)

    out = []
    for s in gt.slices:
        pts = {lab: s.get(lab) for lab in LABELS}
        coords = {lab: None if p is None else [p.x * sx, p.y * sy] for lab, p in pts.items()}

        a, b = coords[Label.ANTERIOR], coords[Label.INFERIOR]
        if spec.rotation_offset_deg and a is not None and b is not None:
            mx, my = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
            for c in (a, b):
                dx, dy = c[0] - mx, c[1] - my
                c[0] = mx + dx * cos_t - dy * sin_t
                c[1] = my + dx * sin_t + dy * cos_t

        for lab in LABELS:
            c = coords[lab]
            if c is None:
                continue
            if spec.jitter_sigma_mm > 0:
                jx, jy = rng.normal(0.0, spec.jitter_sigma_mm, 2)
                c[0] += jx
                c[1] += jy
            if rng.random() < spec.drop_point_prob:
                coords[lab] = None

        new = {}
        for lab in LABELS:
            c = coords[lab]
            if c is None:
                new[lab] = None
            elif c == [pts[lab].x * sx, pts[lab].y * sy]:
                new[lab] = pts[lab]
            else:
                new[lab] = LandmarkPoint(
                    lab, s.slice_index, _clamp(c[0] / sx, g.width - 1), _clamp(c[1] / sy, g.height - 1)
                )
        if new[Label.ANTERIOR] is not None or new[Label.INFERIOR] is not None:
            out.append(SliceLandmarks(s.slice_index, new[Label.ANTERIOR], new[Label.INFERIOR]))

    n_spurious = int(rng.binomial(g.slices, spec.spurious_slice_prob)) if spec.spurious_slice_prob > 0 else 0
    first = max([g.slices] + [s.slice_index + 1 for s in gt.slices])
    for j in range(n_spurious):
        k = first + j
        cx, cy, th, half = _random_pair(rng, g, 0.0)
        ant, inf = _pair_points(k, cx, cy, th, half, g)
        out.append(SliceLandmarks(k, ant, inf))

    geometry = g
    if n_spurious:
        geometry = ImageGeometry(g.width, g.height, first + n_spurious, g.spacing)
    return CaseLandmarks(gt.case_id, geometry, tuple(out))


def perturb_cases(cases, spec: PerturbationSpec) -> list:
    """Perturb each case on its own random stream (stream = position)."""
    return [perturb(c, spec, stream=i) for i, c in enumerate(cases)]


def divergence_scenario(seed: int = 2021, n_cases: int = 20, geometry: ImageGeometry = DEFAULT_GEOMETRY):
    """Two predictions whose ranking flips once misses are penalised.

    Variant A is accurate but incomplete (2 mm jitter, 40 % of points
    dropped); variant B is complete but noisy (6 mm jitter, nothing
    dropped). Returns ``(gt, pred_a, pred_b)`` as lists of cases.
    """
    gt = generate_gt(n_cases, geometry, seed)
    pred_a = perturb_cases(gt, PerturbationSpec(jitter_sigma_mm=2.0, drop_point_prob=0.4, seed=seed + 1))
    pred_b = perturb_cases(gt, PerturbationSpec(jitter_sigma_mm=6.0, drop_point_prob=0.0, seed=seed + 2))
    return gt, pred_a, pred_b


def rasterize_heatmaps(case: CaseLandmarks, sigma_vox: float = 2.0) -> HeatmapVolume:
    """Two-channel heatmap with a unit-peak Gaussian disk at every point.

    Each disk lives only on its own slice.
    """
    if not sigma_vox > 0:
        raise InputError(f"sigma_vox must be > 0, got {sigma_vox}")
    g = case.geometry
    data = np.zeros((2, g.slices, g.height, g.width))
    yy, xx = np.mgrid[0:g.height, 0:g.width]
    for channel, label in enumerate(LABELS):
        for p in case.points(label):
            r2 = (xx - p.x) ** 2 + (yy - p.y) ** 2
            data[channel, p.slice_index] = np.maximum(
                data[channel, p.slice_index], np.exp(-r2 / (2 * sigma_vox**2))
            )
    return HeatmapVolume(data, g)
