"""
Files on disk and the command line
==================================

Write heatmaps as NIfTI-1, read them back, then drive the same pipeline
through the ``landmark-metrics`` command.
"""

import tempfile
from pathlib import Path

from landmark_metrics import generate_gt, rasterize_heatmaps
from landmark_metrics.cli import main
from landmark_metrics.io import read_nifti, write_nifti
from landmark_metrics.io.nifti import NiftiParseError, parse_nifti

work = Path(tempfile.mkdtemp())
case = generate_gt(1, seed=5)[0]
path = work / "case000.nii"
write_nifti(rasterize_heatmaps(case), path)

vol = read_nifti(path)
print("read back", vol.data.shape, "spacing", vol.geometry.spacing)

# damaged files raise a parse error that names the byte offset
try:
    parse_nifti(path.read_bytes()[:200])
except NiftiParseError as exc:
    print(type(exc).__name__, "-", exc)

# The CLI: synthesise a two-variant cohort, score both, compare rankings.
main(["synth", "--out-dir", str(work), "--scenario", "divergence"])
for v in ("a", "b"):
    main(["evaluate", "--gt", str(work / "gt.json"),
          "--pred", "%s=%s" % (v.upper(), work / ("pred_%s.json" % v)),
          "--strategy", "point", "--csv", str(work / ("%s.csv" % v))])
main(["rank", str(work / "a.csv"), str(work / "b.csv"), "--max-listed", "5"])
