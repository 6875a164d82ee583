from .landmarks import (
    LandmarkFile,
    LandmarkValidationError,
    read_landmarks,
    write_landmarks,
)
from .nifti import (
    HeatmapVolume,
    NiftiDatatypeError,
    NiftiHeaderError,
    NiftiMagicError,
    NiftiParseError,
    NiftiTruncatedError,
    NiftiValueError,
    read_heatmap_pair,
    read_nifti,
    write_nifti,
)
from .report_csv import read_report_csv, write_report_csv

__all__ = [
    "HeatmapVolume",
    "LandmarkFile",
    "LandmarkValidationError",
    "NiftiDatatypeError",
    "NiftiHeaderError",
    "NiftiMagicError",
    "NiftiParseError",
    "NiftiTruncatedError",
    "NiftiValueError",
    "read_heatmap_pair",
    "read_landmarks",
    "read_nifti",
    "read_report_csv",
    "write_landmarks",
    "write_nifti",
    "write_report_csv",
]
