"""
Minimal NIfTI-1 reader/writer for heatmap and mask volumes.

Only the single-file (``n+1``) variant is handled, optionally gzipped.
Arrays are held channel-major as ``data[channel, slice, row, col]``, which
is the C-order view of the on-disk x-fastest layout.
"""

from __future__ import annotations

import gzip
import struct
import warnings
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..core import ImageGeometry, InputError, LandmarkError

HEADER_SIZE = 348
VOX_OFFSET = 352

# datatype code -> (numpy kind, bitpix)
DATATYPES = {
    2: ("u1", 8),
    4: ("i2", 16),
    16: ("f4", 32),
    64: ("f8", 64),
}
_INTEGER_CODES = {2, 4}

_OFF_DIM = 40
_OFF_DATATYPE = 70
_OFF_BITPIX = 72
_OFF_PIXDIM = 76
_OFF_VOX_OFFSET = 108
_OFF_SCL_SLOPE = 112
_OFF_SCL_INTER = 116
_OFF_QFORM = 252
_OFF_SFORM = 254
_OFF_MAGIC = 344


class NiftiParseError(LandmarkError):
    """Malformed or unsupported NIfTI file; ``offset`` is the byte at fault."""

    def __init__(self, message, offset, path=None):
        self.offset = offset
        self.path = path
        where = f"{path}: " if path else ""
        super().__init__(f"{where}{message} (byte offset {offset})")


class NiftiMagicError(NiftiParseError):
    pass


class NiftiDatatypeError(NiftiParseError):
    pass


class NiftiTruncatedError(NiftiParseError):
    pass


class NiftiValueError(NiftiParseError):
    pass


class NiftiHeaderError(NiftiParseError):
    pass


@dataclass(frozen=True, eq=False)
class HeatmapVolume:
    """Multi-channel scalar volume; channel 0 is anterior, channel 1 inferior."""

    data: np.ndarray
    geometry: ImageGeometry

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim == 3:
            data = data[np.newaxis]
        if data.ndim != 4:
            raise InputError(f"heatmap data must be 3D or 4D, got {data.ndim}D")
        g = self.geometry
        if data.shape[1:] != (g.slices, g.height, g.width):
            raise InputError(
                f"data shape {data.shape[1:]} does not match geometry "
                f"(slices={g.slices}, height={g.height}, width={g.width})"
            )
        if not np.all(np.isfinite(data)):
            raise InputError("heatmap contains non-finite values")
        object.__setattr__(self, "data", data)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    def __eq__(self, other):
        if not isinstance(other, HeatmapVolume):
            return NotImplemented
        return self.geometry == other.geometry and np.array_equal(self.data, other.data)


def _read_bytes(path) -> bytes:
    path = Path(path)
    raw = path.read_bytes()
    if raw[:2] == b"\x1f\x8b":
        try:
            raw = gzip.decompress(raw)
        except (OSError, EOFError, zlib.error) as exc:
            raise NiftiTruncatedError(f"corrupt gzip stream: {exc}", 0, str(path)) from None
    return raw


def parse_nifti(raw: bytes, path=None) -> HeatmapVolume:
    """Decode an in-memory single-file NIfTI-1 image."""
    n = len(raw)
    if n < HEADER_SIZE:
        raise NiftiTruncatedError(
            f"header truncated: {n} of {HEADER_SIZE} bytes", n, path
        )

    magic = raw[_OFF_MAGIC:_OFF_MAGIC + 4]
    if magic != b"n+1\x00":
        raise NiftiMagicError(
            f"unsupported magic {magic!r} (need single-file 'n+1')", _OFF_MAGIC, path
        )

    # byte order: dim[0] must read as 1..7 in the file's own order
    endian = None
    for e in ("<", ">"):
        (d0,) = struct.unpack_from(e + "h", raw, _OFF_DIM)
        if 1 <= d0 <= 7:
            endian = e
            break
    if endian is None:
        raise NiftiHeaderError("cannot determine byte order from dim[0]", _OFF_DIM, path)

    (sizeof_hdr,) = struct.unpack_from(endian + "i", raw, 0)
    if sizeof_hdr != HEADER_SIZE:
        raise NiftiHeaderError(f"sizeof_hdr is {sizeof_hdr}, expected 348", 0, path)

    dim = struct.unpack_from(endian + "8h", raw, _OFF_DIM)
    ndim = dim[0]
    if ndim not in (3, 4):
        raise NiftiHeaderError(f"dim[0]={ndim}; only 3D or 4D images", _OFF_DIM, path)
    shape = dim[1:ndim + 1]
    for i, d in enumerate(shape):
        if d < 1:
            raise NiftiHeaderError(f"dim[{i + 1}]={d} must be >= 1", _OFF_DIM + 2 * (i + 1), path)
    nx, ny, nz = shape[:3]
    nc = shape[3] if ndim == 4 else 1

    (datatype,) = struct.unpack_from(endian + "h", raw, _OFF_DATATYPE)
    if datatype not in DATATYPES:
        raise NiftiDatatypeError(f"unsupported datatype code {datatype}", _OFF_DATATYPE, path)
    kind, bitpix_expected = DATATYPES[datatype]
    (bitpix,) = struct.unpack_from(endian + "h", raw, _OFF_BITPIX)
    if bitpix != bitpix_expected:
        raise NiftiHeaderError(
            f"bitpix {bitpix} inconsistent with datatype {datatype}", _OFF_BITPIX, path
        )

    pixdim = struct.unpack_from(endian + "8f", raw, _OFF_PIXDIM)
    for i in (1, 2, 3):
        if not (np.isfinite(pixdim[i]) and pixdim[i] > 0):
            raise NiftiHeaderError(
                f"pixdim[{i}]={pixdim[i]} must be finite and > 0", _OFF_PIXDIM + 4 * i, path
            )

    (vox_offset,) = struct.unpack_from(endian + "f", raw, _OFF_VOX_OFFSET)
    if not np.isfinite(vox_offset) or vox_offset < HEADER_SIZE:
        raise NiftiHeaderError(f"vox_offset {vox_offset} invalid", _OFF_VOX_OFFSET, path)
    start = int(vox_offset)

    slope, inter = struct.unpack_from(endian + "2f", raw, _OFF_SCL_SLOPE)
    qform, sform = struct.unpack_from(endian + "2h", raw, _OFF_QFORM)
    if qform > 0 or sform > 0:
        warnings.warn("NIfTI orientation matrices are ignored", UserWarning, stacklevel=3)

    itemsize = bitpix // 8
    count = nx * ny * nz * nc
    end = start + count * itemsize
    if n < end:
        raise NiftiTruncatedError(
            f"payload truncated: need {end} bytes, file has {n}", n, path
        )
    dtype = np.dtype(endian + kind)
    values = np.frombuffer(raw, dtype=dtype, count=count, offset=start)

    data = values.astype(np.float64)
    if not np.all(np.isfinite(data)):
        bad = int(np.flatnonzero(~np.isfinite(data))[0])
        raise NiftiValueError("non-finite voxel value", start + bad * itemsize, path)
    if slope != 0 and np.isfinite(slope) and np.isfinite(inter):
        data = data * slope + inter
    if datatype in _INTEGER_CODES:
        data = (data != 0).astype(np.float64)
    if not np.all(np.isfinite(data)):
        raise NiftiValueError("scaling produced non-finite values", _OFF_SCL_SLOPE, path)

    data = data.reshape((nc, nz, ny, nx))
    # shortest float32 repr, so 1.2 written as float32 reads back as 1.2
    spacing = tuple(float(str(np.float32(pixdim[i]))) for i in (1, 2, 3))
    geometry = ImageGeometry(nx, ny, nz, spacing)
    return HeatmapVolume(data, geometry)


def read_nifti(path) -> HeatmapVolume:
    """Read a single-file NIfTI-1 volume (``.nii`` or ``.nii.gz``).

    Integer datatypes are treated as masks and mapped to {0.0, 1.0}. A 4th
    dimension is the channel axis.
    """
    return parse_nifti(_read_bytes(path), path=str(path))


def encode_nifti(volume: HeatmapVolume, dtype="f4", byteorder="<") -> bytes:
    """Serialise ``volume``; ``dtype`` is one of u1, i2, f4, f8."""
    codes = {kind: (code, bitpix) for code, (kind, bitpix) in DATATYPES.items()}
    if dtype not in codes:
        raise InputError(f"unsupported dtype {dtype!r}")
    if byteorder not in ("<", ">"):
        raise InputError(f"byteorder must be '<' or '>', got {byteorder!r}")
    code, bitpix = codes[dtype]
    g = volume.geometry
    nc = volume.channels
    ndim = 4 if nc > 1 else 3
    dim = [ndim, g.width, g.height, g.slices, nc if nc > 1 else 1, 1, 1, 1]
    pixdim = [1.0, *g.spacing, 1.0, 1.0, 1.0, 1.0]

    hdr = bytearray(HEADER_SIZE)
    e = byteorder
    struct.pack_into(e + "i", hdr, 0, HEADER_SIZE)
    struct.pack_into(e + "8h", hdr, _OFF_DIM, *dim)
    struct.pack_into(e + "2h", hdr, _OFF_DATATYPE, code, bitpix)
    struct.pack_into(e + "8f", hdr, _OFF_PIXDIM, *pixdim)
    struct.pack_into(e + "3f", hdr, _OFF_VOX_OFFSET, float(VOX_OFFSET), 1.0, 0.0)
    hdr[123] = 2  # xyzt_units: mm
    hdr[_OFF_MAGIC:_OFF_MAGIC + 4] = b"n+1\x00"

    payload = np.ascontiguousarray(volume.data, dtype=np.dtype(e + dtype)).tobytes()
    return bytes(hdr) + b"\x00" * (VOX_OFFSET - HEADER_SIZE) + payload


def write_nifti(volume: HeatmapVolume, path, dtype="f4", byteorder="<") -> None:
    """Write ``volume`` as an uncompressed single-file NIfTI-1 image.

    The default (little-endian float32) reads back bit-identically for
    float32-representable data.
    """
    raw = encode_nifti(volume, dtype=dtype, byteorder=byteorder)
    path = Path(path)
    if path.name.endswith(".gz"):
        raw = gzip.compress(raw, mtime=0)
    path.write_bytes(raw)


def read_heatmap_pair(ant_path, inf_path) -> HeatmapVolume:
    """Combine two single-channel files into one (anterior, inferior) volume."""
    a = read_nifti(ant_path)
    b = read_nifti(inf_path)
    if a.channels != 1 or b.channels != 1:
        raise InputError("paired heatmap files must be single-channel")
    if a.geometry != b.geometry:
        raise InputError(f"geometry mismatch between {ant_path} and {inf_path}")
    return HeatmapVolume(np.concatenate([a.data, b.data]), a.geometry)
