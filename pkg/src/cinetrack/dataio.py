"""File I/O: NIfTI-1 volumes, ACDC patient directories, PNG and CSV export.

The NIfTI support is a deliberate subset of NIfTI-1: the fixed 348-byte
header, five voxel datatypes, both endiannesses, optional gzip. Anything
else fails loudly rather than being half-read.
"""
from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .imgcore import GrayFrame, LabelMask, BinaryMap, normalize_intensity
from .metrics import DiceReport
from .tracking import CineSequence

__all__ = [
    "NiftiVolume",
    "PatientRecord",
    "read_nifti",
    "write_nifti",
    "load_acdc_patient",
    "patient_sequences",
    "export_overlay_png",
    "export_binary_png",
    "write_metrics_csv",
]

_HEADER_SIZE = 348
_MAGIC_SINGLE = b"n+1\x00"
_MAGIC_PAIR = b"ni1\x00"
_GZIP_MAGIC = b"\x1f\x8b"

# NIfTI-1 datatype codes for the supported voxel types.
_DTYPE_BY_CODE = {
    2: np.dtype(np.uint8),
    4: np.dtype(np.int16),
    8: np.dtype(np.int32),
    16: np.dtype(np.float32),
    64: np.dtype(np.float64),
}
_CODE_BY_NAME = {dt.name: code for code, dt in _DTYPE_BY_CODE.items()}

# Colors for overlay tinting, keyed by label value.
_LABEL_COLORS = {1: (255, 0, 0), 2: (0, 255, 0), 3: (0, 0, 255)}


@dataclass(frozen=True)
class NiftiVolume:
    """An in-memory NIfTI-1 volume (up to 4 dimensions).

    ``voxels`` is indexed (x, y[, z[, t]]) exactly as stored in the file
    (column-major on disk); no axis is ever reordered. Intensity scaling
    (``scl_slope``/``scl_inter``) is kept as metadata and only applied by
    :meth:`scaled`.
    """

    voxels: np.ndarray
    scl_slope: float = 1.0
    scl_inter: float = 0.0

    def __post_init__(self) -> None:
        arr = np.asarray(self.voxels)
        if arr.ndim < 1 or arr.ndim > 4 or arr.size == 0:
            raise ValueError(f"volume must have 1 to 4 non-empty dims, got shape {arr.shape}")
        if arr.dtype.name not in _CODE_BY_NAME:
            raise ValueError(
                f"unsupported voxel dtype {arr.dtype.name}; "
                f"supported: {sorted(_CODE_BY_NAME)}"
            )
        arr = np.asfortranarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "voxels", arr)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.voxels.shape

    @property
    def datatype(self) -> str:
        return self.voxels.dtype.name

    def scaled(self) -> np.ndarray:
        """Voxels as float64 with the header scaling applied (0 slope = 1)."""
        slope = self.scl_slope if self.scl_slope != 0.0 else 1.0
        return self.voxels.astype(np.float64) * slope + self.scl_inter


def _read_file_bytes(path: Path) -> bytes:
    raw = path.read_bytes()
    if raw[:2] == _GZIP_MAGIC:
        return gzip.decompress(raw)
    return raw


def read_nifti(path: str | Path) -> NiftiVolume:
    """Parse a (possibly gzipped) NIfTI-1 file.

    Endianness is inferred from the header-size field; voxels are
    returned in native byte order. Rejects files whose magic is not
    NIfTI-1, whose datatype is unsupported, or whose payload is shorter
    than the header promises.
    """
    path = Path(path)
    data = _read_file_bytes(path)
    if len(data) < _HEADER_SIZE:
        raise ValueError(f"{path}: file shorter than the 348-byte NIfTI-1 header")

    if struct.unpack_from("<i", data, 0)[0] == _HEADER_SIZE:
        endian = "<"
    elif struct.unpack_from(">i", data, 0)[0] == _HEADER_SIZE:
        endian = ">"
    else:
        raise ValueError(f"{path}: not a NIfTI-1 file (header size field is not 348)")

    magic = data[344:348]
    if magic not in (_MAGIC_SINGLE, _MAGIC_PAIR):
        raise ValueError(f"{path}: not a NIfTI-1 file (bad magic {magic!r})")

    dim = struct.unpack_from(endian + "8h", data, 40)
    ndim = dim[0]
    if not (1 <= ndim <= 4):
        raise ValueError(f"{path}: unsupported dimensionality {ndim} (supported: 1 to 4)")
    shape = tuple(int(d) for d in dim[1 : 1 + ndim])
    if any(d < 1 for d in shape):
        raise ValueError(f"{path}: non-positive extent in dim field {shape}")

    datatype_code = struct.unpack_from(endian + "h", data, 70)[0]
    if datatype_code not in _DTYPE_BY_CODE:
        raise ValueError(f"{path}: unsupported NIfTI datatype code {datatype_code}")
    dtype = _DTYPE_BY_CODE[datatype_code]

    vox_offset = struct.unpack_from(endian + "f", data, 108)[0]
    scl_slope = struct.unpack_from(endian + "f", data, 112)[0]
    scl_inter = struct.unpack_from(endian + "f", data, 116)[0]
    offset = int(vox_offset)
    if offset < _HEADER_SIZE:
        offset = _HEADER_SIZE + 4  # single-file default: header + extension flag

    count = int(np.prod(shape))
    nbytes = count * dtype.itemsize
    payload = data[offset : offset + nbytes]
    if len(payload) < nbytes:
        raise ValueError(
            f"{path}: voxel data length mismatch: need {nbytes} bytes at offset "
            f"{offset}, found {len(payload)}"
        )
    voxels = np.frombuffer(payload, dtype=dtype.newbyteorder(endian), count=count)
    voxels = voxels.astype(dtype, copy=True).reshape(shape, order="F")
    return NiftiVolume(voxels=voxels, scl_slope=float(scl_slope), scl_inter=float(scl_inter))


def write_nifti(volume: NiftiVolume, path: str | Path, byteorder: str = "little") -> None:
    """Write a single-file NIfTI-1 image; gzipped when the name ends in .gz.

    ``read_nifti(write_nifti(v))`` recovers dims, datatype, scaling and
    voxels exactly. Gzip output uses a fixed timestamp so identical
    volumes produce byte-identical files.
    """
    if byteorder not in ("little", "big"):
        raise ValueError(f"byteorder must be 'little' or 'big', got {byteorder}")
    endian = "<" if byteorder == "little" else ">"
    path = Path(path)
    arr = volume.voxels
    header = bytearray(_HEADER_SIZE)
    struct.pack_into(endian + "i", header, 0, _HEADER_SIZE)
    dim = [arr.ndim, *arr.shape] + [1] * (7 - arr.ndim)
    struct.pack_into(endian + "8h", header, 40, *dim)
    struct.pack_into(endian + "h", header, 70, _CODE_BY_NAME[arr.dtype.name])
    struct.pack_into(endian + "h", header, 72, arr.dtype.itemsize * 8)
    struct.pack_into(endian + "8f", header, 76, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    struct.pack_into(endian + "f", header, 108, float(_HEADER_SIZE + 4))
    struct.pack_into(endian + "f", header, 112, volume.scl_slope)
    struct.pack_into(endian + "f", header, 116, volume.scl_inter)
    header[344:348] = _MAGIC_SINGLE

    payload = arr.astype(arr.dtype.newbyteorder(endian), copy=False).tobytes(order="F")
    blob = bytes(header) + b"\x00\x00\x00\x00" + payload
    if path.suffix == ".gz":
        blob = gzip.compress(blob, mtime=0)
    path.write_bytes(blob)


@dataclass(frozen=True)
class PatientRecord:
    """One ACDC-style patient: cyclic 4-D cine plus the two annotated frames.

    Frame numbers are kept 1-based as in the metadata file; conversion to
    0-based indices happens when building sequences.
    """

    patient_id: str
    group: str
    ed_frame: int
    es_frame: int
    cine: NiftiVolume
    gt_ed: NiftiVolume
    gt_es: NiftiVolume

    def __post_init__(self) -> None:
        if self.cine.voxels.ndim != 4:
            raise ValueError(f"cine volume must be 4-D, got shape {self.cine.dims}")
        if self.ed_frame == self.es_frame:
            raise ValueError(f"ED and ES frames must differ, both are {self.ed_frame}")
        frames = self.cine.dims[3]
        for name, n in (("ED", self.ed_frame), ("ES", self.es_frame)):
            if not (1 <= n <= frames):
                raise ValueError(f"{name} frame {n} outside 1..{frames}")
        spatial = self.cine.dims[:3]
        for name, vol in (("ED", self.gt_ed), ("ES", self.gt_es)):
            if vol.dims != spatial:
                raise ValueError(
                    f"{name} ground truth dims {vol.dims} do not match cine spatial dims {spatial}"
                )

    @property
    def slice_count(self) -> int:
        return self.cine.dims[2]

    @property
    def frame_count(self) -> int:
        return self.cine.dims[3]


def _parse_metadata(path: Path) -> dict[str, str]:
    entries: dict[str, str] = {}
    for line in path.read_text().splitlines():
        if ":" not in line:
            continue
        key, value = line.split(":", 1)
        entries[key.strip()] = value.strip()
    return entries


def _find_one(directory: Path, patterns: list[str], what: str) -> Path:
    for pattern in patterns:
        matches = sorted(directory.glob(pattern))
        if matches:
            return matches[0]
    raise FileNotFoundError(f"{directory}: missing {what} (looked for {', '.join(patterns)})")


def load_acdc_patient(directory: str | Path) -> PatientRecord:
    """Load one patient directory in the ACDC layout.

    Expects a key-value metadata file (``Info.cfg``) with at least
    ``ED:`` and ``ES:`` 1-based frame numbers, a 4-D cine named
    ``*_4d.nii[.gz]``, and the two ground-truth files
    ``*_frame<NN>_gt.nii[.gz]`` for those frames.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"patient directory not found: {directory}")
    meta_path = _find_one(directory, ["Info.cfg", "*.cfg", "*.txt"], "metadata file")
    meta = _parse_metadata(meta_path)
    for key in ("ED", "ES"):
        if key not in meta:
            raise ValueError(f"{meta_path}: missing metadata key '{key}'")
    try:
        ed_frame = int(meta["ED"])
        es_frame = int(meta["ES"])
    except ValueError as exc:
        raise ValueError(f"{meta_path}: ED/ES values must be integers") from exc
    if ed_frame == es_frame:
        raise ValueError(f"{meta_path}: ED and ES frames must differ, both are {ed_frame}")
    group = meta.get("Group", "UNK")

    cine_path = _find_one(directory, ["*_4d.nii.gz", "*_4d.nii"], "4-D cine file")
    gt_ed_path = _find_one(
        directory,
        [f"*_frame{ed_frame:02d}_gt.nii.gz", f"*_frame{ed_frame:02d}_gt.nii"],
        f"ED ground-truth file for frame {ed_frame}",
    )
    gt_es_path = _find_one(
        directory,
        [f"*_frame{es_frame:02d}_gt.nii.gz", f"*_frame{es_frame:02d}_gt.nii"],
        f"ES ground-truth file for frame {es_frame}",
    )
    return PatientRecord(
        patient_id=directory.name,
        group=group,
        ed_frame=ed_frame,
        es_frame=es_frame,
        cine=read_nifti(cine_path),
        gt_ed=read_nifti(gt_ed_path),
        gt_es=read_nifti(gt_es_path),
    )


def _slice_mask(gt: NiftiVolume, z: int) -> LabelMask:
    plane = np.rint(gt.voxels[:, :, z]).astype(np.int64)
    return LabelMask(plane.T)


def patient_sequences(record: PatientRecord) -> list[CineSequence]:
    """Build one per-slice cine sequence per short-axis slice.

    Each frame is intensity-normalized independently; 1-based metadata
    frame numbers become 0-based sequence indices here.
    """
    cine = record.cine.scaled()
    sequences = []
    for z in range(record.slice_count):
        frames = tuple(
            normalize_intensity(cine[:, :, z, t].T) for t in range(record.frame_count)
        )
        sequences.append(
            CineSequence(
                frames=frames,
                ed_index=record.ed_frame - 1,
                es_index=record.es_frame - 1,
                ed_mask=_slice_mask(record.gt_ed, z),
                es_mask_gt=_slice_mask(record.gt_es, z),
            )
        )
    return sequences


def _gray_rgb(frame: GrayFrame | None, shape: tuple[int, int]) -> np.ndarray:
    if frame is None:
        gray = np.full(shape, 96, dtype=np.float64)
    else:
        gray = np.rint(frame.pixels * 255.0)
    return np.repeat(gray[:, :, None], 3, axis=2)


def export_overlay_png(frame: GrayFrame, mask: LabelMask, path: str | Path) -> None:
    """Write the frame as 8-bit RGB with labels tinted at 50% opacity.

    Label 1 is tinted red, 2 green, 3 blue; background pixels stay pure
    grayscale.
    """
    if frame.shape != mask.shape:
        raise ValueError(f"shape mismatch: frame {frame.shape} vs mask {mask.shape}")
    rgb = _gray_rgb(frame, frame.shape)
    for label, color in _LABEL_COLORS.items():
        where = mask.labels == label
        for c in range(3):
            rgb[where, c] = 0.5 * rgb[where, c] + 0.5 * color[c]
    Image.fromarray(np.rint(rgb).astype(np.uint8), "RGB").save(Path(path), format="PNG")


def export_binary_png(
    bits: BinaryMap,
    path: str | Path,
    background: GrayFrame | None = None,
    color: tuple[int, int, int] = (255, 255, 255),
) -> None:
    """Render a binary map (error map, cell boundaries) over a gray image.

    Set pixels take ``color`` (white by default); the rest shows the
    background frame, or mid-gray when none is given.
    """
    if background is not None and background.shape != bits.shape:
        raise ValueError(f"shape mismatch: frame {background.shape} vs map {bits.shape}")
    rgb = _gray_rgb(background, bits.shape)
    where = bits.bits == 1
    for c in range(3):
        rgb[where, c] = color[c]
    Image.fromarray(np.rint(rgb).astype(np.uint8), "RGB").save(Path(path), format="PNG")


def write_metrics_csv(reports: list[DiceReport], path: str | Path) -> None:
    """Write per-patient Dice scores as CSV, sorted by patient id.

    Fixed header ``patient_id,group,dice_rv,dice_myo,dice_lv``; scores
    with six decimals and a dot separator regardless of locale, so
    identical reports always produce byte-identical files.
    """
    if not reports:
        raise ValueError("cannot write an empty report list")
    lines = ["patient_id,group,dice_rv,dice_myo,dice_lv"]
    for r in sorted(reports, key=lambda r: r.patient_id):
        lines.append(
            f"{r.patient_id},{r.group},{r.dice_rv:.6f},{r.dice_myo:.6f},{r.dice_lv:.6f}"
        )
    Path(path).write_text("\n".join(lines) + "\n")
