"""Core value types shared by the whole pipeline.

All types wrap a 2-D numpy array (row-major, shape ``(height, width)``)
that is validated on construction and then frozen, so instances can be
shared freely between threads and processes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LABEL_BACKGROUND",
    "LABEL_RV",
    "LABEL_MYO",
    "LABEL_LV",
    "LABEL_ALPHABET",
    "STRUCTURE_NAMES",
    "GrayFrame",
    "LabelMask",
    "SuperpixelMap",
    "BinaryMap",
    "normalize_intensity",
    "one_hot",
]

# Anatomical label encoding used by the ACDC ground-truth files.
LABEL_BACKGROUND = 0
LABEL_RV = 1
LABEL_MYO = 2
LABEL_LV = 3
LABEL_ALPHABET = (LABEL_BACKGROUND, LABEL_RV, LABEL_MYO, LABEL_LV)

# Short names for the three labeled structures, keyed by label value.
STRUCTURE_NAMES = {LABEL_RV: "rv", LABEL_MYO: "myo", LABEL_LV: "lv"}


def _freeze(obj, field: str, arr: np.ndarray) -> None:
    arr.setflags(write=False)
    object.__setattr__(obj, field, arr)


@dataclass(frozen=True)
class GrayFrame:
    """One 2-D grayscale image slice with intensities in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.pixels, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"frame must be a non-empty 2-D array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            y, x = np.argwhere(~np.isfinite(arr))[0]
            raise ValueError(f"non-finite intensity at pixel (row={y}, col={x})")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError(
                f"intensities must lie in [0, 1], got range [{arr.min()}, {arr.max()}]"
            )
        _freeze(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape


@dataclass(frozen=True)
class LabelMask:
    """Per-pixel anatomical label map over the alphabet {0, 1, 2, 3}."""

    labels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.labels)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"mask must be a non-empty 2-D array, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            rounded = np.rint(arr)
            if not np.array_equal(rounded, arr):
                raise ValueError("mask labels must be integer-valued")
            arr = rounded
        if arr.min() < 0 or arr.max() > LABEL_LV:
            raise ValueError(
                f"labels must lie in {set(LABEL_ALPHABET)}, got range [{arr.min()}, {arr.max()}]"
            )
        _freeze(self, "labels", arr.astype(np.uint8, copy=True))

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape


@dataclass(frozen=True)
class SuperpixelMap:
    """Partition of a frame into contiguous cells, one index per pixel.

    Invariants enforced here: every index in ``[0, cell_count)`` occurs at
    least once, no index falls outside that range, and every cell forms a
    single 4-connected component.
    """

    cells: np.ndarray
    cell_count: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.cells)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"cell map must be a non-empty 2-D array, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError("cell indices must be integers")
        arr = arr.astype(np.int32, copy=True)
        if self.cell_count < 1:
            raise ValueError(f"cell_count must be >= 1, got {self.cell_count}")
        counts = np.bincount(arr.ravel(), minlength=self.cell_count)
        if arr.min() < 0 or arr.max() >= self.cell_count:
            raise ValueError(
                f"cell indices must lie in [0, {self.cell_count}), "
                f"got range [{arr.min()}, {arr.max()}]"
            )
        if counts.min() == 0:
            raise ValueError(f"cell index {int(np.argmin(counts))} has no pixels")
        # 4-connectivity: the number of equal-value connected components must
        # equal the number of cells.
        from skimage.measure import label as cc_label

        n_components = cc_label(arr, connectivity=1, background=-1).max()
        if n_components != self.cell_count:
            raise ValueError(
                f"cells must each be 4-connected: {self.cell_count} cells "
                f"but {n_components} connected components"
            )
        _freeze(self, "cells", arr)

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape


@dataclass(frozen=True)
class BinaryMap:
    """Row-major {0, 1} map (one-hot channels, error maps, boundaries)."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.bits)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"binary map must be a non-empty 2-D array, got shape {arr.shape}")
        if arr.dtype == bool:
            arr = arr.astype(np.uint8)
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError("binary map values must be integers")
        if arr.min() < 0 or arr.max() > 1:
            raise ValueError(f"binary map values must be 0 or 1, got range [{arr.min()}, {arr.max()}]")
        _freeze(self, "bits", arr.astype(np.uint8, copy=True))

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def count(self) -> int:
        """Number of set pixels."""
        return int(self.bits.sum())


def normalize_intensity(raw: np.ndarray) -> GrayFrame:
    """Min-max rescale an arbitrary finite 2-D array into a GrayFrame.

    A constant input maps to the all-zero frame so that empty or padded
    slices pass through the pipeline harmlessly.
    """
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        y, x = np.argwhere(~np.isfinite(arr))[0]
        raise ValueError(f"non-finite value at pixel (row={y}, col={x})")
    lo = arr.min()
    hi = arr.max()
    if hi == lo:
        return GrayFrame(np.zeros_like(arr))
    return GrayFrame((arr - lo) / (hi - lo))


def one_hot(mask: LabelMask, label: int) -> BinaryMap:
    """Binary map that is 1 exactly where ``mask`` equals ``label``."""
    if label not in LABEL_ALPHABET:
        raise ValueError(f"label must be one of {set(LABEL_ALPHABET)}, got {label}")
    return BinaryMap((mask.labels == label).astype(np.uint8))
