"""One temporal step of the tracker.

The current raw frame is smoothed and split into superpixel cells; each
cell then takes the label that the previous frame's mask uses most often
inside it, and the re-labelled mask is median-filtered. As long as the
motion between frames stays below the cell size, the cells follow the
moving anatomy and carry the labels with them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filters import gaussian_smooth, median_filter_mask
from .imgcore import GrayFrame, LabelMask, SuperpixelMap, LABEL_ALPHABET
from .superpixels import (
    DEFAULT_CELL_AREA,
    DEFAULT_COMPACTNESS,
    SuperpixelConfig,
    default_cell_count,
    slic_segment,
)

__all__ = ["PipelineConfig", "majority_label", "vote_cells", "propagate_step"]

_N_LABELS = len(LABEL_ALPHABET)


@dataclass(frozen=True)
class PipelineConfig:
    """Hyper-parameters of a propagation step.

    The defaults are the tuned values the method was developed with:
    Gaussian sigma 0.5 and a 9x9 median kernel. When ``superpixel`` is
    None, a per-frame clustering config is derived so that cells average
    ``cell_area`` pixels.
    """

    gaussian_sigma: float = 0.5
    median_kernel: int = 9
    superpixel: SuperpixelConfig | None = None
    cell_area: float = DEFAULT_CELL_AREA
    compactness: float = DEFAULT_COMPACTNESS

    def __post_init__(self) -> None:
        if self.gaussian_sigma <= 0:
            raise ValueError(f"gaussian_sigma must be positive, got {self.gaussian_sigma}")
        if self.median_kernel < 1 or self.median_kernel % 2 == 0:
            raise ValueError(
                f"median_kernel must be an odd positive integer, got {self.median_kernel}"
            )
        if self.cell_area <= 0:
            raise ValueError(f"cell_area must be positive, got {self.cell_area}")
        if self.compactness <= 0:
            raise ValueError(f"compactness must be positive, got {self.compactness}")

    def superpixel_for(self, width: int, height: int) -> SuperpixelConfig:
        """Clustering config for a frame of the given size."""
        if self.superpixel is not None:
            return self.superpixel
        return SuperpixelConfig(
            target_cells=default_cell_count(width, height, self.cell_area),
            compactness=self.compactness,
        )


def majority_label(prev_mask: LabelMask, cell_pixels: np.ndarray) -> int:
    """Most frequent label of ``prev_mask`` over the given pixels.

    ``cell_pixels`` is an (N, 2) array of (row, col) coordinates. Count
    ties resolve to the smallest label value, which biases boundary
    cells toward background.
    """
    coords = np.asarray(cell_pixels)
    if coords.size == 0:
        raise ValueError("cell must contain at least one pixel")
    coords = coords.reshape(-1, 2)
    rows = coords[:, 0]
    cols = coords[:, 1]
    if (
        rows.min() < 0
        or cols.min() < 0
        or rows.max() >= prev_mask.height
        or cols.max() >= prev_mask.width
    ):
        raise ValueError("cell pixel outside mask bounds")
    counts = np.bincount(prev_mask.labels[rows, cols], minlength=_N_LABELS)
    return int(np.argmax(counts))


def vote_cells(prev_mask: LabelMask, spmap: SuperpixelMap) -> LabelMask:
    """Re-label every superpixel cell with its majority vote.

    Vectorized equivalent of calling :func:`majority_label` per cell;
    the output is constant on every cell.
    """
    if prev_mask.shape != spmap.shape:
        raise ValueError(
            f"mask shape {prev_mask.shape} does not match cell map shape {spmap.shape}"
        )
    joint = spmap.cells.ravel().astype(np.int64) * _N_LABELS + prev_mask.labels.ravel()
    counts = np.bincount(joint, minlength=spmap.cell_count * _N_LABELS)
    per_cell = counts.reshape(spmap.cell_count, _N_LABELS).argmax(axis=1)
    return LabelMask(per_cell.astype(np.uint8)[spmap.cells])


def propagate_step(
    prev_mask: LabelMask, next_raw: GrayFrame, config: PipelineConfig | None = None
) -> LabelMask:
    """Carry a mask one frame forward.

    Pipeline: Gaussian-smooth the incoming raw frame, extract superpixel
    cells from it, give each cell the majority label of the previous
    mask, then median-filter the result.
    """
    config = config or PipelineConfig()
    if prev_mask.shape != next_raw.shape:
        raise ValueError(
            f"mask shape {prev_mask.shape} does not match frame shape {next_raw.shape}"
        )
    smoothed = gaussian_smooth(next_raw, config.gaussian_sigma)
    sp_config = config.superpixel_for(next_raw.width, next_raw.height)
    spmap = slic_segment(smoothed, sp_config)
    voted = vote_cells(prev_mask, spmap)
    return median_filter_mask(voted, config.median_kernel)
