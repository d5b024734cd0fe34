"""Superpixel-based tracking of heart segmentations through cyclic cine MR.

Given one expert mask at end-diastole, the pipeline re-segments every
frame into intensity-coherent superpixel cells, carries labels across
frames by per-cell majority vote with median regularization, walks both
directions around the cardiac cycle to end-systole, and fuses the two
arrivals into a single prediction scored with Dice.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .imgcore import (
    LABEL_ALPHABET,
    LABEL_BACKGROUND,
    LABEL_LV,
    LABEL_MYO,
    LABEL_RV,
    STRUCTURE_NAMES,
    BinaryMap,
    GrayFrame,
    LabelMask,
    SuperpixelMap,
    normalize_intensity,
    one_hot,
)
from .filters import gaussian_kernel_1d, gaussian_smooth, median_filter_mask
from .superpixels import (
    DEFAULT_CELL_AREA,
    DEFAULT_COMPACTNESS,
    SuperpixelConfig,
    boundary_map,
    default_cell_count,
    enforce_connectivity,
    slic_iterate,
    slic_segment,
)
from .propagation import PipelineConfig, majority_label, propagate_step, vote_cells
from .tracking import (
    CineSequence,
    TrackResult,
    build_paths,
    fuse_masks,
    track_bidirectional,
    track_path,
)
from .metrics import (
    ACDC_GROUPS,
    DiceReport,
    dice,
    dice_nd,
    dice_per_structure,
    error_map,
    summarize,
)
from .dataio import (
    NiftiVolume,
    PatientRecord,
    export_binary_png,
    export_overlay_png,
    load_acdc_patient,
    patient_sequences,
    read_nifti,
    write_metrics_csv,
    write_nifti,
)
from .phantom import (
    BeatingAnnulusSpec,
    MovingCircleSpec,
    beating_annulus,
    moving_circle,
)

__all__ = [
    "__version__",
    "LABEL_ALPHABET",
    "LABEL_BACKGROUND",
    "LABEL_RV",
    "LABEL_MYO",
    "LABEL_LV",
    "STRUCTURE_NAMES",
    "GrayFrame",
    "LabelMask",
    "SuperpixelMap",
    "BinaryMap",
    "normalize_intensity",
    "one_hot",
    "gaussian_kernel_1d",
    "gaussian_smooth",
    "median_filter_mask",
    "DEFAULT_CELL_AREA",
    "DEFAULT_COMPACTNESS",
    "SuperpixelConfig",
    "default_cell_count",
    "slic_iterate",
    "slic_segment",
    "enforce_connectivity",
    "boundary_map",
    "PipelineConfig",
    "majority_label",
    "vote_cells",
    "propagate_step",
    "CineSequence",
    "TrackResult",
    "build_paths",
    "track_path",
    "fuse_masks",
    "track_bidirectional",
    "ACDC_GROUPS",
    "DiceReport",
    "dice",
    "dice_nd",
    "dice_per_structure",
    "error_map",
    "summarize",
    "NiftiVolume",
    "PatientRecord",
    "read_nifti",
    "write_nifti",
    "load_acdc_patient",
    "patient_sequences",
    "export_overlay_png",
    "export_binary_png",
    "write_metrics_csv",
    "BeatingAnnulusSpec",
    "MovingCircleSpec",
    "moving_circle",
    "beating_annulus",
]
