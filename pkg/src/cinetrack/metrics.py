"""Dice overlap scoring, mismatch maps, and score-distribution summaries."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imgcore import BinaryMap, LabelMask, LABEL_ALPHABET, STRUCTURE_NAMES

__all__ = [
    "ACDC_GROUPS",
    "DiceReport",
    "dice",
    "dice_nd",
    "dice_per_structure",
    "error_map",
    "summarize",
]

# Patient subgroups of the ACDC study population.
ACDC_GROUPS = ("NOR", "MINF", "DCM", "HCM", "RV")

_STAT_NAMES = ("min", "q1", "median", "q3", "max", "mean")


@dataclass(frozen=True)
class DiceReport:
    """Per-patient Dice scores for the three labeled structures."""

    patient_id: str
    group: str
    dice_rv: float
    dice_myo: float
    dice_lv: float

    def __post_init__(self) -> None:
        if not self.patient_id:
            raise ValueError("patient_id must be non-empty")
        if not self.group:
            raise ValueError("group must be non-empty")
        for name in ("dice_rv", "dice_myo", "dice_lv"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


def dice_nd(a: np.ndarray, b: np.ndarray, label: int) -> float:
    """Dice overlap of the ``label`` regions of two label arrays.

    Works on arrays of any dimensionality (2-D slices, 3-D volumes).
    When the label is absent from both arrays the score is 1: a slice
    that legitimately lacks a structure is a perfect match.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    in_a = a == label
    in_b = b == label
    denom = int(in_a.sum()) + int(in_b.sum())
    if denom == 0:
        return 1.0
    return 2.0 * int((in_a & in_b).sum()) / denom


def dice(a: LabelMask, b: LabelMask, label: int) -> float:
    """Dice overlap of one label between two masks: 2|A∩B| / (|A|+|B|)."""
    if label not in LABEL_ALPHABET:
        raise ValueError(f"label must be one of {set(LABEL_ALPHABET)}, got {label}")
    return dice_nd(a.labels, b.labels, label)


def dice_per_structure(pred: np.ndarray, truth: np.ndarray) -> dict[str, float]:
    """Dice of each labeled structure (rv, myo, lv) between two label arrays."""
    return {name: dice_nd(pred, truth, label) for label, name in STRUCTURE_NAMES.items()}


def error_map(pred: LabelMask, truth: LabelMask) -> BinaryMap:
    """1 exactly where predicted and ground-truth labels disagree."""
    if pred.shape != truth.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {truth.shape}")
    return BinaryMap((pred.labels != truth.labels).astype(np.uint8))


def summarize(reports: list[DiceReport]) -> dict[str, dict[str, float]]:
    """Order statistics of the Dice scores, per structure.

    Returns ``{"rv"|"myo"|"lv": {"min", "q1", "median", "q3", "max",
    "mean"}}``. Quartiles use linear interpolation of the empirical CDF
    (numpy's default), so box-plot numbers are bit-reproducible.
    """
    if not reports:
        raise ValueError("cannot summarize an empty report list")
    out: dict[str, dict[str, float]] = {}
    for field, name in (("dice_rv", "rv"), ("dice_myo", "myo"), ("dice_lv", "lv")):
        values = np.array([getattr(r, field) for r in reports], dtype=np.float64)
        quartiles = np.quantile(values, [0.0, 0.25, 0.5, 0.75, 1.0])
        stats = (*quartiles, values.mean())
        out[name] = {stat: float(v) for stat, v in zip(_STAT_NAMES, stats)}
    return out
