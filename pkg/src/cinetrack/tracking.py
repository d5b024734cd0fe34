"""Bidirectional tracking around the cardiac cycle.

The heart beats periodically, so there are two temporal routes from the
end-diastolic frame (where a manual mask exists) to the end-systolic
frame: with time, and against it. Both routes are tracked independently
by repeated single-step propagation and their two end-systole
predictions are fused into one averaged mask.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imgcore import GrayFrame, LabelMask, LABEL_ALPHABET
from .metrics import dice, STRUCTURE_NAMES
from .propagation import PipelineConfig, propagate_step

__all__ = [
    "CineSequence",
    "TrackResult",
    "build_paths",
    "track_path",
    "fuse_masks",
    "track_bidirectional",
]

_N_LABELS = len(LABEL_ALPHABET)


@dataclass(frozen=True)
class CineSequence:
    """Cyclic stack of frames for one slice, with the two key phases.

    ``frames[T-1]`` precedes ``frames[0]``: the sequence wraps around the
    heartbeat. A ground-truth mask is required at end-diastole (the
    tracking start) and optional at end-systole (for evaluation).
    """

    frames: tuple[GrayFrame, ...]
    ed_index: int
    es_index: int
    ed_mask: LabelMask
    es_mask_gt: LabelMask | None = None

    def __post_init__(self) -> None:
        frames = tuple(self.frames)
        object.__setattr__(self, "frames", frames)
        if len(frames) < 2:
            raise ValueError(f"sequence needs at least 2 frames, got {len(frames)}")
        if not (0 <= self.ed_index < len(frames)) or not (0 <= self.es_index < len(frames)):
            raise ValueError(
                f"phase indices must lie in [0, {len(frames)}), "
                f"got ed={self.ed_index}, es={self.es_index}"
            )
        if self.ed_index == self.es_index:
            raise ValueError("end-diastole and end-systole must be different frames")
        shape = frames[0].shape
        for t, frame in enumerate(frames):
            if frame.shape != shape:
                raise ValueError(f"frame {t} shape {frame.shape} differs from {shape}")
        if self.ed_mask.shape != shape:
            raise ValueError(f"ED mask shape {self.ed_mask.shape} differs from {shape}")
        if self.es_mask_gt is not None and self.es_mask_gt.shape != shape:
            raise ValueError(f"ES mask shape {self.es_mask_gt.shape} differs from {shape}")

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    @property
    def shape(self) -> tuple[int, int]:
        return self.frames[0].shape


@dataclass(frozen=True)
class TrackResult:
    """Masks along both temporal paths plus the fused ES prediction."""

    forward_masks: tuple[LabelMask, ...]
    backward_masks: tuple[LabelMask, ...]
    fused_es: LabelMask
    dice_per_structure: dict[str, float] | None = None


def build_paths(frame_count: int, ed: int, es: int) -> tuple[list[int], list[int]]:
    """The two frame-index routes from ED to ES around the cycle.

    Both start at ``ed`` and end at ``es``; the forward path steps
    ``+1 mod T``, the backward path ``-1 mod T``. Together they visit
    every frame, so ``len(forward) + len(backward) == T + 2`` (the two
    endpoints are shared).
    """
    if frame_count < 2:
        raise ValueError(f"need at least 2 frames, got {frame_count}")
    if not (0 <= ed < frame_count) or not (0 <= es < frame_count):
        raise ValueError(f"indices must lie in [0, {frame_count}), got ed={ed}, es={es}")
    if ed == es:
        raise ValueError("ED and ES indices must differ")
    forward = [(ed + k) % frame_count for k in range((es - ed) % frame_count + 1)]
    backward = [(ed - k) % frame_count for k in range((ed - es) % frame_count + 1)]
    return forward, backward


def track_path(
    seq: CineSequence, path: list[int], config: PipelineConfig | None = None
) -> list[LabelMask]:
    """Propagate the ED mask along one frame-index path.

    ``out[0]`` is the ED mask itself; ``out[k]`` is the propagation of
    ``out[k-1]`` onto frame ``path[k]``.
    """
    if not path:
        raise ValueError("path must be non-empty")
    if path[0] != seq.ed_index:
        raise ValueError(f"path must start at the ED frame {seq.ed_index}, got {path[0]}")
    for t in path:
        if not (0 <= t < seq.frame_count):
            raise ValueError(f"path index {t} outside [0, {seq.frame_count})")
    config = config or PipelineConfig()
    masks = [seq.ed_mask]
    for t in path[1:]:
        masks.append(propagate_step(masks[-1], seq.frames[t], config))
    return masks


def _box_count(bits: np.ndarray, kernel: int) -> np.ndarray:
    """Exact integer count of set pixels in the k x k window at each pixel.

    Windows are clipped at the image border (out-of-image slots
    contribute nothing). Integral-image implementation.
    """
    height, width = bits.shape
    radius = kernel // 2
    integral = np.zeros((height + 1, width + 1), dtype=np.int64)
    integral[1:, 1:] = bits.astype(np.int64).cumsum(axis=0).cumsum(axis=1)
    y0 = np.clip(np.arange(height) - radius, 0, height)
    y1 = np.clip(np.arange(height) + radius + 1, 0, height)
    x0 = np.clip(np.arange(width) - radius, 0, width)
    x1 = np.clip(np.arange(width) + radius + 1, 0, width)
    return (
        integral[np.ix_(y1, x1)]
        - integral[np.ix_(y0, x1)]
        - integral[np.ix_(y1, x0)]
        + integral[np.ix_(y0, x0)]
    )


def fuse_masks(a: LabelMask, b: LabelMask, median_kernel: int = 9) -> LabelMask:
    """Average two label masks into one.

    Where the masks agree the value is kept. Where they differ, the
    pixel takes the label with the most occurrences across both masks
    inside the ``median_kernel`` x ``median_kernel`` window around it
    (the argmax of the locally box-summed average of the two one-hot
    encodings); count ties resolve to the smallest label. The rule is
    symmetric in its two arguments.
    """
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if median_kernel < 1 or median_kernel % 2 == 0:
        raise ValueError(f"median_kernel must be an odd positive integer, got {median_kernel}")
    agree = a.labels == b.labels
    if agree.all():
        return a
    counts = np.stack(
        [
            _box_count(a.labels == label, median_kernel)
            + _box_count(b.labels == label, median_kernel)
            for label in LABEL_ALPHABET
        ]
    )
    vote = counts.argmax(axis=0).astype(np.uint8)  # first max -> smallest label
    return LabelMask(np.where(agree, a.labels, vote))


def track_bidirectional(
    seq: CineSequence, config: PipelineConfig | None = None
) -> TrackResult:
    """Track both temporal paths and fuse their end-systole predictions.

    When the sequence carries an ES ground-truth mask, per-structure
    Dice scores of the fused prediction are computed as well.
    """
    config = config or PipelineConfig()
    forward_path, backward_path = build_paths(seq.frame_count, seq.ed_index, seq.es_index)
    forward = track_path(seq, forward_path, config)
    backward = track_path(seq, backward_path, config)
    fused = fuse_masks(forward[-1], backward[-1], config.median_kernel)
    scores = None
    if seq.es_mask_gt is not None:
        scores = {
            name: dice(fused, seq.es_mask_gt, label)
            for label, name in STRUCTURE_NAMES.items()
        }
    return TrackResult(
        forward_masks=tuple(forward),
        backward_masks=tuple(backward),
        fused_es=fused,
        dice_per_structure=scores,
    )
