"""Shared random-input builders and brute-force oracle implementations.

The oracles deliberately use different mechanisms from the library code
(dense convolution instead of separable filtering, window sorting
instead of rank filters, per-pixel loops instead of integral images) so
agreement between the two is meaningful.
"""
from __future__ import annotations

import math

import numpy as np

from cinetrack.imgcore import GrayFrame, LabelMask, LABEL_ALPHABET


def random_frame(rng: np.random.Generator, height: int, width: int) -> GrayFrame:
    return GrayFrame(rng.random((height, width)))


def random_mask(rng: np.random.Generator, height: int, width: int) -> LabelMask:
    return LabelMask(rng.integers(0, 4, size=(height, width), dtype=np.int64))


def random_blob_mask(rng: np.random.Generator, height: int, width: int) -> LabelMask:
    """Mask with contiguous regions, closer to real segmentations."""
    labels = np.zeros((height, width), dtype=np.int64)
    for value in (1, 2, 3):
        cy = rng.uniform(0, height)
        cx = rng.uniform(0, width)
        r = rng.uniform(2, max(3, min(height, width) / 3))
        ys = np.arange(height)[:, None]
        xs = np.arange(width)[None, :]
        labels[(ys - cy) ** 2 + (xs - cx) ** 2 < r * r] = value
    return LabelMask(labels)


def gaussian_conv_oracle(pixels: np.ndarray, sigma: float) -> np.ndarray:
    """Dense (non-separable) 2-D Gaussian convolution, replicate padding."""
    radius = math.ceil(3.0 * sigma)
    off = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(off[:, None] ** 2 + off[None, :] ** 2) / (2.0 * sigma * sigma))
    kernel /= kernel.sum()
    padded = np.pad(pixels, radius, mode="edge")
    windows = np.lib.stride_tricks.sliding_window_view(padded, kernel.shape)
    return np.tensordot(windows, kernel, axes=([2, 3], [0, 1]))


def median_oracle(labels: np.ndarray, kernel: int) -> np.ndarray:
    """Zero-padded k x k median by sorting every window."""
    radius = kernel // 2
    padded = np.pad(labels, radius, mode="constant", constant_values=0)
    windows = np.lib.stride_tricks.sliding_window_view(padded, (kernel, kernel))
    flat = np.sort(windows.reshape(*labels.shape, kernel * kernel), axis=-1)
    return flat[..., (kernel * kernel) // 2]


def majority_oracle(values: np.ndarray) -> int:
    """Exhaustive histogram count with smallest-label tie breaking."""
    best_label, best_count = 0, -1
    for label in LABEL_ALPHABET:
        count = int(np.sum(values == label))
        if count > best_count:
            best_label, best_count = label, count
    return best_label


def dice_oracle(a: np.ndarray, b: np.ndarray, label: int) -> float:
    """Dice from explicit pixel index sets."""
    set_a = set(map(tuple, np.argwhere(a == label)))
    set_b = set(map(tuple, np.argwhere(b == label)))
    if not set_a and not set_b:
        return 1.0
    return 2.0 * len(set_a & set_b) / (len(set_a) + len(set_b))


def fuse_vote_oracle_pixel(a: np.ndarray, b: np.ndarray, y: int, x: int, kernel: int) -> int:
    """Window vote at one pixel by direct counting over clipped bounds."""
    radius = kernel // 2
    height, width = a.shape
    y0, y1 = max(0, y - radius), min(height, y + radius + 1)
    x0, x1 = max(0, x - radius), min(width, x + radius + 1)
    votes = np.concatenate([a[y0:y1, x0:x1].ravel(), b[y0:y1, x0:x1].ravel()])
    return majority_oracle(votes)


def fuse_oracle(a: np.ndarray, b: np.ndarray, kernel: int) -> np.ndarray:
    """Whole-mask fusion oracle: zero-padded window label counts."""
    radius = kernel // 2
    counts = []
    for label in LABEL_ALPHABET:
        total = np.zeros(a.shape, dtype=np.int64)
        for mask in (a, b):
            padded = np.pad((mask == label).astype(np.int64), radius, mode="constant")
            windows = np.lib.stride_tricks.sliding_window_view(padded, (kernel, kernel))
            total += windows.sum(axis=(2, 3))
        counts.append(total)
    vote = np.argmax(np.stack(counts), axis=0)
    return np.where(a == b, a, vote)
