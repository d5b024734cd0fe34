"""The two regularizers of the tracking pipeline.

Raw frames get a small Gaussian blur before superpixel extraction to
suppress grey-level noise; freshly propagated masks get a wide median
filter to remove label speckle at structure boundaries.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from .imgcore import GrayFrame, LabelMask

__all__ = ["gaussian_smooth", "median_filter_mask", "gaussian_kernel_1d"]


def gaussian_kernel_1d(sigma: float) -> np.ndarray:
    """Normalized sampled-Gaussian taps with radius ceil(3*sigma)."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    radius = math.ceil(3.0 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return taps / taps.sum()


def gaussian_smooth(frame: GrayFrame, sigma: float) -> GrayFrame:
    """Separable Gaussian blur with replicate padding at the borders.

    The kernel is the normalized sampled Gaussian truncated at radius
    ceil(3*sigma) (> 99.7% of the mass), so a constant image comes back
    unchanged. Output is clamped to [0, 1] against round-off.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    radius = math.ceil(3.0 * sigma)
    smoothed = ndimage.gaussian_filter(
        frame.pixels, sigma=sigma, mode="nearest", radius=radius
    )
    return GrayFrame(np.clip(smoothed, 0.0, 1.0))


def median_filter_mask(mask: LabelMask, kernel: int) -> LabelMask:
    """kernel x kernel median of integer labels, zero padding at borders.

    Labels are totally ordered (0 < 1 < 2 < 3) and the window has an odd
    number of slots, so the median is always one of the window values.
    Out-of-image slots count as background, which keeps background
    dominant near the frame edge.
    """
    if kernel < 1 or kernel % 2 == 0:
        raise ValueError(f"kernel must be an odd positive integer, got {kernel}")
    if kernel == 1:
        return mask
    filtered = ndimage.median_filter(mask.labels, size=kernel, mode="constant", cval=0)
    return LabelMask(filtered)
