"""Synthetic ground-truthed cine sequences.

Two phantoms exercise the tracker without clinical data: a noisy disk
drifting across the canvas (a single moving structure), and a cyclically
contracting annulus around a bright cavity (a two-structure heartbeat
analogue whose ground truth is known at every frame).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .imgcore import GrayFrame, LabelMask, LABEL_RV, LABEL_MYO, LABEL_LV
from .tracking import CineSequence

__all__ = ["MovingCircleSpec", "BeatingAnnulusSpec", "moving_circle", "beating_annulus"]

_BORDER_MARGIN = 2.0


def _pixel_grid(width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    ys = np.arange(height, dtype=np.float64)[:, None]
    xs = np.arange(width, dtype=np.float64)[None, :]
    return ys, xs


def _render(
    shape_levels: np.ndarray, noise_sigma: float, rng: np.random.Generator
) -> GrayFrame:
    img = shape_levels
    if noise_sigma > 0:
        img = img + rng.normal(0.0, noise_sigma, size=img.shape)
    return GrayFrame(np.clip(img, 0.0, 1.0))


@dataclass(frozen=True)
class MovingCircleSpec:
    """A light disk on a dark canvas, drifting ``shift`` pixels per frame.

    ``center`` is the disk center (x, y) in frame 0; None centers the
    whole trajectory on the canvas. Noise is additive Gaussian with a
    recorded seed, so sequences are bit-reproducible.
    """

    width: int = 64
    height: int = 64
    frame_count: int = 10
    radius: float = 20.0
    shift: tuple[float, float] = (1.0, 0.0)
    center: tuple[float, float] | None = None
    noise_sigma: float = 0.05
    seed: int = 0
    background: float = 0.2
    foreground: float = 0.7

    def __post_init__(self) -> None:
        if self.frame_count < 2:
            raise ValueError(f"frame_count must be >= 2, got {self.frame_count}")
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")

    def center_at(self, t: int) -> tuple[float, float]:
        """Disk center (x, y) at frame ``t``."""
        if self.center is not None:
            cx0, cy0 = self.center
        else:
            cx0 = (self.width - 1) / 2.0 - self.shift[0] * (self.frame_count - 1) / 2.0
            cy0 = (self.height - 1) / 2.0 - self.shift[1] * (self.frame_count - 1) / 2.0
        return cx0 + self.shift[0] * t, cy0 + self.shift[1] * t


@dataclass(frozen=True)
class BeatingAnnulusSpec:
    """A contracting ring (wall) around a bright disk (cavity).

    Both radii scale by ``1 - contraction * sin^2(pi*t/T + phase)``, so the
    sequence is exactly cyclic: frame T would equal frame 0. With zero
    phase the largest shape sits at t=0 (end-diastole) and the smallest
    at t=T/2 (end-systole).
    """

    width: int = 128
    height: int = 128
    frame_count: int = 20
    inner_radius: float = 26.0
    outer_radius: float = 42.0
    contraction: float = 0.3
    phase: float = 0.0
    center: tuple[float, float] | None = None
    noise_sigma: float = 0.05
    seed: int = 0
    background: float = 0.2
    wall: float = 0.45
    cavity: float = 0.8

    def __post_init__(self) -> None:
        if self.frame_count < 2:
            raise ValueError(f"frame_count must be >= 2, got {self.frame_count}")
        if not (0 < self.inner_radius < self.outer_radius):
            raise ValueError(
                f"need 0 < inner < outer radius, got {self.inner_radius}, {self.outer_radius}"
            )
        if not (0 <= self.contraction < 1):
            raise ValueError(f"contraction must lie in [0, 1), got {self.contraction}")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")

    def center_xy(self) -> tuple[float, float]:
        if self.center is not None:
            return self.center
        return (self.width - 1) / 2.0, (self.height - 1) / 2.0

    def scale_at(self, t: int) -> float:
        s = math.sin(math.pi * t / self.frame_count + self.phase)
        return 1.0 - self.contraction * s * s


def _check_in_bounds(name: str, lo_x: float, hi_x: float, lo_y: float, hi_y: float,
                     width: int, height: int) -> None:
    if (
        lo_x < _BORDER_MARGIN
        or lo_y < _BORDER_MARGIN
        or hi_x > width - 1 - _BORDER_MARGIN
        or hi_y > height - 1 - _BORDER_MARGIN
    ):
        raise ValueError(f"{name} leaves less than {_BORDER_MARGIN} px of border margin")


def moving_circle(spec: MovingCircleSpec) -> tuple[CineSequence, list[LabelMask]]:
    """Render the drifting-disk sequence and its exact per-frame truth.

    Pixel (x, y) belongs to the disk iff (x-cx)^2 + (y-cy)^2 < r^2 (no
    anti-aliasing), so Dice targets against the truth are exact. The
    disk carries label 1. ED is frame 0, ES the last frame.
    """
    for t in (0, spec.frame_count - 1):
        cx, cy = spec.center_at(t)
        _check_in_bounds(
            f"disk at frame {t}",
            cx - spec.radius, cx + spec.radius,
            cy - spec.radius, cy + spec.radius,
            spec.width, spec.height,
        )
    rng = np.random.default_rng(spec.seed)
    ys, xs = _pixel_grid(spec.width, spec.height)
    r2 = spec.radius * spec.radius
    frames: list[GrayFrame] = []
    truths: list[LabelMask] = []
    for t in range(spec.frame_count):
        cx, cy = spec.center_at(t)
        inside = (xs - cx) ** 2 + (ys - cy) ** 2 < r2
        levels = np.where(inside, spec.foreground, spec.background)
        frames.append(_render(levels, spec.noise_sigma, rng))
        truths.append(LabelMask(inside.astype(np.uint8) * LABEL_RV))
    seq = CineSequence(
        frames=tuple(frames),
        ed_index=0,
        es_index=spec.frame_count - 1,
        ed_mask=truths[0],
        es_mask_gt=truths[-1],
    )
    return seq, truths


def beating_annulus(spec: BeatingAnnulusSpec) -> tuple[CineSequence, list[LabelMask]]:
    """Render the contracting-annulus sequence and its per-frame truth.

    The wall (between the two radii) carries the myocardium label 2, the
    cavity (inside the inner radius) label 3. ED is the frame of maximal
    scale, ES the frame of minimal scale; with zero contraction all
    frames coincide and ES defaults to T/2.
    """
    cx, cy = spec.center_xy()
    _check_in_bounds(
        "annulus at full size",
        cx - spec.outer_radius, cx + spec.outer_radius,
        cy - spec.outer_radius, cy + spec.outer_radius,
        spec.width, spec.height,
    )
    scales = np.array([spec.scale_at(t) for t in range(spec.frame_count)])
    ed_index = int(np.argmax(scales))
    es_index = int(np.argmin(scales))
    if ed_index == es_index:  # constant scale (contraction == 0)
        ed_index = 0
        es_index = spec.frame_count // 2

    rng = np.random.default_rng(spec.seed)
    ys, xs = _pixel_grid(spec.width, spec.height)
    d2 = (xs - cx) ** 2 + (ys - cy) ** 2
    frames: list[GrayFrame] = []
    truths: list[LabelMask] = []
    for t in range(spec.frame_count):
        s = spec.scale_at(t)
        inner2 = (spec.inner_radius * s) ** 2
        outer2 = (spec.outer_radius * s) ** 2
        cavity = d2 < inner2
        wall = (d2 < outer2) & ~cavity
        levels = np.where(cavity, spec.cavity, np.where(wall, spec.wall, spec.background))
        frames.append(_render(levels, spec.noise_sigma, rng))
        labels = np.zeros((spec.height, spec.width), dtype=np.uint8)
        labels[wall] = LABEL_MYO
        labels[cavity] = LABEL_LV
        truths.append(LabelMask(labels))
    seq = CineSequence(
        frames=tuple(frames),
        ed_index=ed_index,
        es_index=es_index,
        ed_mask=truths[ed_index],
        es_mask_gt=truths[es_index],
    )
    return seq, truths
