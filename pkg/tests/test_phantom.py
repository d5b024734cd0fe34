from __future__ import annotations

import numpy as np
import pytest

from cinetrack.phantom import (
    BeatingAnnulusSpec,
    MovingCircleSpec,
    beating_annulus,
    moving_circle,
)


class TestMovingCircle:
    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError, match="frame_count"):
            MovingCircleSpec(frame_count=1)
        with pytest.raises(ValueError, match="radius"):
            MovingCircleSpec(radius=0.0)
        with pytest.raises(ValueError, match="noise"):
            MovingCircleSpec(noise_sigma=-0.1)

    def test_out_of_bounds_trajectory_rejected(self):
        with pytest.raises(ValueError, match="margin"):
            moving_circle(MovingCircleSpec(shift=(5.0, 0.0)))

    def test_static_noiseless_is_constant(self):
        seq, truths = moving_circle(MovingCircleSpec(shift=(0.0, 0.0), noise_sigma=0.0))
        for frame in seq.frames[1:]:
            assert np.array_equal(frame.pixels, seq.frames[0].pixels)
        for truth in truths[1:]:
            assert np.array_equal(truth.labels, truths[0].labels)

    def test_membership_arithmetic(self):
        # centers x0 .. x0+9; the pixel 19 px right of the final center is
        # inside the final disk only (distance 19 < r) and outside every
        # earlier one (distance >= 20 = r, strict membership)
        spec = MovingCircleSpec(center=(27.0, 31.0), noise_sigma=0.0)
        _, truths = moving_circle(spec)
        x_probe, y_probe = 27 + 9 + 19, 31
        assert truths[-1].labels[y_probe, x_probe] == 1
        for truth in truths[:-1]:
            assert truth.labels[y_probe, x_probe] == 0

    def test_phase_indices_and_masks(self):
        seq, truths = moving_circle(MovingCircleSpec())
        assert seq.ed_index == 0
        assert seq.es_index == 9
        assert np.array_equal(seq.ed_mask.labels, truths[0].labels)
        assert np.array_equal(seq.es_mask_gt.labels, truths[-1].labels)

    def test_seeded_determinism(self):
        a_seq, _ = moving_circle(MovingCircleSpec(seed=5))
        b_seq, _ = moving_circle(MovingCircleSpec(seed=5))
        c_seq, _ = moving_circle(MovingCircleSpec(seed=6))
        for a, b in zip(a_seq.frames, b_seq.frames):
            assert np.array_equal(a.pixels, b.pixels)
        assert not np.array_equal(a_seq.frames[0].pixels, c_seq.frames[0].pixels)

    def test_intensity_levels(self):
        seq, truths = moving_circle(MovingCircleSpec(noise_sigma=0.0))
        inside = truths[0].labels == 1
        assert np.all(seq.frames[0].pixels[inside] == 0.7)
        assert np.all(seq.frames[0].pixels[~inside] == 0.2)


class TestBeatingAnnulus:
    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError, match="inner"):
            BeatingAnnulusSpec(inner_radius=30.0, outer_radius=20.0)
        with pytest.raises(ValueError, match="contraction"):
            BeatingAnnulusSpec(contraction=1.0)
        with pytest.raises(ValueError, match="frame_count"):
            BeatingAnnulusSpec(frame_count=1)

    def test_too_large_annulus_rejected(self):
        with pytest.raises(ValueError, match="margin"):
            beating_annulus(BeatingAnnulusSpec(width=64, height=64, outer_radius=40.0))

    def test_zero_contraction_constant_frames(self):
        seq, truths = beating_annulus(BeatingAnnulusSpec(contraction=0.0, noise_sigma=0.0))
        for frame in seq.frames[1:]:
            assert np.array_equal(frame.pixels, seq.frames[0].pixels)
        assert seq.ed_index == 0
        assert seq.es_index == seq.frame_count // 2

    def test_phase_indices(self):
        seq, _ = beating_annulus(BeatingAnnulusSpec())
        assert seq.ed_index == 0
        assert seq.es_index == 10  # T=20, minimum of the sin^2 scale

    def test_area_contraction_ratio(self):
        # continuous areas scale by (1-c)^2 at ES; rasterized pixel counts
        # agree within 3%
        spec = BeatingAnnulusSpec(noise_sigma=0.0)
        seq, truths = beating_annulus(spec)
        target = (1.0 - spec.contraction) ** 2
        for label in (2, 3):
            area_ed = int((truths[seq.ed_index].labels == label).sum())
            area_es = int((truths[seq.es_index].labels == label).sum())
            assert abs(area_es / area_ed - target) / target <= 0.03

    def test_cyclic_mirror_symmetry(self):
        spec = BeatingAnnulusSpec(noise_sigma=0.0)
        _, truths = beating_annulus(spec)
        for t in range(1, spec.frame_count):
            assert np.array_equal(
                truths[t].labels, truths[spec.frame_count - t].labels
            )

    def test_labels_wall_and_cavity(self):
        spec = BeatingAnnulusSpec(noise_sigma=0.0)
        seq, truths = beating_annulus(spec)
        labels = truths[0].labels
        cx, cy = spec.center_xy()
        assert labels[int(cy), int(cx)] == 3  # cavity center
        ring_x = int(cx + (spec.inner_radius + spec.outer_radius) / 2)
        assert labels[int(cy), ring_x] == 2  # mid-wall
        assert labels[0, 0] == 0

    def test_seeded_determinism(self):
        a_seq, _ = beating_annulus(BeatingAnnulusSpec(seed=2))
        b_seq, _ = beating_annulus(BeatingAnnulusSpec(seed=2))
        for a, b in zip(a_seq.frames, b_seq.frames):
            assert np.array_equal(a.pixels, b.pixels)
