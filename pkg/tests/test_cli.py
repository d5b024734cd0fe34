from __future__ import annotations

import json

import numpy as np
import pytest

from cinetrack.cli import main
from cinetrack.dataio import NiftiVolume, read_nifti, write_nifti


def synth_args(out_dir, **over):
    args = {
        "kind": "circle",
        "frames": "4",
        "width": "32",
        "height": "32",
        "radius": "9",
        "noise": "0.03",
    }
    args.update(over)
    argv = ["synth", "--out", str(out_dir)]
    for key, value in args.items():
        argv += [f"--{key.replace('_', '-')}", value]
    return argv


@pytest.fixture
def circle_patient(tmp_path):
    pdir = tmp_path / "circ01"
    assert main(synth_args(pdir)) == 0
    return pdir


class TestSynth:
    def test_writes_patient_layout(self, circle_patient):
        names = {p.name for p in circle_patient.iterdir()}
        assert names == {
            "Info.cfg",
            "circ01_4d.nii.gz",
            "circ01_frame01_gt.nii.gz",
            "circ01_frame04_gt.nii.gz",
            "preview_ed.png",
            "preview_es.png",
            "manifest.json",
        }
        info = (circle_patient / "Info.cfg").read_text()
        assert "ED: 1" in info and "ES: 4" in info and "Group: SYN" in info
        cine = read_nifti(circle_patient / "circ01_4d.nii.gz")
        assert cine.dims == (32, 32, 1, 4)

    def test_manifest_records_run(self, circle_patient):
        manifest = json.loads((circle_patient / "manifest.json").read_text())
        assert manifest["command"] == "synth"
        assert manifest["parameters"]["seed"] == 0
        assert manifest["parameters"]["frames"] == 4
        assert "circ01_4d.nii.gz" in manifest["outputs"]
        for digest in manifest["outputs"].values():
            assert len(digest) == 64

    def test_single_frame_is_usage_error(self, tmp_path):
        assert main(synth_args(tmp_path / "bad", frames="1")) == 2

    def test_same_seed_byte_identical(self, tmp_path):
        a = tmp_path / "one" / "syn"
        b = tmp_path / "two" / "syn"
        assert main(synth_args(a, kind="annulus", frames="6", width="64", height="64",
                               inner="12", outer="20")) == 0
        assert main(synth_args(b, kind="annulus", frames="6", width="64", height="64",
                               inner="12", outer="20")) == 0
        for file_a in sorted(a.iterdir()):
            file_b = b / file_a.name
            assert file_a.read_bytes() == file_b.read_bytes()


class TestTrack:
    def test_end_to_end(self, circle_patient, tmp_path, capsys):
        out = tmp_path / "run"
        rc = main(["track", str(circle_patient), "--out", str(out),
                   "--overlays", "--error-maps"])
        assert rc == 0
        pred = out / "circ01_es_pred.nii.gz"
        assert pred.exists()
        vol = read_nifti(pred)
        assert vol.dims == (32, 32, 1)
        assert (out / "overlays" / "circ01_slice00_es_fused.png").exists()
        assert (out / "errors" / "circ01_slice00_es_error.png").exists()

        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["parameters"]["sigma"] == 0.5
        assert manifest["parameters"]["median_kernel"] == 9
        assert "circ01_4d.nii.gz" in manifest["input_digests"]
        captured = capsys.readouterr()
        assert "volume ES dice" in captured.out

    def test_save_frames(self, circle_patient, tmp_path):
        out = tmp_path / "run"
        assert main(["track", str(circle_patient), "--out", str(out), "--save-frames"]) == 0
        fwd = read_nifti(out / "masks" / "circ01_slice00_forward.nii.gz")
        bwd = read_nifti(out / "masks" / "circ01_slice00_backward.nii.gz")
        # T=4, ed=0, es=3: forward walks 4 frames, backward 2
        assert fwd.dims == (32, 32, 4)
        assert bwd.dims == (32, 32, 2)

    def test_sigma_zero_is_usage_error(self, circle_patient, tmp_path):
        rc = main(["track", str(circle_patient), "--out", str(tmp_path / "x"),
                   "--sigma", "0"])
        assert rc == 2

    def test_missing_ed_ground_truth_is_data_error(self, circle_patient, tmp_path):
        (circle_patient / "circ01_frame01_gt.nii.gz").unlink()
        rc = main(["track", str(circle_patient), "--out", str(tmp_path / "x")])
        assert rc == 1

    def test_missing_input_directory(self, tmp_path):
        rc = main(["track", str(tmp_path / "ghost"), "--out", str(tmp_path / "x")])
        assert rc == 1

    def test_reruns_byte_identical(self, circle_patient, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert main(["track", str(circle_patient), "--out", str(out_a)]) == 0
        assert main(["track", str(circle_patient), "--out", str(out_b)]) == 0
        pred_a = (out_a / "circ01_es_pred.nii.gz").read_bytes()
        pred_b = (out_b / "circ01_es_pred.nii.gz").read_bytes()
        assert pred_a == pred_b


class TestEval:
    def _write_mask(self, path, labels):
        write_nifti(NiftiVolume(voxels=np.asarray(labels, dtype=np.uint8)), path)

    def test_identical_masks_score_one(self, tmp_path, capsys):
        labels = np.zeros((6, 6), dtype=np.uint8)
        labels[1:4, 1:4] = 1
        self._write_mask(tmp_path / "pred.nii", labels)
        self._write_mask(tmp_path / "truth.nii", labels)
        rc = main(["eval", "--pred", str(tmp_path / "pred.nii"),
                   "--truth", str(tmp_path / "truth.nii")])
        assert rc == 0
        out = capsys.readouterr().out
        assert "rv=1.000000" in out

    def test_shifted_block_scores_half(self, tmp_path, capsys):
        a = np.zeros((4, 4), dtype=np.uint8)
        a[0:2, 0:2] = 1
        b = np.zeros((4, 4), dtype=np.uint8)
        b[1:3, 0:2] = 1
        self._write_mask(tmp_path / "pred.nii", a)
        self._write_mask(tmp_path / "truth.nii", b)
        rc = main(["eval", "--pred", str(tmp_path / "pred.nii"),
                   "--truth", str(tmp_path / "truth.nii")])
        assert rc == 0
        assert "rv=0.500000" in capsys.readouterr().out

    def test_batch_mode_with_csv(self, circle_patient, tmp_path, capsys):
        run = tmp_path / "run"
        assert main(["track", str(circle_patient), "--out", str(run)]) == 0
        csv_path = tmp_path / "scores.csv"
        rc = main(["eval", "--pred", str(run), "--data", str(circle_patient),
                   "--csv", str(csv_path)])
        assert rc == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "patient_id,group,dice_rv,dice_myo,dice_lv"
        assert lines[1].startswith("circ01,SYN,")
        assert "median" in capsys.readouterr().out

    def test_no_patients_is_data_error(self, tmp_path, capsys):
        (tmp_path / "empty").mkdir()
        rc = main(["eval", "--pred", str(tmp_path), "--data", str(tmp_path / "empty")])
        assert rc == 1

    def test_shape_mismatch_is_data_error(self, tmp_path):
        self._write_mask(tmp_path / "pred.nii", np.zeros((4, 4), dtype=np.uint8))
        self._write_mask(tmp_path / "truth.nii", np.zeros((5, 4), dtype=np.uint8))
        rc = main(["eval", "--pred", str(tmp_path / "pred.nii"),
                   "--truth", str(tmp_path / "truth.nii")])
        assert rc == 1

    def test_requires_exactly_one_mode(self, tmp_path):
        assert main(["eval", "--pred", str(tmp_path / "p.nii")]) == 2


class TestSuperpixelsCommand:
    def test_boundary_overlay(self, circle_patient, tmp_path):
        out = tmp_path / "cells.png"
        rc = main(["superpixels", str(circle_patient / "circ01_4d.nii.gz"),
                   "--out", str(out), "--frame", "0"])
        assert rc == 0
        assert out.exists()

    def test_bad_sigma(self, circle_patient, tmp_path):
        rc = main(["superpixels", str(circle_patient / "circ01_4d.nii.gz"),
                   "--out", str(tmp_path / "x.png"), "--sigma", "-1"])
        assert rc == 2


class TestArgumentHandling:
    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0

    def test_unknown_subcommand_exits_two(self, capsys):
        assert main(["frobnicate"]) == 2

    def test_no_arguments_exits_two(self, capsys):
        assert main([]) == 2
