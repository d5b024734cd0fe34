"""Command-line interface: synthesize phantoms, track, evaluate, inspect.

Exit codes follow one contract everywhere: 0 success, 1 runtime or data
error, 2 usage or parameter-validation error. Every synth/track run
writes a JSON manifest with the parameters, seed, and file digests
needed to reproduce it.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dataio import (
    NiftiVolume,
    export_binary_png,
    export_overlay_png,
    load_acdc_patient,
    patient_sequences,
    read_nifti,
    write_metrics_csv,
    write_nifti,
)
from .filters import gaussian_smooth
from .imgcore import LabelMask, STRUCTURE_NAMES, normalize_intensity
from .metrics import DiceReport, dice_nd, error_map, summarize
from .phantom import BeatingAnnulusSpec, MovingCircleSpec, beating_annulus, moving_circle
from .propagation import PipelineConfig
from .superpixels import DEFAULT_COMPACTNESS, SuperpixelConfig, boundary_map, slic_segment
from .tracking import CineSequence, track_bidirectional

__all__ = ["main"]


class UsageError(Exception):
    """Invalid arguments or parameters; mapped to exit code 2."""


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _digest_tree(root: Path, paths: list[Path]) -> dict[str, str]:
    return {str(p.relative_to(root)): _sha256(p) for p in sorted(paths)}


def _write_manifest(out_dir: Path, manifest: dict) -> None:
    text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    (out_dir / "manifest.json").write_text(text)


def _mask_volume(masks: list[LabelMask]) -> NiftiVolume:
    """Stack per-slice masks into an (x, y, z) uint8 volume."""
    h, w = masks[0].shape
    vox = np.zeros((w, h, len(masks)), dtype=np.uint8)
    for z, mask in enumerate(masks):
        vox[:, :, z] = mask.labels.T
    return NiftiVolume(voxels=vox)


def _frames_volume(frames: list[np.ndarray]) -> NiftiVolume:
    """Stack (H, W) float frames into an (x, y, 1, t) float32 cine volume."""
    h, w = frames[0].shape
    vox = np.zeros((w, h, 1, len(frames)), dtype=np.float32)
    for t, frame in enumerate(frames):
        vox[:, :, 0, t] = frame.T
    return NiftiVolume(voxels=vox)


def _pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    override = None
    if args.cells is not None:
        override = SuperpixelConfig(target_cells=args.cells, compactness=args.compactness)
    try:
        return PipelineConfig(
            gaussian_sigma=args.sigma,
            median_kernel=args.kernel,
            superpixel=override,
            cell_area=args.cell_area,
            compactness=args.compactness,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _add_pipeline_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sigma", type=float, default=0.5,
                        help="Gaussian smoothing std dev before segmentation (default 0.5)")
    parser.add_argument("--kernel", type=int, default=9,
                        help="median regularization kernel size, odd (default 9)")
    parser.add_argument("--cell-area", type=float, default=100.0,
                        help="target pixels per superpixel cell (default 100)")
    parser.add_argument("--cells", type=int, default=None,
                        help="absolute superpixel count, overrides --cell-area")
    parser.add_argument("--compactness", type=float, default=DEFAULT_COMPACTNESS,
                        help=f"superpixel compactness weight (default {DEFAULT_COMPACTNESS})")


def cmd_synth(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    try:
        if args.kind == "circle":
            spec = MovingCircleSpec(
                width=args.width or 64,
                height=args.height or 64,
                frame_count=args.frames,
                radius=args.radius,
                shift=(args.shift_x, args.shift_y),
                noise_sigma=args.noise,
                seed=args.seed,
            )
            sequence, truths = moving_circle(spec)
        else:
            spec = BeatingAnnulusSpec(
                width=args.width or 128,
                height=args.height or 128,
                frame_count=args.frames,
                inner_radius=args.inner,
                outer_radius=args.outer,
                contraction=args.contraction,
                noise_sigma=args.noise,
                seed=args.seed,
            )
            sequence, truths = beating_annulus(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    out_dir.mkdir(parents=True, exist_ok=True)
    pid = out_dir.name
    ed, es = sequence.ed_index, sequence.es_index
    (out_dir / "Info.cfg").write_text(
        f"ED: {ed + 1}\nES: {es + 1}\nGroup: SYN\nKind: {args.kind}\n"
    )
    write_nifti(_frames_volume([f.pixels for f in sequence.frames]), out_dir / f"{pid}_4d.nii.gz")
    for index, name in ((ed, "ED"), (es, "ES")):
        write_nifti(_mask_volume([truths[index]]), out_dir / f"{pid}_frame{index + 1:02d}_gt.nii.gz")
        export_overlay_png(sequence.frames[index], truths[index],
                           out_dir / f"preview_{name.lower()}.png")

    outputs = [p for p in out_dir.iterdir() if p.name != "manifest.json"]
    _write_manifest(out_dir, {
        "command": "synth",
        "version": __version__,
        "parameters": {
            "kind": args.kind,
            "width": spec.width,
            "height": spec.height,
            "frames": args.frames,
            "noise": args.noise,
            "seed": args.seed,
        },
        "ed_frame": ed + 1,
        "es_frame": es + 1,
        "outputs": _digest_tree(out_dir, outputs),
    })
    print(f"wrote phantom patient '{pid}' ({args.kind}, {args.frames} frames) to {out_dir}")
    return 0


def _track_slice_exports(args: argparse.Namespace, out_dir: Path, z: int,
                         seq: CineSequence, result) -> None:
    pid = Path(args.input).name
    if args.save_frames:
        masks_dir = out_dir / "masks"
        masks_dir.mkdir(exist_ok=True)
        for tag, masks in (("forward", result.forward_masks), ("backward", result.backward_masks)):
            write_nifti(_mask_volume(list(masks)), masks_dir / f"{pid}_slice{z:02d}_{tag}.nii.gz")
    if args.overlays:
        ov_dir = out_dir / "overlays"
        ov_dir.mkdir(exist_ok=True)
        export_overlay_png(seq.frames[seq.ed_index], seq.ed_mask,
                           ov_dir / f"{pid}_slice{z:02d}_ed.png")
        export_overlay_png(seq.frames[seq.es_index], result.fused_es,
                           ov_dir / f"{pid}_slice{z:02d}_es_fused.png")
    if args.error_maps and seq.es_mask_gt is not None:
        err_dir = out_dir / "errors"
        err_dir.mkdir(exist_ok=True)
        export_binary_png(error_map(result.fused_es, seq.es_mask_gt),
                          err_dir / f"{pid}_slice{z:02d}_es_error.png",
                          background=seq.frames[seq.es_index])


def cmd_track(args: argparse.Namespace) -> int:
    config = _pipeline_config(args)
    in_dir = Path(args.input)
    record = load_acdc_patient(in_dir)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    fused_slices: list[LabelMask] = []
    for z, seq in enumerate(patient_sequences(record)):
        result = track_bidirectional(seq, config)
        fused_slices.append(result.fused_es)
        if result.dice_per_structure is not None:
            scores = " ".join(
                f"{name}={value:.4f}" for name, value in result.dice_per_structure.items()
            )
            print(f"slice {z:02d}: {scores}")
        _track_slice_exports(args, out_dir, z, seq, result)

    pred = _mask_volume(fused_slices)
    pred_path = out_dir / f"{record.patient_id}_es_pred.nii.gz"
    write_nifti(pred, pred_path)

    truth = record.gt_es.voxels
    volume_dice = {
        name: dice_nd(pred.voxels, np.rint(truth).astype(np.int64), label)
        for label, name in STRUCTURE_NAMES.items()
    }
    print("volume ES dice: " + " ".join(f"{k}={v:.4f}" for k, v in volume_dice.items()))

    inputs = [p for p in sorted(in_dir.iterdir()) if p.is_file()]
    outputs = [p for p in out_dir.rglob("*") if p.is_file() and p.name != "manifest.json"]
    _write_manifest(out_dir, {
        "command": "track",
        "version": __version__,
        "input": str(in_dir),
        "input_digests": _digest_tree(in_dir, inputs),
        "parameters": {
            "sigma": args.sigma,
            "median_kernel": args.kernel,
            "cell_area": args.cell_area,
            "cells": args.cells,
            "compactness": args.compactness,
        },
        "seed": None,
        "patient_id": record.patient_id,
        "group": record.group,
        "volume_dice": {k: round(v, 6) for k, v in volume_dice.items()},
        "outputs": _digest_tree(out_dir, outputs),
    })
    print(f"wrote ES prediction to {pred_path}")
    return 0


def _labels_from_volume(vol: NiftiVolume) -> np.ndarray:
    return np.rint(vol.scaled()).astype(np.int64)


def _pair_report(pred_path: Path, truth_path: Path, patient_id: str, group: str) -> DiceReport:
    pred = _labels_from_volume(read_nifti(pred_path))
    truth = _labels_from_volume(read_nifti(truth_path))
    scores = {name: dice_nd(pred, truth, label) for label, name in STRUCTURE_NAMES.items()}
    return DiceReport(patient_id=patient_id, group=group,
                      dice_rv=scores["rv"], dice_myo=scores["myo"], dice_lv=scores["lv"])


def _patient_dirs(root: Path) -> list[Path]:
    def has_metadata(p: Path) -> bool:
        return any(p.glob("Info.cfg")) or any(p.glob("*.cfg")) or any(p.glob("*.txt"))

    if has_metadata(root):
        return [root]
    return sorted(d for d in root.iterdir() if d.is_dir() and has_metadata(d))


def _stem(path: Path) -> str:
    name = path.name
    for suffix in (".gz", ".nii"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
    return name


def cmd_eval(args: argparse.Namespace) -> int:
    if (args.truth is None) == (args.data is None):
        raise UsageError("provide exactly one of --truth (file pair) or --data (patient dirs)")

    reports: list[DiceReport] = []
    if args.truth is not None:
        pred_path = Path(args.pred)
        patient_id = args.id or _stem(pred_path)
        reports.append(_pair_report(pred_path, Path(args.truth), patient_id, args.group))
    else:
        pred_dir = Path(args.pred)
        for pdir in _patient_dirs(Path(args.data)):
            record = load_acdc_patient(pdir)
            pred_path = pred_dir / f"{record.patient_id}_es_pred.nii.gz"
            if not pred_path.exists():
                raise FileNotFoundError(f"no prediction for {record.patient_id}: {pred_path}")
            es_path = pdir / f"{record.patient_id}_frame{record.es_frame:02d}_gt.nii.gz"
            if not es_path.exists():
                es_path = es_path.with_suffix("")  # .nii fallback
            reports.append(_pair_report(pred_path, es_path, record.patient_id, record.group))

    if not reports:
        print("error: no patients found", file=sys.stderr)
        return 1

    for r in sorted(reports, key=lambda r: r.patient_id):
        print(f"{r.patient_id} {r.group} rv={r.dice_rv:.6f} myo={r.dice_myo:.6f} lv={r.dice_lv:.6f}")
    stats = summarize(reports)
    print()
    print(f"{'structure':<10}{'min':>10}{'q1':>10}{'median':>10}{'q3':>10}{'max':>10}{'mean':>10}")
    for name, row in stats.items():
        cells = "".join(f"{row[k]:>10.6f}" for k in ("min", "q1", "median", "q3", "max", "mean"))
        print(f"{name:<10}{cells}")
    if args.csv is not None:
        write_metrics_csv(reports, Path(args.csv))
        print(f"\nwrote {args.csv}")
    return 0


def cmd_superpixels(args: argparse.Namespace) -> int:
    try:
        if args.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {args.sigma}")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    vol = read_nifti(args.input)
    vox = vol.scaled()
    if vox.ndim == 4:
        plane = vox[:, :, args.slice, args.frame]
    elif vox.ndim == 3:
        plane = vox[:, :, args.slice]
    else:
        plane = vox
    frame = normalize_intensity(plane.T)

    if args.cells is not None:
        config = SuperpixelConfig(target_cells=args.cells, compactness=args.compactness)
    else:
        cells = max(1, int(frame.width * frame.height / args.cell_area))
        config = SuperpixelConfig(target_cells=cells, compactness=args.compactness)
    spmap = slic_segment(gaussian_smooth(frame, args.sigma), config)
    export_binary_png(boundary_map(spmap), Path(args.out),
                      background=frame, color=(255, 64, 64))
    print(f"{spmap.cell_count} cells; boundary overlay written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cinetrack",
        description="Propagate a heart segmentation through a cyclic cine sequence "
                    "by superpixel tracking, and evaluate the result.",
    )
    parser.add_argument("--version", action="version", version=f"cinetrack {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic ground-truthed patient")
    p_synth.add_argument("--kind", choices=("circle", "annulus"), default="circle")
    p_synth.add_argument("--out", required=True, help="output patient directory")
    p_synth.add_argument("--frames", type=int, default=10)
    p_synth.add_argument("--width", type=int, default=None)
    p_synth.add_argument("--height", type=int, default=None)
    p_synth.add_argument("--radius", type=float, default=20.0, help="circle radius")
    p_synth.add_argument("--shift-x", type=float, default=1.0, help="circle shift per frame")
    p_synth.add_argument("--shift-y", type=float, default=0.0)
    p_synth.add_argument("--inner", type=float, default=26.0, help="annulus inner radius")
    p_synth.add_argument("--outer", type=float, default=42.0, help="annulus outer radius")
    p_synth.add_argument("--contraction", type=float, default=0.3)
    p_synth.add_argument("--noise", type=float, default=0.05)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.set_defaults(func=cmd_synth)

    p_track = sub.add_parser("track", help="track the ED mask to ES from both directions")
    p_track.add_argument("input", help="patient directory (ACDC layout or synth output)")
    p_track.add_argument("--out", required=True, help="output directory")
    _add_pipeline_flags(p_track)
    p_track.add_argument("--save-frames", action="store_true",
                         help="write per-step masks along both paths")
    p_track.add_argument("--overlays", action="store_true",
                         help="write ED input and fused ES overlay PNGs")
    p_track.add_argument("--error-maps", action="store_true",
                         help="write ES disagreement maps against ground truth")
    p_track.set_defaults(func=cmd_track)

    p_eval = sub.add_parser("eval", help="Dice scores for predictions against ground truth")
    p_eval.add_argument("--pred", required=True,
                        help="prediction mask file, or directory of *_es_pred.nii.gz")
    p_eval.add_argument("--truth", default=None, help="ground-truth mask file (pair mode)")
    p_eval.add_argument("--data", default=None,
                        help="patient directory or root of patient directories (batch mode)")
    p_eval.add_argument("--csv", default=None, help="also write a CSV report here")
    p_eval.add_argument("--id", default=None, help="patient id for pair mode")
    p_eval.add_argument("--group", default="UNK", help="group tag for pair mode")
    p_eval.set_defaults(func=cmd_eval)

    p_sp = sub.add_parser("superpixels", help="debug: cell boundary overlay for one frame")
    p_sp.add_argument("input", help="NIfTI image (2-D, 3-D, or 4-D)")
    p_sp.add_argument("--out", required=True, help="output PNG path")
    p_sp.add_argument("--slice", type=int, default=0)
    p_sp.add_argument("--frame", type=int, default=0)
    p_sp.add_argument("--sigma", type=float, default=0.5)
    p_sp.add_argument("--cell-area", type=float, default=100.0)
    p_sp.add_argument("--cells", type=int, default=None)
    p_sp.add_argument("--compactness", type=float, default=DEFAULT_COMPACTNESS)
    p_sp.set_defaults(func=cmd_superpixels)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
