"""End-to-end patient workflow through the command-line interface.

Pass an ACDC-style patient directory (Info.cfg, <id>_4d.nii.gz, and the
two ground-truth frames) as the first argument to run on real data.
Without an argument the script first synthesizes a phantom patient in the
same layout, so the whole flow is reproducible offline:

    synth -> track -> eval
"""
import sys
from pathlib import Path

from cinetrack.cli import main

out_root = Path(__file__).parent / "output" / "patient_workflow"
out_root.mkdir(parents=True, exist_ok=True)

if len(sys.argv) > 1:
    patient_dir = Path(sys.argv[1])
else:
    patient_dir = out_root / "phantom01"
    print(f"no patient directory given, synthesizing one at {patient_dir}")
    rc = main([
        "synth", "--kind", "annulus", "--out", str(patient_dir),
        "--width", "96", "--height", "96", "--frames", "12",
        "--inner", "18", "--outer", "30", "--seed", "7",
    ])
    assert rc == 0, "synthesis failed"

pred_dir = out_root / "predictions"
print(f"\ntracking {patient_dir.name} ...")
rc = main([
    "track", str(patient_dir), "--out", str(pred_dir),
    "--overlays", "--error-maps",
])
assert rc == 0, "tracking failed"

print("\nscoring the predicted ES segmentation against ground truth ...")
rc = main([
    "eval", "--data", str(patient_dir), "--pred", str(pred_dir),
    "--csv", str(out_root / "scores.csv"),
])
assert rc == 0, "evaluation failed"
print(f"\nartifacts under {out_root}")
